use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::ClientError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparqlVersion {
    #[serde(rename = "1.0")]
    V1_0,
    #[serde(rename = "1.1")]
    V1_1,
}

impl fmt::Display for SparqlVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SparqlVersion::V1_0 => "1.0",
            SparqlVersion::V1_1 => "1.1",
        })
    }
}

/// Version an operator declares for an endpoint; `Auto` means probe it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclaredVersion {
    #[default]
    Auto,
    #[serde(rename = "1.0")]
    V1_0,
    #[serde(rename = "1.1")]
    V1_1,
}

impl FromStr for DeclaredVersion {
    type Err = ClientError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(DeclaredVersion::Auto),
            "1.0" | "v1_0" | "v1.0" => Ok(DeclaredVersion::V1_0),
            "1.1" | "v1_1" | "v1.1" => Ok(DeclaredVersion::V1_1),
            other => Err(ClientError::InvalidEndpoint(format!(
                "unknown SPARQL version {other:?}"
            ))),
        }
    }
}

/// Keywords and forms an endpoint accepts, as established by probing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CapabilityProfile {
    pub version: SparqlVersion,
    pub supports_group_by: bool,
    pub supports_bind: bool,
    pub supports_order_by_rand: bool,
    pub supports_named_graphs: bool,
}

impl CapabilityProfile {
    pub const FULL: CapabilityProfile = CapabilityProfile {
        version: SparqlVersion::V1_1,
        supports_group_by: true,
        supports_bind: true,
        supports_order_by_rand: true,
        supports_named_graphs: true,
    };

    /// Only plain SPARQL 1.0 pattern matching with named graphs.
    pub const MINIMAL: CapabilityProfile = CapabilityProfile {
        version: SparqlVersion::V1_0,
        supports_group_by: false,
        supports_bind: false,
        supports_order_by_rand: false,
        supports_named_graphs: true,
    };

    /// Enforces "1.0 implies no GROUP BY and no BIND".
    pub fn normalized(mut self) -> Self {
        if self.version == SparqlVersion::V1_0 {
            self.supports_group_by = false;
            self.supports_bind = false;
        }
        self
    }
}

impl Default for CapabilityProfile {
    fn default() -> Self {
        CapabilityProfile::FULL
    }
}

/// A remote SPARQL endpoint and how politely to talk to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointDescriptor {
    pub id: String,
    pub url: String,
    pub declared_version: DeclaredVersion,
    pub timeout: Duration,
    pub max_retries: u32,
    pub politeness_delay: Duration,
    /// Filled by capability detection; `None` until probed.
    pub capability: Option<CapabilityProfile>,
}

impl EndpointDescriptor {
    pub fn new(id: impl Into<String>, url: impl Into<String>) -> Result<Self, ClientError> {
        let endpoint = EndpointDescriptor {
            id: id.into(),
            url: url.into(),
            declared_version: DeclaredVersion::Auto,
            timeout: Duration::from_secs(60),
            max_retries: 3,
            politeness_delay: Duration::from_millis(250),
            capability: None,
        };
        endpoint.validate()?;
        Ok(endpoint)
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_max_retries(mut self, retries: u32) -> Self {
        self.max_retries = retries;
        self
    }

    pub fn with_politeness_delay(mut self, delay: Duration) -> Self {
        self.politeness_delay = delay;
        self
    }

    pub fn with_declared_version(mut self, version: DeclaredVersion) -> Self {
        self.declared_version = version;
        self
    }

    pub fn with_capability(mut self, capability: CapabilityProfile) -> Self {
        self.capability = Some(capability.normalized());
        self
    }

    /// Capability profile, or the full 1.1 profile when not yet probed.
    pub fn capability_or_full(&self) -> CapabilityProfile {
        self.capability.unwrap_or(CapabilityProfile::FULL)
    }

    pub fn validate(&self) -> Result<(), ClientError> {
        if self.id.trim().is_empty() {
            return Err(ClientError::InvalidEndpoint("empty endpoint id".into()));
        }
        let parsed = url::Url::parse(&self.url)
            .map_err(|e| ClientError::InvalidEndpoint(format!("{}: {e}", self.url)))?;
        if !matches!(parsed.scheme(), "http" | "https") {
            return Err(ClientError::InvalidEndpoint(format!(
                "{}: not an HTTP(S) URL",
                self.url
            )));
        }
        if self.timeout.is_zero() {
            return Err(ClientError::InvalidEndpoint(format!(
                "{}: timeout must be positive",
                self.id
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_http_urls() {
        assert!(EndpointDescriptor::new("x", "ftp://example.org/sparql").is_err());
        assert!(EndpointDescriptor::new("x", "not a url").is_err());
        assert!(EndpointDescriptor::new("x", "https://example.org/sparql").is_ok());
    }

    #[test]
    fn rejects_zero_timeout() {
        let mut e = EndpointDescriptor::new("x", "http://localhost/sparql").unwrap();
        e.timeout = Duration::ZERO;
        assert!(e.validate().is_err());
    }

    #[test]
    fn version_1_0_drops_group_by_and_bind() {
        let p = CapabilityProfile {
            version: SparqlVersion::V1_0,
            ..CapabilityProfile::FULL
        }
        .normalized();
        assert!(!p.supports_group_by);
        assert!(!p.supports_bind);
        assert!(p.supports_order_by_rand);
    }

    #[test]
    fn declared_version_parses() {
        assert_eq!(
            "auto".parse::<DeclaredVersion>().unwrap(),
            DeclaredVersion::Auto
        );
        assert_eq!(
            "1.0".parse::<DeclaredVersion>().unwrap(),
            DeclaredVersion::V1_0
        );
        assert_eq!(
            "v1_1".parse::<DeclaredVersion>().unwrap(),
            DeclaredVersion::V1_1
        );
        assert!("2.0".parse::<DeclaredVersion>().is_err());
    }
}
