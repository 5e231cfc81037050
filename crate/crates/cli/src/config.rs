//! Run configuration: a TOML document with top-level settings and one
//! `[[endpoint]]` table per SPARQL endpoint.
//!
//! ```toml
//! seed = 42
//! sample_n = 2000
//! similarity_threshold = 0.75
//! output_dir = "out"
//! workers = 4
//! graph_rules = "graph_rules.tsv"
//! embeddings = "vectors.txt"
//! idf = "idf.txt"
//!
//! [[endpoint]]
//! id = "bio2rdf"
//! url = "http://127.0.0.1:18081/sparql"
//! version = "auto"
//! timeout_secs = 60
//! max_retries = 3
//! politeness_ms = 250
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use lodprof_core::extract::DEFAULT_CLASS_CAP;
use lodprof_core::similarity::{
    DEFAULT_RESTARTS, DEFAULT_SIMILARITY_THRESHOLD, DEFAULT_SIZE_FLOOR,
};
use lodprof_core::sparql::{DeclaredVersion, EndpointDescriptor, RetryPolicy};
use lodprof_core::uri::DEFAULT_MISMATCH_THRESHOLD;
use serde::Deserialize;

use crate::error::{CliError, ModuleResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_sample_n")]
    sample_n: usize,
    #[serde(default = "default_threshold")]
    similarity_threshold: f64,
    #[serde(default = "default_output_dir")]
    output_dir: PathBuf,
    #[serde(default = "default_workers")]
    workers: usize,
    #[serde(default = "default_class_cap")]
    class_cap: usize,
    #[serde(default = "default_mismatch_threshold")]
    mismatch_threshold: usize,
    #[serde(default = "default_restarts")]
    louvain_restarts: u64,
    #[serde(default = "default_size_floor")]
    community_size_floor: usize,
    catalog: Option<PathBuf>,
    graph_rules: Option<PathBuf>,
    embeddings: Option<PathBuf>,
    idf: Option<PathBuf>,
    #[serde(default = "default_true")]
    label_from_endpoints: bool,
    #[serde(default = "default_retry_base_ms")]
    retry_base_ms: u64,
    #[serde(default = "default_retry_cap_ms")]
    retry_cap_ms: u64,
    #[serde(default, rename = "endpoint")]
    endpoints: Vec<EndpointConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndpointConfig {
    id: String,
    url: String,
    #[serde(default = "default_version")]
    version: String,
    #[serde(default = "default_timeout_secs")]
    timeout_secs: u64,
    #[serde(default = "default_max_retries")]
    max_retries: u32,
    #[serde(default = "default_politeness_ms")]
    politeness_ms: u64,
}

fn default_sample_n() -> usize {
    2000
}
fn default_threshold() -> f64 {
    DEFAULT_SIMILARITY_THRESHOLD
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("lodprof-out")
}
fn default_workers() -> usize {
    4
}
fn default_class_cap() -> usize {
    DEFAULT_CLASS_CAP
}
fn default_mismatch_threshold() -> usize {
    DEFAULT_MISMATCH_THRESHOLD
}
fn default_restarts() -> u64 {
    DEFAULT_RESTARTS
}
fn default_size_floor() -> usize {
    DEFAULT_SIZE_FLOOR
}
fn default_true() -> bool {
    true
}
fn default_retry_base_ms() -> u64 {
    1000
}
fn default_retry_cap_ms() -> u64 {
    30_000
}
fn default_version() -> String {
    "auto".into()
}
fn default_timeout_secs() -> u64 {
    60
}
fn default_max_retries() -> u32 {
    3
}
fn default_politeness_ms() -> u64 {
    250
}

/// Validated configuration with resolved paths.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub endpoints: Vec<EndpointDescriptor>,
    pub seed: u64,
    pub sample_n: usize,
    pub similarity_threshold: f64,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub class_cap: usize,
    pub mismatch_threshold: usize,
    pub louvain_restarts: u64,
    pub community_size_floor: usize,
    pub catalog: Option<PathBuf>,
    pub graph_rules: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub idf: Option<PathBuf>,
    pub label_from_endpoints: bool,
    pub retry: RetryPolicy,
}

/// Command-line and environment values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub similarity_threshold: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new("config", format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base, overrides)
    }

    pub fn parse(text: &str, base: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let file: FileConfig = toml::from_str(text).module("config")?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

        let mut ids = BTreeSet::new();
        let mut endpoints = Vec::new();
        for e in file.endpoints {
            if !ids.insert(e.id.clone()) {
                return Err(CliError::new(
                    "config",
                    format!("duplicate endpoint id {:?}", e.id),
                ));
            }
            let version: DeclaredVersion = e.version.parse().module("config")?;
            let descriptor = EndpointDescriptor::new(&e.id, &e.url)
                .module("config")?
                .with_declared_version(version)
                .with_timeout(Duration::from_secs(e.timeout_secs))
                .with_max_retries(e.max_retries)
                .with_politeness_delay(Duration::from_millis(e.politeness_ms));
            endpoints.push(descriptor);
        }

        let config = RunConfig {
            endpoints,
            seed: overrides.seed.unwrap_or(file.seed),
            sample_n: file.sample_n,
            similarity_threshold: overrides
                .similarity_threshold
                .unwrap_or(file.similarity_threshold),
            output_dir: overrides
                .output_dir
                .clone()
                .unwrap_or_else(|| resolve(file.output_dir)),
            workers: file.workers,
            class_cap: file.class_cap,
            mismatch_threshold: file.mismatch_threshold,
            louvain_restarts: file.louvain_restarts,
            community_size_floor: file.community_size_floor,
            catalog: file.catalog.map(resolve),
            graph_rules: file.graph_rules.map(resolve),
            embeddings: file.embeddings.map(resolve),
            idf: file.idf.map(resolve),
            label_from_endpoints: file.label_from_endpoints,
            retry: RetryPolicy {
                base: Duration::from_millis(file.retry_base_ms),
                cap: Duration::from_millis(file.retry_cap_ms),
            },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::new("config", m));
        if self.sample_n == 0 {
            return bad("sample_n must be positive".into());
        }
        if !(self.similarity_threshold > 0.0 && self.similarity_threshold <= 1.0) {
            return bad(format!(
                "similarity_threshold must be in (0, 1], got {}",
                self.similarity_threshold
            ));
        }
        if self.workers == 0 {
            return bad("workers must be positive".into());
        }
        if self.louvain_restarts == 0 {
            return bad("louvain_restarts must be positive".into());
        }
        if self.embeddings.is_some() != self.idf.is_some() {
            return bad("embeddings and idf must be given together".into());
        }
        Ok(())
    }

    /// Creates the output directory and checks that it accepts files.
    pub fn ensure_output_dir(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.output_dir)
            .and_then(|_| tempfile::tempfile_in(&self.output_dir).map(drop))
            .map_err(|e| {
                CliError::new(
                    "config",
                    format!(
                        "output directory {} is not writable: {e}",
                        self.output_dir.display()
                    ),
                )
            })
    }

    pub fn endpoint(&self, id: &str) -> Option<&EndpointDescriptor> {
        self.endpoints.iter().find(|e| e.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[[endpoint]]\nid = \"a\"\nurl = \"http://127.0.0.1:1/sparql\"\n";

    #[test]
    fn defaults() {
        let c = RunConfig::parse(MINIMAL, Path::new("/base"), &Overrides::default()).unwrap();
        assert_eq!(c.sample_n, 2000);
        assert_eq!(c.similarity_threshold, 0.75);
        assert_eq!(c.output_dir, PathBuf::from("/base/lodprof-out"));
        assert_eq!(c.endpoints[0].max_retries, 3);
        assert_eq!(c.endpoints[0].politeness_delay, Duration::from_millis(250));
    }

    #[test]
    fn overrides_win() {
        let o = Overrides {
            output_dir: Some("/elsewhere".into()),
            seed: Some(7),
            similarity_threshold: Some(0.5),
        };
        let c = RunConfig::parse(&format!("seed = 1\n{MINIMAL}"), Path::new("."), &o).unwrap();
        assert_eq!((c.seed, c.similarity_threshold), (7, 0.5));
        assert_eq!(c.output_dir, PathBuf::from("/elsewhere"));
    }

    #[test]
    fn rejects_bad_values() {
        let o = Overrides::default();
        for text in [
            format!("sample_n = 0\n{MINIMAL}"),
            format!("similarity_threshold = 1.5\n{MINIMAL}"),
            format!("similarity_threshold = 0.0\n{MINIMAL}"),
            format!("bogus = 1\n{MINIMAL}"),
            format!("{MINIMAL}{MINIMAL}"),
            "[[endpoint]]\nid = \"a\"\nurl = \"not a url\"\n".to_string(),
            format!("embeddings = \"v.txt\"\n{MINIMAL}"),
        ] {
            let e = RunConfig::parse(&text, Path::new("."), &o).unwrap_err();
            assert_eq!(e.module, "config", "{text}");
        }
    }
}
