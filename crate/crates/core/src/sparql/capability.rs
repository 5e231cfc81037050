//! Capability probing: one minimal query per keyword.

use super::client::SparqlClient;
use super::endpoint::{CapabilityProfile, DeclaredVersion, EndpointDescriptor, SparqlVersion};
use super::ClientError;

pub const PROBE_BASIC: &str = "SELECT ?s WHERE { ?s ?p ?o } LIMIT 1";
pub const PROBE_NAMED_GRAPHS: &str = "SELECT ?g WHERE { GRAPH ?g { ?s ?p ?o } } LIMIT 1";
pub const PROBE_GROUP_BY: &str =
    "SELECT ?p (COUNT(?s) AS ?n) WHERE { ?s ?p ?o } GROUP BY ?p LIMIT 1";
pub const PROBE_BIND: &str = "SELECT ?s ?t WHERE { ?s ?p ?o . BIND(DATATYPE(?o) AS ?t) } LIMIT 1";
pub const PROBE_ORDER_BY_RAND: &str = "SELECT ?s WHERE { ?s ?p ?o } ORDER BY RAND() LIMIT 1";

impl SparqlClient {
    /// Probes which keywords `endpoint` accepts. Each flag is true iff its
    /// probe succeeded (after the usual retries). A declared version is
    /// trusted; `auto` resolves to 1.1 when GROUP BY or BIND works.
    pub fn detect_capabilities(
        &self,
        endpoint: &EndpointDescriptor,
    ) -> Result<CapabilityProfile, ClientError> {
        let probe = |query: &str| -> Result<bool, ClientError> {
            match self.execute(endpoint, query) {
                Ok(_) => Ok(true),
                Err(err @ ClientError::NetworkUnreachable { .. }) => Err(err),
                Err(err) => {
                    log::info!("{}: probe failed: {err}", endpoint.id);
                    Ok(false)
                }
            }
        };

        let basic = probe(PROBE_BASIC)?;
        let supports_named_graphs = probe(PROBE_NAMED_GRAPHS)?;
        let supports_order_by_rand = probe(PROBE_ORDER_BY_RAND)?;
        let (supports_group_by, supports_bind) = match endpoint.declared_version {
            DeclaredVersion::V1_0 => (false, false),
            _ => (probe(PROBE_GROUP_BY)?, probe(PROBE_BIND)?),
        };

        if !(basic
            || supports_named_graphs
            || supports_order_by_rand
            || supports_group_by
            || supports_bind)
        {
            return Err(ClientError::ProbeAmbiguous {
                endpoint: endpoint.id.clone(),
            });
        }

        let version = match endpoint.declared_version {
            DeclaredVersion::V1_0 => SparqlVersion::V1_0,
            DeclaredVersion::V1_1 => SparqlVersion::V1_1,
            DeclaredVersion::Auto if supports_group_by || supports_bind => SparqlVersion::V1_1,
            DeclaredVersion::Auto => SparqlVersion::V1_0,
        };
        Ok(CapabilityProfile {
            version,
            supports_group_by,
            supports_bind,
            supports_order_by_rand,
            supports_named_graphs,
        }
        .normalized())
    }
}
