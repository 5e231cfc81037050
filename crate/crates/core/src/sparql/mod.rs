//! SPARQL 1.1 protocol client: capability probing, retries with backoff,
//! per-endpoint politeness, and the SQ1–SQ5 extraction templates.

mod capability;
mod client;
mod endpoint;
mod execute_template;
mod results;
pub mod templates;

use thiserror::Error;

pub use capability::{
    PROBE_BASIC, PROBE_BIND, PROBE_GROUP_BY, PROBE_NAMED_GRAPHS, PROBE_ORDER_BY_RAND,
};
pub use client::{PolitenessLimiter, RetryPolicy, SparqlClient, MAX_GET_QUERY_LEN};
pub use endpoint::{CapabilityProfile, DeclaredVersion, EndpointDescriptor, SparqlVersion};
pub(crate) use execute_template::stable_hash;
pub use execute_template::{select_form, QueryForm, SamplingOptions};
pub use results::{Binding, QueryResult, RESULTS_JSON_MEDIA_TYPE};
pub use templates::{
    render_canonical, render_fallback, render_label_query, TemplateId, TemplateParams,
};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("endpoint {endpoint} unreachable: {detail}")]
    NetworkUnreachable { endpoint: String, detail: String },
    #[error("every capability probe failed on endpoint {endpoint}")]
    ProbeAmbiguous { endpoint: String },
    #[error("query to {endpoint} timed out after {attempts} attempt(s)")]
    QueryTimeout { endpoint: String, attempts: u32 },
    #[error("malformed results document: {0}")]
    MalformedResponse(String),
    #[error("endpoint returned HTTP {status}: {body}")]
    EndpointError { status: u16, body: String },
    #[error("missing template parameter {0}")]
    MissingParam(&'static str),
    #[error("invalid value for {placeholder}: {value:?}")]
    InvalidParam {
        placeholder: &'static str,
        value: String,
    },
    #[error("no usable form of {template}: {reason}")]
    UnsupportedTemplate {
        template: TemplateId,
        reason: String,
    },
    #[error("invalid endpoint: {0}")]
    InvalidEndpoint(String),
    #[error("empty query")]
    EmptyQuery,
}
