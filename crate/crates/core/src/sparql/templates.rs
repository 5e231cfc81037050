//! Query templates SQ1–SQ5 and the fallback forms used on restricted or
//! slow endpoints.
//!
//! Canonical texts are kept byte-for-byte, including the tab indentation and
//! the trailing blanks on SQ3's pattern lines. Placeholders are substituted
//! verbatim and nothing else changes, except that the `LIMIT 2000` of SQ4 and
//! SQ5 follows the configured sample size.
//!
//! Fallback forms (none of them use GROUP BY, BIND or RAND):
//!
//! | template | fallback                                                        |
//! |----------|-----------------------------------------------------------------|
//! | SQ1      | `GRAPH ?g { }` listing of named graphs                          |
//! | SQ2      | paged `?x rdf:type ?Concept` listing, counted client-side       |
//! | SQ3      | paged `?x ?p ?o ?c` listing, grouped and typed client-side      |
//! | SQ4      | paged instance listing, subsampled client-side with a seed      |
//! | SQ5      | paged assertion listing, subsampled client-side with a seed     |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ClientError;

pub const SQ1: &str = "SELECT DISTINCT ?g WHERE {\n\tGRAPH ?g { ?s ?p ?o }\n}";

pub const SQ2: &str = "SELECT ?Concept (COUNT (?x) AS ?cCount) WHERE {\n\tGRAPH <GRAPH_URI> { ?x rdf:type ?Concept }\n} GROUP BY ?Concept ORDER BY DESC(?cCount)";

pub const SQ3: &str = "SELECT DISTINCT ?p ?c (COUNT(?x) AS ?count) ?valType WHERE {\n\tGRAPH <GRAPH_URI> { ?x rdf:type <CONCEPT_URI>; ?p ?o . \n    OPTIONAL {?o rdf:type ?c} . \n    FILTER(!(?p = 'rdf:type')) . \n    BIND(DATATYPE(?o) AS ?valType) }\n} GROUP BY ?p ?c ?valType ORDER BY DESC(?count)";

pub const SQ4: &str = "SELECT ?x WHERE {\n\tGRAPH <GRAPH_URI> { ?x rdf:type <CONCEPT_URI> }\n} ORDER BY RAND() LIMIT 2000";

pub const SQ5: &str = "SELECT ?x WHERE {\n\tGRAPH <GRAPH_URI> { ?c rdf:type <CONCEPT_URI>; <PROPERTY_URI> ?x }\n} ORDER BY RAND() LIMIT 2000";

pub const SQ1_FALLBACK: &str = "SELECT DISTINCT ?g WHERE {\n\tGRAPH ?g { }\n}";

/// Rows fetched per request by paged fallback forms.
pub const FALLBACK_PAGE_SIZE: usize = 10_000;

/// Upper bound on rows fetched before client-side subsampling (SQ4/SQ5).
pub const FALLBACK_SAMPLE_POOL: usize = 20_000;

pub const DEFAULT_SAMPLE_SIZE: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TemplateId {
    #[serde(rename = "SQ1")]
    Sq1,
    #[serde(rename = "SQ2")]
    Sq2,
    #[serde(rename = "SQ3")]
    Sq3,
    #[serde(rename = "SQ4")]
    Sq4,
    #[serde(rename = "SQ5")]
    Sq5,
}

impl TemplateId {
    pub const ALL: [TemplateId; 5] = [
        TemplateId::Sq1,
        TemplateId::Sq2,
        TemplateId::Sq3,
        TemplateId::Sq4,
        TemplateId::Sq5,
    ];

    pub fn canonical_text(self) -> &'static str {
        match self {
            TemplateId::Sq1 => SQ1,
            TemplateId::Sq2 => SQ2,
            TemplateId::Sq3 => SQ3,
            TemplateId::Sq4 => SQ4,
            TemplateId::Sq5 => SQ5,
        }
    }

    fn needs_graph(self) -> bool {
        self != TemplateId::Sq1
    }

    fn needs_concept(self) -> bool {
        matches!(self, TemplateId::Sq3 | TemplateId::Sq4 | TemplateId::Sq5)
    }

    fn needs_property(self) -> bool {
        self == TemplateId::Sq5
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            TemplateId::Sq1 => 1,
            TemplateId::Sq2 => 2,
            TemplateId::Sq3 => 3,
            TemplateId::Sq4 => 4,
            TemplateId::Sq5 => 5,
        };
        write!(f, "SQ{n}")
    }
}

impl FromStr for TemplateId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SQ1" => Ok(TemplateId::Sq1),
            "SQ2" => Ok(TemplateId::Sq2),
            "SQ3" => Ok(TemplateId::Sq3),
            "SQ4" => Ok(TemplateId::Sq4),
            "SQ5" => Ok(TemplateId::Sq5),
            _ => Err(format!("unknown template {s:?}")),
        }
    }
}

/// Values for the `GRAPH_URI`, `CONCEPT_URI` and `PROPERTY_URI` placeholders.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemplateParams {
    pub graph: Option<String>,
    pub concept: Option<String>,
    pub property: Option<String>,
}

impl TemplateParams {
    pub fn graph(graph: impl Into<String>) -> Self {
        TemplateParams {
            graph: Some(graph.into()),
            ..Default::default()
        }
    }

    pub fn concept(mut self, concept: impl Into<String>) -> Self {
        self.concept = Some(concept.into());
        self
    }

    pub fn property(mut self, property: impl Into<String>) -> Self {
        self.property = Some(property.into());
        self
    }

    fn require<'a>(
        value: &'a Option<String>,
        placeholder: &'static str,
    ) -> Result<&'a str, ClientError> {
        let v = value
            .as_deref()
            .ok_or(ClientError::MissingParam(placeholder))?;
        if v.is_empty() || v.contains(['<', '>', '"', ' ', '\t', '\n', '{', '}']) {
            return Err(ClientError::InvalidParam {
                placeholder,
                value: v.to_string(),
            });
        }
        Ok(v)
    }

    /// Checks every placeholder `id` requires is present and safe to embed.
    pub fn check(&self, id: TemplateId) -> Result<(), ClientError> {
        if id.needs_graph() {
            Self::require(&self.graph, "GRAPH_URI")?;
        }
        if id.needs_concept() {
            Self::require(&self.concept, "CONCEPT_URI")?;
        }
        if id.needs_property() {
            Self::require(&self.property, "PROPERTY_URI")?;
        }
        Ok(())
    }

    fn g(&self) -> &str {
        self.graph.as_deref().unwrap_or_default()
    }

    fn c(&self) -> &str {
        self.concept.as_deref().unwrap_or_default()
    }

    fn p(&self) -> &str {
        self.property.as_deref().unwrap_or_default()
    }
}

/// Canonical text of `id` with placeholders substituted.
pub fn render_canonical(
    id: TemplateId,
    params: &TemplateParams,
    sample_n: usize,
) -> Result<String, ClientError> {
    params.check(id)?;
    let mut text = id.canonical_text().to_string();
    if id.needs_graph() {
        text = text.replace("GRAPH_URI", params.g());
    }
    if id.needs_concept() {
        text = text.replace("CONCEPT_URI", params.c());
    }
    if id.needs_property() {
        text = text.replace("PROPERTY_URI", params.p());
    }
    if matches!(id, TemplateId::Sq4 | TemplateId::Sq5) && sample_n != DEFAULT_SAMPLE_SIZE {
        let tail = format!("LIMIT {DEFAULT_SAMPLE_SIZE}");
        let at = text.rfind(&tail).expect("SQ4/SQ5 end with a LIMIT clause");
        text.replace_range(at.., &format!("LIMIT {sample_n}"));
    }
    Ok(text)
}

/// One page of the fallback form of `id`. SQ1's fallback is not paged and
/// ignores `limit`/`offset`.
pub fn render_fallback(
    id: TemplateId,
    params: &TemplateParams,
    limit: usize,
    offset: usize,
) -> Result<String, ClientError> {
    params.check(id)?;
    let page = format!(" LIMIT {limit} OFFSET {offset}");
    Ok(match id {
        TemplateId::Sq1 => SQ1_FALLBACK.to_string(),
        TemplateId::Sq2 => format!(
            "SELECT ?x ?Concept WHERE {{GRAPH <{}> {{?x rdf:type ?Concept}}}}{page}",
            params.g()
        ),
        TemplateId::Sq3 => format!(
            "SELECT ?x ?p ?o ?c WHERE {{GRAPH <{}> {{?x rdf:type <{}> ; ?p ?o . OPTIONAL {{?o rdf:type ?c}}}}}}{page}",
            params.g(),
            params.c()
        ),
        TemplateId::Sq4 => format!(
            "SELECT ?x WHERE {{GRAPH <{}> {{?x rdf:type <{}>}}}}{page}",
            params.g(),
            params.c()
        ),
        TemplateId::Sq5 => format!(
            "SELECT ?x WHERE {{GRAPH <{}> {{?c rdf:type <{}> ; <{}> ?x}}}}{page}",
            params.g(),
            params.c(),
            params.p()
        ),
    })
}

/// Query for `rdfs:label` / `skos:prefLabel` annotations of one IRI.
pub fn render_label_query(iri: &str) -> Result<String, ClientError> {
    let params = TemplateParams::graph(iri);
    let iri = TemplateParams::require(&params.graph, "URI")?;
    Ok(format!(
        "SELECT ?label WHERE {{ {{ <{iri}> <{}> ?label }} UNION {{ <{iri}> <{}> ?label }} }} LIMIT 1",
        crate::term::RDFS_LABEL,
        crate::term::SKOS_PREF_LABEL
    ))
}
