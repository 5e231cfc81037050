//! Per-graph schema extraction: graphs (SQ1), classes with counts (SQ2),
//! instance samples (SQ4), property realizations (SQ3) and assertion value
//! samples (SQ5).

mod summary;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use summary::{
    summarize, summarize_with_threshold, uri_pattern, ValueSummary, DEFAULT_CATEGORICAL_THRESHOLD,
};

use crate::sparql::{
    ClientError, EndpointDescriptor, QueryResult, SamplingOptions, SparqlClient, TemplateId,
    TemplateParams,
};
use crate::term::{Term, RDF_TYPE};

/// Classes beyond this many (smallest counts first) are not drilled into.
pub const DEFAULT_CLASS_CAP: usize = 10_000;

pub const DEFAULT_WORKERS: usize = 4;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("endpoint {endpoint} is unusable: {reason}")]
    EndpointUnusable { endpoint: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    pub sampling: SamplingOptions,
    pub class_cap: usize,
    pub categorical_threshold: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            sampling: SamplingOptions::default(),
            class_cap: DEFAULT_CLASS_CAP,
            categorical_threshold: DEFAULT_CATEGORICAL_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyKind {
    Object,
    Data,
}

/// Range of a realization. Objects that are blank nodes or IRIs without an
/// `rdf:type` in the graph have an anonymous range.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "uri", rename_all = "lowercase")]
pub enum Range {
    Class(String),
    Datatype(String),
    Anonymous,
}

impl Range {
    pub fn uri(&self) -> Option<&str> {
        match self {
            Range::Class(u) | Range::Datatype(u) => Some(u),
            Range::Anonymous => None,
        }
    }

    pub fn property_kind(&self) -> PropertyKind {
        match self {
            Range::Datatype(_) => PropertyKind::Data,
            _ => PropertyKind::Object,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassProfile {
    pub uri: String,
    pub count: u64,
    pub sample_instances: Vec<Term>,
    pub summary: ValueSummary,
    #[serde(default)]
    pub mismatch_suspect: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub domain: String,
    pub property: String,
    pub kind: PropertyKind,
    pub range: Range,
    pub count: u64,
    pub sample_assertion_values: Vec<Term>,
    pub summary: ValueSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub template: TemplateId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    pub message: String,
}

/// Schema of one named graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaFragment {
    pub endpoint: String,
    pub graph_uri: String,
    pub classes: Vec<ClassProfile>,
    pub property_realizations: Vec<Realization>,
    #[serde(default)]
    pub issues: Vec<Issue>,
}

impl SchemaFragment {
    pub fn new(endpoint: impl Into<String>, graph_uri: impl Into<String>) -> Self {
        SchemaFragment {
            endpoint: endpoint.into(),
            graph_uri: graph_uri.into(),
            classes: Vec::new(),
            property_realizations: Vec::new(),
            issues: Vec::new(),
        }
    }

    pub fn class(&self, uri: &str) -> Option<&ClassProfile> {
        self.classes.iter().find(|c| c.uri == uri)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fragment serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn parse_count(term: Option<&Term>) -> Option<u64> {
    term.and_then(|t| t.lexical().trim().parse().ok())
}

fn sorted_column(result: &QueryResult, var: &str) -> Vec<Term> {
    let mut v: Vec<Term> = result.column(var).cloned().collect();
    v.sort();
    v
}

struct Extractor<'a> {
    client: &'a SparqlClient,
    endpoint: &'a EndpointDescriptor,
    options: &'a ExtractOptions,
}

impl Extractor<'_> {
    fn run(&self, id: TemplateId, params: &TemplateParams) -> Result<QueryResult, ClientError> {
        self.client
            .execute_template(self.endpoint, id, params, self.options.sampling)
    }

    fn summarize(&self, values: &[Term]) -> ValueSummary {
        summarize_with_threshold(values, self.options.categorical_threshold)
    }

    fn graph(&self, graph: &str) -> SchemaFragment {
        let mut fragment = SchemaFragment::new(&self.endpoint.id, graph);
        let params = TemplateParams::graph(graph);
        let classes = match self.run(TemplateId::Sq2, &params) {
            Ok(r) => r,
            Err(err) => {
                fragment.issues.push(Issue {
                    template: TemplateId::Sq2,
                    class: None,
                    property: None,
                    message: err.to_string(),
                });
                return fragment;
            }
        };

        let mut counted: Vec<(String, u64)> = Vec::new();
        for row in &classes.rows {
            let concept = row.get("Concept").and_then(Term::as_iri);
            match (concept, parse_count(row.get("cCount"))) {
                (Some(c), Some(n)) => counted.push((c.to_string(), n)),
                _ => fragment.issues.push(Issue {
                    template: TemplateId::Sq2,
                    class: row.get("Concept").map(|t| t.lexical().to_string()),
                    property: None,
                    message: "class row without IRI or numeric count skipped".into(),
                }),
            }
        }
        counted.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        for (rank, (class, count)) in counted.into_iter().enumerate() {
            if rank >= self.options.class_cap {
                fragment.classes.push(ClassProfile {
                    uri: class,
                    count,
                    sample_instances: Vec::new(),
                    summary: ValueSummary::default(),
                    mismatch_suspect: true,
                    error: None,
                });
                continue;
            }
            self.class(&mut fragment, graph, class, count);
        }
        fragment.classes.sort_by(|a, b| a.uri.cmp(&b.uri));
        fragment.property_realizations.sort_by(|a, b| {
            (&a.domain, &a.property, &a.range).cmp(&(&b.domain, &b.property, &b.range))
        });
        fragment
    }

    fn class(&self, fragment: &mut SchemaFragment, graph: &str, class: String, count: u64) {
        let params = TemplateParams::graph(graph).concept(&class);
        let mut errors = Vec::new();
        let sample = match self.run(TemplateId::Sq4, &params) {
            Ok(r) => sorted_column(&r, "x"),
            Err(err) => {
                errors.push(format!("SQ4: {err}"));
                fragment.issues.push(Issue {
                    template: TemplateId::Sq4,
                    class: Some(class.clone()),
                    property: None,
                    message: err.to_string(),
                });
                Vec::new()
            }
        };

        match self.run(TemplateId::Sq3, &params) {
            Ok(rows) => self.realizations(fragment, graph, &class, &rows),
            Err(err) => {
                errors.push(format!("SQ3: {err}"));
                fragment.issues.push(Issue {
                    template: TemplateId::Sq3,
                    class: Some(class.clone()),
                    property: None,
                    message: err.to_string(),
                });
            }
        }

        fragment.classes.push(ClassProfile {
            summary: self.summarize(&sample),
            uri: class,
            count,
            sample_instances: sample,
            mismatch_suspect: false,
            error: (!errors.is_empty()).then(|| errors.join("; ")),
        });
    }

    fn realizations(
        &self,
        fragment: &mut SchemaFragment,
        graph: &str,
        class: &str,
        rows: &QueryResult,
    ) {
        let mut by_property: BTreeMap<String, Vec<(Range, u64)>> = BTreeMap::new();
        for row in &rows.rows {
            let Some(p) = row.get("p").and_then(Term::as_iri) else {
                continue;
            };
            if p == RDF_TYPE {
                continue;
            }
            let Some(count) = parse_count(row.get("count")) else {
                fragment.issues.push(Issue {
                    template: TemplateId::Sq3,
                    class: Some(class.to_string()),
                    property: Some(p.to_string()),
                    message: "realization row without numeric count skipped".into(),
                });
                continue;
            };
            let range = match (row.get("c"), row.get("valType").and_then(Term::as_iri)) {
                (Some(c), _) => match c.as_iri() {
                    Some(c) => Range::Class(c.to_string()),
                    None => Range::Anonymous,
                },
                (None, Some(dt)) => Range::Datatype(dt.to_string()),
                (None, None) => Range::Anonymous,
            };
            by_property
                .entry(p.to_string())
                .or_default()
                .push((range, count));
        }

        for (property, ranges) in by_property {
            // One SQ5 sample per (class, property), shared by its realizations.
            let params = TemplateParams::graph(graph)
                .concept(class)
                .property(&property);
            let (sample, error) = match self.run(TemplateId::Sq5, &params) {
                Ok(r) => (sorted_column(&r, "x"), None),
                Err(err) => {
                    fragment.issues.push(Issue {
                        template: TemplateId::Sq5,
                        class: Some(class.to_string()),
                        property: Some(property.clone()),
                        message: err.to_string(),
                    });
                    (Vec::new(), Some(format!("SQ5: {err}")))
                }
            };
            let summary = self.summarize(&sample);
            let mut merged: BTreeMap<Range, u64> = BTreeMap::new();
            for (range, count) in ranges {
                *merged.entry(range).or_default() += count;
            }
            for (range, count) in merged {
                fragment.property_realizations.push(Realization {
                    domain: class.to_string(),
                    property: property.clone(),
                    kind: range.property_kind(),
                    range,
                    count,
                    sample_assertion_values: sample.clone(),
                    summary: summary.clone(),
                    error: error.clone(),
                });
            }
        }
    }
}

/// Extracts a fragment for every named graph of `endpoint`. Capabilities
/// are probed first unless the descriptor already carries a profile.
pub fn extract_endpoint(
    client: &SparqlClient,
    endpoint: &EndpointDescriptor,
    options: &ExtractOptions,
) -> Result<BTreeMap<String, SchemaFragment>, ExtractError> {
    let unusable = |reason: String| ExtractError::EndpointUnusable {
        endpoint: endpoint.id.clone(),
        reason,
    };
    let mut endpoint = endpoint.clone();
    if endpoint.capability.is_none() {
        let profile = client
            .detect_capabilities(&endpoint)
            .map_err(|e| unusable(e.to_string()))?;
        log::info!("{}: capabilities {profile:?}", endpoint.id);
        endpoint.capability = Some(profile);
    }
    let extractor = Extractor {
        client,
        endpoint: &endpoint,
        options,
    };
    let graphs = extractor
        .run(TemplateId::Sq1, &TemplateParams::default())
        .map_err(|e| unusable(e.to_string()))?;
    let mut graph_iris: Vec<String> = graphs
        .column("g")
        .filter_map(Term::as_iri)
        .map(str::to_string)
        .collect();
    graph_iris.sort();
    graph_iris.dedup();

    let mut out = BTreeMap::new();
    for graph in graph_iris {
        log::info!("{}: extracting {graph}", endpoint.id);
        let fragment = extractor.graph(&graph);
        out.insert(graph, fragment);
    }
    Ok(out)
}

pub type EndpointOutcome = Result<BTreeMap<String, SchemaFragment>, ExtractError>;

/// Extracts several endpoints with at most `workers` in flight. Each
/// endpoint is handled start to finish by one worker; outcomes are keyed by
/// endpoint id.
pub fn extract_all(
    client: &SparqlClient,
    endpoints: &[EndpointDescriptor],
    options: &ExtractOptions,
    workers: usize,
) -> BTreeMap<String, EndpointOutcome> {
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, endpoints.len().max(1)) {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(endpoint) = endpoints.get(i) else {
                    break;
                };
                let outcome = extract_endpoint(client, endpoint, options);
                if tx.send((endpoint.id.clone(), outcome)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        rx.into_iter().collect()
    })
}
