//! Serialization of the schema graph: versioned JSON, TSV tables, GraphML.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EdgeRole, LslodSchemaGraph, NodeKind, SchemaEdge, SchemaNode, SourceEntry};
use crate::graphml::{AttrType, GraphMl};
use crate::tsv;

pub const FORMAT_NAME: &str = "lodprof-schema-graph";
pub const FORMAT_VERSION: u32 = 1;

/// On-disk form of [`LslodSchemaGraph`]. Maps become sorted lists so the
/// output is stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub format: String,
    pub version: u32,
    pub sources: BTreeMap<String, SourceEntry>,
    pub nodes: Vec<SchemaNode>,
    pub edges: Vec<SchemaEdge>,
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("invalid schema graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema graph format {format:?} version {version}")]
    Unsupported { format: String, version: u32 },
}

impl LslodSchemaGraph {
    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            sources: self.sources.clone(),
            nodes: self.nodes.values().cloned().collect(),
            edges: self.edges.values().cloned().collect(),
        }
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self, DocumentError> {
        if doc.format != FORMAT_NAME || doc.version != FORMAT_VERSION {
            return Err(DocumentError::Unsupported {
                format: doc.format,
                version: doc.version,
            });
        }
        Ok(LslodSchemaGraph {
            nodes: doc.nodes.into_iter().map(|n| (n.key(), n)).collect(),
            edges: doc.edges.into_iter().map(|e| (e.key(), e)).collect(),
            sources: doc.sources,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Self::from_document(serde_json::from_str(text)?)
    }

    /// `classes.tsv`: one row per (class, source, graph).
    pub fn classes_tsv(&self) -> String {
        let mut rows = Vec::new();
        for node in self.nodes.values().filter(|n| n.kind == NodeKind::Class) {
            for (source, graphs) in &node.observations {
                for (graph, obs) in graphs {
                    let s = obs.summary.as_ref();
                    rows.push(vec![
                        node.uri.clone(),
                        source.clone(),
                        graph.clone(),
                        obs.count.map(|c| c.to_string()).unwrap_or_default(),
                        s.map(|s| s.sample_size.to_string()).unwrap_or_default(),
                        s.and_then(|s| {
                            s.namespaces
                                .iter()
                                .max_by_key(|(_, n)| **n)
                                .map(|(ns, _)| ns.clone())
                        })
                        .unwrap_or_default(),
                        obs.mismatch_suspect.to_string(),
                    ]);
                }
            }
        }
        tsv::render(
            &[
                "uri",
                "source",
                "graph",
                "instance_count",
                "sample_size",
                "top_namespace",
                "mismatch_suspect",
            ],
            rows,
        )
    }

    fn property_tsv(&self, kind: NodeKind) -> String {
        let rows = self
            .edges
            .values()
            .filter(|e| e.role == EdgeRole::Domain && e.to.kind == kind)
            .map(|e| {
                vec![
                    e.realization.property.clone(),
                    e.source.clone(),
                    e.graph.clone(),
                    e.realization.domain.clone(),
                    match &e.realization.range {
                        crate::extract::Range::Anonymous => "anonymous".to_string(),
                        r => r.uri().unwrap_or_default().to_string(),
                    },
                    e.count.to_string(),
                    e.summary.sample_size.to_string(),
                    e.summary.inferred_datatype.clone().unwrap_or_default(),
                    e.summary.is_categorical.to_string(),
                    e.summary
                        .median_length
                        .map(|m| m.to_string())
                        .unwrap_or_default(),
                ]
            });
        tsv::render(
            &[
                "uri",
                "source",
                "graph",
                "domain",
                "range",
                "assertion_count",
                "sample_size",
                "inferred_datatype",
                "is_categorical",
                "median_length",
            ],
            rows,
        )
    }

    pub fn object_properties_tsv(&self) -> String {
        self.property_tsv(NodeKind::ObjectProperty)
    }

    pub fn data_properties_tsv(&self) -> String {
        self.property_tsv(NodeKind::DataProperty)
    }

    pub fn datatypes_tsv(&self) -> String {
        let rows = self
            .nodes
            .values()
            .filter(|n| n.kind == NodeKind::Datatype)
            .map(|n| {
                vec![
                    n.uri.clone(),
                    n.nonstandard.to_string(),
                    n.sources().collect::<Vec<_>>().join(","),
                    n.total_count().to_string(),
                ]
            });
        tsv::render(&["uri", "nonstandard", "sources", "assertion_count"], rows)
    }

    pub fn to_graphml(&self) -> String {
        let mut g = GraphMl::new(true)
            .node_attr("uri", AttrType::String)
            .node_attr("kind", AttrType::String)
            .node_attr("sources", AttrType::String)
            .node_attr("count", AttrType::Int)
            .node_attr("nonstandard", AttrType::Boolean)
            .edge_attr("role", AttrType::String)
            .edge_attr("source", AttrType::String)
            .edge_attr("graph", AttrType::String)
            .edge_attr("count", AttrType::Int);
        let id = |uri: &str, kind: NodeKind| format!("{}|{uri}", kind.name());
        for n in self.nodes.values() {
            g.add_node(
                &id(&n.uri, n.kind),
                [
                    ("uri", n.uri.clone()),
                    ("kind", n.kind.name().to_string()),
                    ("sources", n.sources().collect::<Vec<_>>().join(",")),
                    ("count", n.total_count().to_string()),
                    ("nonstandard", n.nonstandard.to_string()),
                ],
            );
        }
        for e in self.edges.values() {
            g.add_edge(
                &id(&e.from.uri, e.from.kind),
                &id(&e.to.uri, e.to.kind),
                [
                    (
                        "role",
                        if e.role == EdgeRole::Domain {
                            "domain"
                        } else {
                            "range"
                        }
                        .to_string(),
                    ),
                    ("source", e.source.clone()),
                    ("graph", e.graph.clone()),
                    ("count", e.count.to_string()),
                ],
            );
        }
        g.render()
    }
}
