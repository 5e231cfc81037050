use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::stats::NamespaceOwners;
use crate::extract::Range;
use crate::graphml::{AttrType, GraphMl};
use crate::schema::{EdgeRole, LslodSchemaGraph, NodeKind};
use crate::tsv;
use crate::uri::OriginCatalog;

/// Sources linked by object properties.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LinkNetwork {
    /// source → object properties linking its own classes
    pub intra: BTreeMap<String, BTreeSet<String>>,
    /// (a, b) with a < b → object properties linking the two
    pub inter: BTreeMap<(String, String), BTreeSet<String>>,
}

impl LinkNetwork {
    pub fn intra_link_count(&self, source: &str) -> usize {
        self.intra.get(source).map_or(0, BTreeSet::len)
    }

    pub fn inter_link_count(&self, a: &str, b: &str) -> usize {
        let key = if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        self.inter.get(&key).map_or(0, BTreeSet::len)
    }

    /// Node `size` is the intra count, edge `weight` the inter count.
    pub fn to_graphml(&self) -> String {
        let mut g = GraphMl::new(false)
            .node_attr("size", AttrType::Int)
            .edge_attr("weight", AttrType::Int)
            .edge_attr("properties", AttrType::String);
        for (source, props) in &self.intra {
            g.add_node(source, [("size", props.len().to_string())]);
        }
        for ((a, b), props) in &self.inter {
            g.add_edge(
                a,
                b,
                [
                    ("weight", props.len().to_string()),
                    (
                        "properties",
                        props.iter().cloned().collect::<Vec<_>>().join(" "),
                    ),
                ],
            );
        }
        g.render()
    }

    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<Vec<String>> = self
            .intra
            .iter()
            .map(|(s, p)| vec![s.clone(), s.clone(), p.len().to_string()])
            .collect();
        rows.extend(
            self.inter
                .iter()
                .map(|((a, b), p)| vec![a.clone(), b.clone(), p.len().to_string()]),
        );
        tsv::render(&["source_a", "source_b", "object_properties"], rows)
    }
}

/// For each object realization, the sources its objects belong to are the
/// owners of the sampled object namespaces; without IRI samples, the sources
/// typing the range class (the realization's own source first).
pub fn build_link_network(graph: &LslodSchemaGraph, catalog: &OriginCatalog) -> LinkNetwork {
    let owners = NamespaceOwners::new(graph, catalog);
    let mut net = LinkNetwork {
        intra: graph
            .sources
            .keys()
            .map(|s| (s.clone(), BTreeSet::new()))
            .collect(),
        inter: BTreeMap::new(),
    };
    for e in graph.edges.values() {
        if e.role != EdgeRole::Domain || e.to.kind != NodeKind::ObjectProperty {
            continue;
        }
        let source = e.source.as_str();
        let mut targets: BTreeSet<&str> = e
            .summary
            .namespaces
            .keys()
            .filter_map(|ns| owners.owner(ns))
            .collect();
        if e.summary.namespaces.is_empty() {
            if let Range::Class(c) = &e.realization.range {
                if let Some(node) = graph.node(c, NodeKind::Class) {
                    if node.count_in(source) > 0 {
                        targets.insert(source);
                    } else {
                        targets.extend(node.sources().filter(|s| node.count_in(s) > 0));
                    }
                }
            }
        }
        let property = &e.realization.property;
        for t in targets {
            if t == source {
                net.intra
                    .entry(t.to_string())
                    .or_default()
                    .insert(property.clone());
            } else {
                let key = if source < t {
                    (source.to_string(), t.to_string())
                } else {
                    (t.to_string(), source.to_string())
                };
                net.inter.entry(key).or_default().insert(property.clone());
            }
        }
    }
    net
}
