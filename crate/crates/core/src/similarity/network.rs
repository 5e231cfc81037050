use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embeddings::{cosine, EmbeddingTable};
use crate::graphml::{AttrType, GraphMl};
use crate::uri::{LabelMethod, LabeledUri};

pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SimilarityNode {
    pub source: String,
    pub uri: String,
    pub label: String,
    pub method: LabelMethod,
}

impl SimilarityNode {
    pub fn id(&self) -> String {
        format!("{}|{}", self.source, self.uri)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityEdge {
    pub a: usize,
    pub b: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityNetwork {
    /// Sorted by (source, uri), one per pair.
    pub nodes: Vec<SimilarityNode>,
    /// `a < b`, sorted.
    pub edges: Vec<SimilarityEdge>,
    pub threshold: f64,
}

impl SimilarityNetwork {
    /// Undirected weighted edge list for community detection.
    pub fn weighted_edges(&self) -> Vec<(usize, usize, f64)> {
        self.edges.iter().map(|e| (e.a, e.b, e.score)).collect()
    }

    pub fn to_graphml(&self, communities: Option<&[usize]>) -> String {
        let mut g = GraphMl::new(false)
            .node_attr("source", AttrType::String)
            .node_attr("uri", AttrType::String)
            .node_attr("label", AttrType::String)
            .node_attr("community", AttrType::Int)
            .edge_attr("weight", AttrType::Double);
        for (i, n) in self.nodes.iter().enumerate() {
            let mut attrs = vec![
                ("source", n.source.clone()),
                ("uri", n.uri.clone()),
                ("label", n.label.clone()),
            ];
            if let Some(c) = communities {
                attrs.push(("community", c[i].to_string()));
            }
            g.add_node(&n.id(), attrs);
        }
        for e in &self.edges {
            g.add_edge(
                &self.nodes[e.a].id(),
                &self.nodes[e.b].id(),
                [("weight", format!("{:.6}", e.score))],
            );
        }
        g.render()
    }
}

/// Labeled URIs without a source go under the empty source id. Nodes whose
/// label has no tokens, or embeds to a zero vector, stay isolated.
pub fn build_similarity_network(
    labeled: &[LabeledUri],
    table: &EmbeddingTable,
    threshold: f64,
) -> SimilarityNetwork {
    let nodes: BTreeSet<SimilarityNode> = labeled
        .iter()
        .map(|l| SimilarityNode {
            source: l.source_id.clone().unwrap_or_default(),
            uri: l.uri.clone(),
            label: l.label.clone(),
            method: l.method,
        })
        .collect();
    // a (source, uri) pair labeled twice keeps its smallest label
    let mut nodes: Vec<SimilarityNode> = nodes.into_iter().collect();
    nodes.dedup_by(|b, a| a.source == b.source && a.uri == b.uri);

    let vectors: Vec<Option<Vec<f64>>> = nodes
        .par_iter()
        .map(|n| match table.embed_label(&n.label) {
            Ok(v) => Some(v),
            Err(e) => {
                log::debug!("{}: {e}", n.id());
                None
            }
        })
        .collect();

    let mut by_source: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        by_source.entry(n.source.as_str()).or_default().push(i);
    }
    let groups: Vec<&Vec<usize>> = by_source.values().collect();
    let mut pairs = Vec::new();
    for x in 0..groups.len() {
        for y in x + 1..groups.len() {
            pairs.push((groups[x], groups[y]));
        }
    }

    let matched: Vec<Vec<SimilarityEdge>> = pairs
        .par_iter()
        .map(|(left, right)| {
            let mut candidates = Vec::new();
            for &i in left.iter() {
                let Some(vi) = &vectors[i] else { continue };
                for &j in right.iter() {
                    let Some(vj) = &vectors[j] else { continue };
                    if let Ok(score) = cosine(vi, vj) {
                        if score >= threshold {
                            candidates.push((score, i, j));
                        }
                    }
                }
            }
            candidates.sort_by(|p, q| {
                q.0.total_cmp(&p.0)
                    .then_with(|| nodes[p.1].uri.cmp(&nodes[q.1].uri))
                    .then_with(|| nodes[p.2].uri.cmp(&nodes[q.2].uri))
            });
            let mut used = BTreeSet::new();
            let mut edges = Vec::new();
            for (score, i, j) in candidates {
                if used.contains(&i) || used.contains(&j) {
                    continue;
                }
                used.insert(i);
                used.insert(j);
                edges.push(SimilarityEdge {
                    a: i.min(j),
                    b: i.max(j),
                    score,
                });
            }
            edges
        })
        .collect();

    let mut edges: Vec<SimilarityEdge> = matched.into_iter().flatten().collect();
    edges.sort_by_key(|e| (e.a, e.b));
    SimilarityNetwork {
        nodes,
        edges,
        threshold,
    }
}
