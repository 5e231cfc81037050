use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::schema::{LslodSchemaGraph, NodeKind};
use crate::tsv;
use crate::uri::{instance_pattern_links, OriginCatalog, VariantGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReuseNodeKind {
    SchemaElement,
    InstancePattern,
}

/// A schema-element URI (or instance URI pattern) as used by one source.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReuseNode {
    pub source: String,
    pub uri: String,
    pub kind: ReuseNodeKind,
}

impl ReuseNode {
    pub fn element(source: impl Into<String>, uri: impl Into<String>) -> Self {
        ReuseNode {
            source: source.into(),
            uri: uri.into(),
            kind: ReuseNodeKind::SchemaElement,
        }
    }

    pub fn label(&self) -> String {
        format!("{}|{}", self.source, self.uri)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReuseEdgeKind {
    /// The same URI in two sources.
    Reuse,
    /// Two variants of one catalog term in two sources.
    Mapping,
    /// An instance pattern pointing into an ontology's class namespace.
    Pattern,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReuseNetwork {
    /// Sorted, distinct.
    pub nodes: Vec<ReuseNode>,
    /// `(a, b, kind)` with `a < b`, indices into `nodes`.
    pub edges: BTreeSet<(usize, usize, ReuseEdgeKind)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReuseError {
    #[error("reuse network has no nodes")]
    DegenerateNetwork,
}

impl ReuseNetwork {
    /// Builds a network from arbitrary nodes and index pairs. Self-edges and
    /// duplicates are dropped.
    pub fn from_parts(
        nodes: Vec<ReuseNode>,
        edges: impl IntoIterator<Item = (usize, usize, ReuseEdgeKind)>,
    ) -> Self {
        let mut sorted: Vec<(ReuseNode, usize)> =
            nodes.into_iter().enumerate().map(|(i, n)| (n, i)).collect();
        sorted.sort();
        let mut remap = BTreeMap::new();
        let mut out_nodes: Vec<ReuseNode> = Vec::with_capacity(sorted.len());
        for (node, old) in sorted {
            if out_nodes.last() != Some(&node) {
                out_nodes.push(node);
            }
            remap.insert(old, out_nodes.len() - 1);
        }
        let mut net = ReuseNetwork {
            nodes: out_nodes,
            edges: BTreeSet::new(),
        };
        for (a, b, kind) in edges {
            if let (Some(&a), Some(&b)) = (remap.get(&a), remap.get(&b)) {
                net.insert_edge(a, b, kind);
            }
        }
        net
    }

    fn insert_edge(&mut self, a: usize, b: usize, kind: ReuseEdgeKind) {
        if a != b {
            self.edges.insert((a.min(b), a.max(b), kind));
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Connected components as sorted index lists, ordered by first member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::<usize>::new(self.nodes.len());
        for &(a, b, _) in &self.edges {
            uf.union(a, b);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, root) in uf.into_labeling().into_iter().enumerate() {
            groups.entry(root).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn summary(&self) -> Result<ReuseSummary, ReuseError> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(ReuseError::DegenerateNetwork);
        }
        let components = self.components();
        let multi: Vec<usize> = components
            .iter()
            .map(Vec::len)
            .filter(|&s| s >= 2)
            .collect();
        let members: usize = multi.iter().sum();
        Ok(ReuseSummary {
            nodes: n,
            edges: self.edges.len(),
            components: components.len(),
            multi_components: multi.len(),
            nodes_in_multi: members,
            statistic: (members - multi.len()) as f64 / n as f64,
        })
    }

    /// Members of each component, one row per component.
    pub fn components_tsv(&self) -> String {
        let rows = self.components().into_iter().enumerate().map(|(i, c)| {
            vec![
                i.to_string(),
                c.len().to_string(),
                c.iter()
                    .map(|&m| self.nodes[m].label())
                    .collect::<Vec<_>>()
                    .join(" "),
            ]
        });
        tsv::render(&["component", "size", "members"], rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReuseSummary {
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub multi_components: usize,
    pub nodes_in_multi: usize,
    pub statistic: f64,
}

impl ReuseSummary {
    pub fn to_tsv(&self) -> String {
        tsv::render(
            &[
                "nodes",
                "edges",
                "components",
                "multi_components",
                "nodes_in_multi",
                "reuse_statistic",
            ],
            [vec![
                self.nodes.to_string(),
                self.edges.to_string(),
                self.components.to_string(),
                self.multi_components.to_string(),
                self.nodes_in_multi.to_string(),
                format!("{:.6}", self.statistic),
            ]],
        )
    }
}

/// Share of nodes absorbed by multi-node components: with `M` the
/// components of two or more nodes, `(sum of their sizes - |M|) / N`.
pub fn reuse_statistic(network: &ReuseNetwork) -> Result<f64, ReuseError> {
    network.summary().map(|s| s.statistic)
}

/// Schema-element URIs of a source: classes and properties it uses.
pub fn schema_elements(graph: &LslodSchemaGraph) -> BTreeMap<&str, BTreeSet<&str>> {
    let mut out: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for node in graph
        .nodes
        .values()
        .filter(|n| n.kind != NodeKind::Datatype)
    {
        for source in node.sources() {
            out.entry(source).or_default().insert(node.uri.as_str());
        }
    }
    out
}

/// Nodes are (source, URI) occurrences of classes and properties plus one
/// node per (source, instance pattern) that falls in an ontology namespace.
/// Identical URIs in different sources are joined by reuse edges, members of
/// one variant group in different sources by mapping edges, and instance
/// patterns to the class occurrences they match.
pub fn build_reuse_network(
    graph: &LslodSchemaGraph,
    catalog: &OriginCatalog,
    variant_groups: &[VariantGroup],
) -> ReuseNetwork {
    let mut nodes: Vec<ReuseNode> = Vec::new();
    for (source, uris) in schema_elements(graph) {
        nodes.extend(uris.into_iter().map(|u| ReuseNode::element(source, u)));
    }
    let links = instance_pattern_links(graph, catalog);
    for link in &links {
        nodes.push(ReuseNode {
            source: link.source.clone(),
            uri: link.pattern.clone(),
            kind: ReuseNodeKind::InstancePattern,
        });
    }
    let mut net = ReuseNetwork::from_parts(nodes, []);

    let mut by_uri: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, n) in net.nodes.iter().enumerate() {
        if n.kind == ReuseNodeKind::SchemaElement {
            by_uri.entry(n.uri.as_str()).or_default().push(i);
        }
    }
    let mut edges = Vec::new();
    for occurrences in by_uri.values() {
        for (x, &a) in occurrences.iter().enumerate() {
            for &b in &occurrences[x + 1..] {
                edges.push((a, b, ReuseEdgeKind::Reuse));
            }
        }
    }
    for group in variant_groups {
        let members: Vec<usize> = group
            .members
            .iter()
            .filter_map(|m| by_uri.get(m.uri.as_str()))
            .flatten()
            .copied()
            .collect();
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                if net.nodes[a].source != net.nodes[b].source {
                    edges.push((a, b, ReuseEdgeKind::Mapping));
                }
            }
        }
    }
    for link in &links {
        let Ok(re) = Regex::new(&format!("(?i)^{}$", link.pattern)) else {
            continue;
        };
        let probe = ReuseNode {
            source: link.source.clone(),
            uri: link.pattern.clone(),
            kind: ReuseNodeKind::InstancePattern,
        };
        let Ok(p) = net.nodes.binary_search(&probe) else {
            continue;
        };
        for (uri, occurrences) in &by_uri {
            if re.is_match(uri) && graph.node(uri, NodeKind::Class).is_some() {
                edges.extend(occurrences.iter().map(|&c| (p, c, ReuseEdgeKind::Pattern)));
            }
        }
    }
    for (a, b, kind) in edges {
        net.insert_edge(a, b, kind);
    }
    net
}
