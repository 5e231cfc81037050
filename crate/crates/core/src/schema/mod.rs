//! Merged schema graph over all extracted fragments.
//!
//! Nodes are keyed by (URI, kind); the same URI may appear with several
//! kinds when sources disagree. Every observation is keyed by (source,
//! graph), which makes merging a keyed union: commutative, associative and
//! idempotent.

mod export;
mod rules;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use export::{DocumentError, GraphDocument, FORMAT_NAME, FORMAT_VERSION};
pub use rules::{normalize_graph_uri, GraphRule, GraphRules, RulesError};

use crate::extract::{PropertyKind, Range, SchemaFragment, ValueSummary};
use crate::term::is_standard_datatype;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Class,
    ObjectProperty,
    DataProperty,
    Datatype,
}

impl NodeKind {
    pub const ALL: [NodeKind; 4] = [
        NodeKind::Class,
        NodeKind::ObjectProperty,
        NodeKind::DataProperty,
        NodeKind::Datatype,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Class => "class",
            NodeKind::ObjectProperty => "object_property",
            NodeKind::DataProperty => "data_property",
            NodeKind::Datatype => "datatype",
        }
    }

    pub fn of_property(kind: PropertyKind) -> Self {
        match kind {
            PropertyKind::Object => NodeKind::ObjectProperty,
            PropertyKind::Data => NodeKind::DataProperty,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeKey {
    pub uri: String,
    pub kind: NodeKind,
}

impl NodeKey {
    pub fn new(uri: impl Into<String>, kind: NodeKind) -> Self {
        NodeKey {
            uri: uri.into(),
            kind,
        }
    }
}

/// What one graph of one source says about a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Observation {
    /// Instance count for classes, assertion count for properties and
    /// datatypes. `None` for nodes only seen as an edge endpoint.
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<ValueSummary>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub mismatch_suspect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaNode {
    pub uri: String,
    pub kind: NodeKind,
    /// Datatype nodes outside the XSD/RDF/RDFS namespaces.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub nonstandard: bool,
    /// source id → graph URI → observation
    pub observations: BTreeMap<String, BTreeMap<String, Observation>>,
}

impl SchemaNode {
    pub fn key(&self) -> NodeKey {
        NodeKey::new(&self.uri, self.kind)
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.observations.keys().map(String::as_str)
    }

    /// Summed counts in `source`.
    pub fn count_in(&self, source: &str) -> u64 {
        self.observations
            .get(source)
            .map(|g| g.values().filter_map(|o| o.count).sum())
            .unwrap_or(0)
    }

    pub fn total_count(&self) -> u64 {
        self.observations.keys().map(|s| self.count_in(s)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeRole {
    Domain,
    Range,
}

/// The realization an edge belongs to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RealizationKey {
    pub domain: String,
    pub property: String,
    pub range: Range,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    pub role: EdgeRole,
    pub source: String,
    pub graph: String,
    pub realization: RealizationKey,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaEdge {
    pub role: EdgeRole,
    pub from: NodeKey,
    pub to: NodeKey,
    pub source: String,
    pub graph: String,
    pub realization: RealizationKey,
    pub count: u64,
    pub summary: ValueSummary,
}

impl SchemaEdge {
    pub fn key(&self) -> EdgeKey {
        EdgeKey {
            role: self.role,
            source: self.source.clone(),
            graph: self.graph.clone(),
            realization: self.realization.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SourceEntry {
    pub endpoints: BTreeSet<String>,
    pub graphs: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LslodSchemaGraph {
    pub nodes: BTreeMap<NodeKey, SchemaNode>,
    pub edges: BTreeMap<EdgeKey, SchemaEdge>,
    pub sources: BTreeMap<String, SourceEntry>,
}

/// Picks one of two conflicting values deterministically.
fn resolve<T: Serialize + Clone>(a: &T, b: &T) -> T {
    let ja = serde_json::to_string(a).unwrap_or_default();
    let jb = serde_json::to_string(b).unwrap_or_default();
    if ja >= jb {
        a.clone()
    } else {
        b.clone()
    }
}

impl LslodSchemaGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&self, uri: &str, kind: NodeKind) -> Option<&SchemaNode> {
        self.nodes.get(&NodeKey::new(uri, kind))
    }

    /// All nodes with `uri`, whatever their kind.
    pub fn nodes_for_uri<'a>(&'a self, uri: &'a str) -> impl Iterator<Item = &'a SchemaNode> + 'a {
        NodeKind::ALL
            .into_iter()
            .filter_map(move |k| self.node(uri, k))
    }

    fn observe(&mut self, key: NodeKey, source: &str, graph: &str, obs: Observation) {
        let nonstandard = key.kind == NodeKind::Datatype && !is_standard_datatype(&key.uri);
        let node = self.nodes.entry(key.clone()).or_insert_with(|| SchemaNode {
            uri: key.uri.clone(),
            kind: key.kind,
            nonstandard,
            observations: BTreeMap::new(),
        });
        let slot = node
            .observations
            .entry(source.to_string())
            .or_default()
            .entry(graph.to_string());
        match slot {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(obs);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let current = o.get();
                if *current != obs {
                    // A placeholder from an edge endpoint never beats a real count.
                    let merged = match (current.count, obs.count) {
                        (Some(_), None) => current.clone(),
                        (None, Some(_)) => obs,
                        _ => resolve(current, &obs),
                    };
                    o.insert(merged);
                }
            }
        }
    }

    fn add_edge(&mut self, edge: SchemaEdge) {
        let key = edge.key();
        match self.edges.get(&key) {
            Some(existing) if *existing != edge => {
                let merged = resolve(existing, &edge);
                self.edges.insert(key, merged);
            }
            Some(_) => {}
            None => {
                self.edges.insert(key, edge);
            }
        }
    }

    /// Adds one fragment under `source`.
    pub fn add_fragment(&mut self, source: &str, fragment: &SchemaFragment) {
        let graph = fragment.graph_uri.as_str();
        let entry = self.sources.entry(source.to_string()).or_default();
        entry.endpoints.insert(fragment.endpoint.clone());
        entry.graphs.insert(graph.to_string());

        for class in &fragment.classes {
            self.observe(
                NodeKey::new(&class.uri, NodeKind::Class),
                source,
                graph,
                Observation {
                    count: Some(class.count),
                    summary: Some(class.summary.clone()),
                    mismatch_suspect: class.mismatch_suspect,
                },
            );
        }

        // Property and datatype observations aggregate over realizations.
        let mut property_counts: BTreeMap<NodeKey, u64> = BTreeMap::new();
        let mut datatype_counts: BTreeMap<String, u64> = BTreeMap::new();
        for r in &fragment.property_realizations {
            let pkey = NodeKey::new(&r.property, NodeKind::of_property(r.kind));
            *property_counts.entry(pkey.clone()).or_default() += r.count;
            let realization = RealizationKey {
                domain: r.domain.clone(),
                property: r.property.clone(),
                range: r.range.clone(),
            };
            let domain_key = NodeKey::new(&r.domain, NodeKind::Class);
            if fragment.class(&r.domain).is_none() {
                self.observe(domain_key.clone(), source, graph, Observation::default());
            }
            self.add_edge(SchemaEdge {
                role: EdgeRole::Domain,
                from: domain_key,
                to: pkey.clone(),
                source: source.to_string(),
                graph: graph.to_string(),
                realization: realization.clone(),
                count: r.count,
                summary: r.summary.clone(),
            });
            let range_key = match &r.range {
                Range::Class(c) => {
                    let k = NodeKey::new(c, NodeKind::Class);
                    if fragment.class(c).is_none() {
                        self.observe(k.clone(), source, graph, Observation::default());
                    }
                    k
                }
                Range::Datatype(dt) => {
                    *datatype_counts.entry(dt.clone()).or_default() += r.count;
                    NodeKey::new(dt, NodeKind::Datatype)
                }
                Range::Anonymous => continue,
            };
            self.add_edge(SchemaEdge {
                role: EdgeRole::Range,
                from: pkey,
                to: range_key,
                source: source.to_string(),
                graph: graph.to_string(),
                realization,
                count: r.count,
                summary: r.summary.clone(),
            });
        }
        for (key, count) in property_counts {
            self.observe(
                key,
                source,
                graph,
                Observation {
                    count: Some(count),
                    summary: None,
                    mismatch_suspect: false,
                },
            );
        }
        for (dt, count) in datatype_counts {
            self.observe(
                NodeKey::new(dt, NodeKind::Datatype),
                source,
                graph,
                Observation {
                    count: Some(count),
                    summary: None,
                    mismatch_suspect: false,
                },
            );
        }
    }

    /// Union of two graphs.
    pub fn absorb(&mut self, other: &LslodSchemaGraph) {
        for (name, entry) in &other.sources {
            let mine = self.sources.entry(name.clone()).or_default();
            mine.endpoints.extend(entry.endpoints.iter().cloned());
            mine.graphs.extend(entry.graphs.iter().cloned());
        }
        for node in other.nodes.values() {
            for (source, graphs) in &node.observations {
                for (graph, obs) in graphs {
                    self.observe(node.key(), source, graph, obs.clone());
                }
            }
        }
        for edge in other.edges.values() {
            self.add_edge(edge.clone());
        }
    }

    /// Distinct URIs of `kind`, optionally restricted to one source.
    pub fn uris_of_kind(&self, kind: NodeKind, source: Option<&str>) -> BTreeSet<&str> {
        self.nodes
            .values()
            .filter(|n| n.kind == kind)
            .filter(|n| source.is_none_or(|s| n.observations.contains_key(s)))
            .map(|n| n.uri.as_str())
            .collect()
    }

    pub fn stats(&self) -> GraphStats {
        let counts = |source: Option<&str>| KindCounts {
            classes: self.uris_of_kind(NodeKind::Class, source).len(),
            object_properties: self.uris_of_kind(NodeKind::ObjectProperty, source).len(),
            data_properties: self.uris_of_kind(NodeKind::DataProperty, source).len(),
            datatypes: self.uris_of_kind(NodeKind::Datatype, source).len(),
        };
        let per_source = self
            .sources
            .keys()
            .map(|s| (s.clone(), counts(Some(s))))
            .collect();
        let mut kinds_by_uri: BTreeMap<&str, BTreeSet<NodeKind>> = BTreeMap::new();
        for key in self.nodes.keys() {
            kinds_by_uri.entry(&key.uri).or_default().insert(key.kind);
        }
        let overlap = kinds_by_uri
            .into_iter()
            .filter(|(_, kinds)| kinds.len() > 1)
            .map(|(uri, kinds)| (uri.to_string(), kinds.into_iter().collect()))
            .collect();
        GraphStats {
            per_source,
            total: counts(None),
            overlap,
        }
    }
}

/// Merges fragments, each tagged with its source id.
pub fn merge<'a>(
    fragments: impl IntoIterator<Item = (&'a str, &'a SchemaFragment)>,
) -> LslodSchemaGraph {
    let mut g = LslodSchemaGraph::new();
    for (source, fragment) in fragments {
        g.add_fragment(source, fragment);
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KindCounts {
    pub classes: usize,
    pub object_properties: usize,
    pub data_properties: usize,
    pub datatypes: usize,
}

impl KindCounts {
    pub fn get(&self, kind: NodeKind) -> usize {
        match kind {
            NodeKind::Class => self.classes,
            NodeKind::ObjectProperty => self.object_properties,
            NodeKind::DataProperty => self.data_properties,
            NodeKind::Datatype => self.datatypes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphStats {
    pub per_source: BTreeMap<String, KindCounts>,
    pub total: KindCounts,
    /// URIs observed with more than one kind.
    pub overlap: BTreeMap<String, Vec<NodeKind>>,
}

impl GraphStats {
    /// One row per source, a `total` row, then one `overlap` row per URI
    /// observed with several kinds.
    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<Vec<String>> = Vec::new();
        let counts_row = |scope: &str, c: &KindCounts| {
            vec![
                scope.to_string(),
                c.classes.to_string(),
                c.object_properties.to_string(),
                c.data_properties.to_string(),
                c.datatypes.to_string(),
                String::new(),
            ]
        };
        for (s, c) in &self.per_source {
            rows.push(counts_row(s, c));
        }
        rows.push(counts_row("total", &self.total));
        for (uri, kinds) in &self.overlap {
            let mut row = vec!["overlap".to_string()];
            for k in NodeKind::ALL {
                row.push(if kinds.contains(&k) { "1" } else { "0" }.to_string());
            }
            row.push(uri.clone());
            rows.push(row);
        }
        crate::tsv::render(
            &[
                "scope",
                "classes",
                "object_properties",
                "data_properties",
                "datatypes",
                "uri",
            ],
            rows,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{ClassProfile, Realization};

    fn class(uri: &str, count: u64) -> ClassProfile {
        ClassProfile {
            uri: uri.into(),
            count,
            sample_instances: vec![],
            summary: ValueSummary::default(),
            mismatch_suspect: false,
            error: None,
        }
    }

    fn real(domain: &str, property: &str, range: Range, count: u64) -> Realization {
        Realization {
            domain: domain.into(),
            property: property.into(),
            kind: range.property_kind(),
            range,
            count,
            sample_assertion_values: vec![],
            summary: ValueSummary::default(),
            error: None,
        }
    }

    fn fragment(graph: &str) -> SchemaFragment {
        let mut f = SchemaFragment::new("ep", graph);
        f.classes = vec![class("http://x/Drug", 3), class("http://x/Target", 1)];
        f.property_realizations = vec![
            real(
                "http://x/Drug",
                "http://x/target",
                Range::Class("http://x/Target".into()),
                3,
            ),
            real(
                "http://x/Drug",
                "http://x/mw",
                Range::Datatype(crate::term::XSD_FLOAT.into()),
                3,
            ),
            real("http://x/Drug", "http://x/note", Range::Anonymous, 2),
        ];
        f
    }

    #[test]
    fn single_fragment_nodes_and_edges() {
        let f = fragment("http://g/1");
        let g = merge([("s1", &f)]);
        assert_eq!(g.nodes.len(), 2 + 3 + 1);
        // 3 domain edges, 2 range edges (anonymous has none)
        assert_eq!(g.edges.len(), 5);
        for e in g.edges.values() {
            assert!(g.nodes.contains_key(&e.from) && g.nodes.contains_key(&e.to));
        }
        let s = g.stats();
        assert_eq!(
            s.total,
            KindCounts {
                classes: 2,
                object_properties: 2,
                data_properties: 1,
                datatypes: 1
            }
        );
    }

    #[test]
    fn shared_class_unifies() {
        let a = fragment("http://g/1");
        let b = fragment("http://g/2");
        let g = merge([("s1", &a), ("s2", &b)]);
        let drug = g.node("http://x/Drug", NodeKind::Class).unwrap();
        assert_eq!(drug.sources().collect::<Vec<_>>(), vec!["s1", "s2"]);
        assert_eq!(drug.total_count(), 6);
    }

    #[test]
    fn kind_overlap_is_reported() {
        let mut a = SchemaFragment::new("ep", "http://g/1");
        a.classes = vec![class("http://x/C", 1)];
        a.property_realizations = vec![real(
            "http://x/C",
            "http://purl.org/dc/terms/source",
            Range::Anonymous,
            1,
        )];
        let mut b = a.clone();
        b.graph_uri = "http://g/2".into();
        b.property_realizations = vec![real(
            "http://x/C",
            "http://purl.org/dc/terms/source",
            Range::Datatype(crate::term::XSD_STRING.into()),
            1,
        )];
        let g = merge([("s1", &a), ("s2", &b)]);
        let s = g.stats();
        assert_eq!(s.total.object_properties, 1);
        assert_eq!(s.total.data_properties, 1);
        assert_eq!(
            s.overlap["http://purl.org/dc/terms/source"],
            vec![NodeKind::ObjectProperty, NodeKind::DataProperty]
        );
        assert!(s
            .to_tsv()
            .contains("overlap\t0\t1\t1\t0\thttp://purl.org/dc/terms/source"));
    }

    #[test]
    fn empty_graph_stats_are_zero() {
        let s = LslodSchemaGraph::new().stats();
        assert_eq!(s.total, KindCounts::default());
        assert!(s.overlap.is_empty());
    }

    #[test]
    fn nonstandard_datatype_is_flagged() {
        let mut f = SchemaFragment::new("ep", "http://g/1");
        f.classes = vec![class("http://x/C", 1)];
        f.property_realizations = vec![real(
            "http://x/C",
            "http://x/mass",
            Range::Datatype("http://purl.obolibrary.org/obo/UO_0000034".into()),
            1,
        )];
        let g = merge([("s", &f)]);
        assert!(
            g.node(
                "http://purl.obolibrary.org/obo/UO_0000034",
                NodeKind::Datatype
            )
            .unwrap()
            .nonstandard
        );
    }
}
