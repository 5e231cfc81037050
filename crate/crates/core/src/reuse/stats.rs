use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::network::schema_elements;
use crate::schema::{EdgeRole, LslodSchemaGraph, NodeKind};
use crate::tsv;
use crate::uri::{OriginCatalog, OriginKind};

/// Which source a URI namespace belongs to.
#[derive(Debug, Clone, Default)]
pub struct NamespaceOwners {
    catalog: OriginCatalog,
    sources: BTreeSet<String>,
    /// namespace → source typing the most sampled instances in it
    majority: BTreeMap<String, String>,
}

impl NamespaceOwners {
    /// Catalog `ld_source` entries whose id names a source in the graph take
    /// precedence; otherwise the source with the most sampled class instances
    /// in the namespace owns it (ties to the smallest id).
    pub fn new(graph: &LslodSchemaGraph, catalog: &OriginCatalog) -> Self {
        let mut counts: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
        for node in graph.nodes.values().filter(|n| n.kind == NodeKind::Class) {
            for (source, graphs) in &node.observations {
                for obs in graphs.values() {
                    let Some(summary) = &obs.summary else {
                        continue;
                    };
                    for (ns, n) in &summary.namespaces {
                        *counts.entry(ns).or_default().entry(source).or_default() += n;
                    }
                }
            }
        }
        let majority = counts
            .into_iter()
            .filter_map(|(ns, by_source)| {
                // max_by_key keeps the last maximum; iterate in reverse for the smallest id
                let owner = by_source
                    .iter()
                    .rev()
                    .max_by_key(|(_, &n)| n)
                    .map(|(s, _)| s.to_string())?;
                Some((ns.to_string(), owner))
            })
            .collect();
        NamespaceOwners {
            catalog: catalog.clone(),
            sources: graph.sources.keys().cloned().collect(),
            majority,
        }
    }

    pub fn owner(&self, namespace: &str) -> Option<&str> {
        if let Some(origin) = self.catalog.classify_origin(namespace) {
            if origin.kind == OriginKind::LdSource {
                if let Some(s) = self.sources.get(&origin.source_id) {
                    return Some(s);
                }
            }
        }
        self.majority.get(namespace).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceStatistics {
    pub source: String,
    pub schema_elements: usize,
    /// (1) catalog ontologies and vocabularies contributing schema elements
    pub reused_vocabularies: BTreeSet<String>,
    /// (2) schema elements whose catalog origin is another source, ontology
    /// or vocabulary
    pub reused_elements: usize,
    pub reused_pct: f64,
    /// Classes with instances in the source.
    pub classes: usize,
    /// (3) class → share of sampled IRI objects owned by another source
    pub interlinking: BTreeMap<String, f64>,
    pub interlinking_pct: f64,
    /// (4) class → share of sampled IRI objects owned by the source itself
    pub intralinking: BTreeMap<String, f64>,
    pub intralinking_pct: f64,
    /// (5) sampled instance IRIs and those in namespaces not owned by the
    /// source
    pub sampled_entities: usize,
    pub external_entities: usize,
    pub external_entity_pct: f64,
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

pub fn source_statistics(
    graph: &LslodSchemaGraph,
    catalog: &OriginCatalog,
) -> Vec<SourceStatistics> {
    let owners = NamespaceOwners::new(graph, catalog);
    let elements = schema_elements(graph);

    // class → (source) → sampled object namespaces over its object realizations
    let mut objects: BTreeMap<(&str, &str), BTreeMap<&str, usize>> = BTreeMap::new();
    for e in graph.edges.values() {
        if e.role == EdgeRole::Domain && e.to.kind == NodeKind::ObjectProperty {
            let slot = objects
                .entry((e.source.as_str(), e.from.uri.as_str()))
                .or_default();
            for (ns, n) in &e.summary.namespaces {
                *slot.entry(ns).or_default() += n;
            }
        }
    }

    let mut out = Vec::new();
    for source in graph.sources.keys() {
        let uris = elements.get(source.as_str()).cloned().unwrap_or_default();
        let mut vocabularies = BTreeSet::new();
        let mut reused = 0;
        for uri in &uris {
            if let Some(origin) = catalog.classify_origin(uri) {
                if origin.source_id != *source {
                    reused += 1;
                    if origin.kind != OriginKind::LdSource {
                        vocabularies.insert(origin.source_id);
                    }
                }
            }
        }

        let mut classes = 0;
        let mut interlinking = BTreeMap::new();
        let mut intralinking = BTreeMap::new();
        let mut sampled = 0;
        let mut external = 0;
        for node in graph.nodes.values().filter(|n| n.kind == NodeKind::Class) {
            if node.count_in(source) == 0 {
                continue;
            }
            classes += 1;
            for obs in node.observations[source.as_str()].values() {
                let Some(summary) = &obs.summary else {
                    continue;
                };
                for (ns, n) in &summary.namespaces {
                    sampled += n;
                    if owners.owner(ns) != Some(source.as_str()) {
                        external += n;
                    }
                }
            }
            let Some(nss) = objects.get(&(source.as_str(), node.uri.as_str())) else {
                continue;
            };
            let total: usize = nss.values().sum();
            let (mut inter, mut intra) = (0, 0);
            for (ns, n) in nss {
                match owners.owner(ns) {
                    Some(o) if o == source => intra += n,
                    Some(_) => inter += n,
                    None => {}
                }
            }
            if inter > 0 {
                interlinking.insert(node.uri.clone(), inter as f64 / total as f64);
            }
            if intra > 0 {
                intralinking.insert(node.uri.clone(), intra as f64 / total as f64);
            }
        }

        out.push(SourceStatistics {
            source: source.clone(),
            schema_elements: uris.len(),
            reused_pct: pct(reused, uris.len()),
            reused_vocabularies: vocabularies,
            reused_elements: reused,
            classes,
            interlinking_pct: pct(interlinking.len(), classes),
            interlinking,
            intralinking_pct: pct(intralinking.len(), classes),
            intralinking,
            sampled_entities: sampled,
            external_entities: external,
            external_entity_pct: pct(external, sampled),
        });
    }
    out
}

fn distribution(d: &BTreeMap<String, f64>) -> String {
    d.iter()
        .map(|(c, f)| format!("{c}={f:.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn source_statistics_tsv(stats: &[SourceStatistics]) -> String {
    let rows = stats.iter().map(|s| {
        vec![
            s.source.clone(),
            s.reused_vocabularies.len().to_string(),
            s.reused_vocabularies
                .iter()
                .cloned()
                .collect::<Vec<_>>()
                .join(","),
            s.schema_elements.to_string(),
            s.reused_elements.to_string(),
            format!("{:.2}", s.reused_pct),
            s.classes.to_string(),
            format!("{:.2}", s.interlinking_pct),
            distribution(&s.interlinking),
            format!("{:.2}", s.intralinking_pct),
            distribution(&s.intralinking),
            s.sampled_entities.to_string(),
            format!("{:.2}", s.external_entity_pct),
        ]
    });
    tsv::render(
        &[
            "source",
            "vocabularies_reused",
            "vocabularies",
            "schema_elements",
            "reused_elements",
            "reused_pct",
            "classes",
            "interlinking_pct",
            "interlinking",
            "intralinking_pct",
            "intralinking",
            "sampled_entities",
            "external_entity_pct",
        ],
        rows,
    )
}
