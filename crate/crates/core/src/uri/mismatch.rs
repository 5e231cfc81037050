//! Semantic mismatch: ontology classes used as if they were instances.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::catalog::{Origin, OriginCatalog};
use crate::schema::{LslodSchemaGraph, NodeKind};
use crate::tsv;

pub const DEFAULT_MISMATCH_THRESHOLD: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchReason {
    /// Instances typed with more ontology classes than the threshold.
    Typing,
    /// Sampled instance URIs of some class look like ontology class IRIs.
    InstancePattern,
}

impl MismatchReason {
    pub fn name(self) -> &'static str {
        match self {
            MismatchReason::Typing => "typing",
            MismatchReason::InstancePattern => "instance_pattern",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MismatchRecord {
    pub source: String,
    pub ontology: String,
    /// Typing: ontology classes with instances in the source. Instance
    /// pattern: classes whose sampled instances match the ontology.
    pub class_count: usize,
    pub reason: MismatchReason,
}

/// An instance URI pattern of `class` in `source` that falls inside an
/// ontology namespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternLink {
    pub source: String,
    pub class: String,
    pub pattern: String,
    pub origin: Origin,
}

/// Literal prefix of a `uri_pattern` string, up to the first class or escape.
pub fn pattern_prefix(pattern: &str) -> &str {
    let end = pattern.find(['\\', '[']).unwrap_or(pattern.len());
    &pattern[..end]
}

pub fn instance_pattern_links(
    graph: &LslodSchemaGraph,
    catalog: &OriginCatalog,
) -> Vec<PatternLink> {
    let mut out = BTreeSet::new();
    for node in graph.nodes.values().filter(|n| n.kind == NodeKind::Class) {
        for (source, graphs) in &node.observations {
            for obs in graphs.values() {
                let Some(summary) = &obs.summary else {
                    continue;
                };
                for pattern in summary.uri_patterns.keys() {
                    let Some(origin) = catalog.classify_origin(pattern_prefix(pattern)) else {
                        continue;
                    };
                    if origin.kind.is_ontology() {
                        out.insert(PatternLink {
                            source: source.clone(),
                            class: node.uri.clone(),
                            pattern: pattern.clone(),
                            origin,
                        });
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

pub fn detect_semantic_mismatch(
    graph: &LslodSchemaGraph,
    catalog: &OriginCatalog,
) -> Vec<MismatchRecord> {
    detect_semantic_mismatch_with_threshold(graph, catalog, DEFAULT_MISMATCH_THRESHOLD)
}

/// Reports a (source, ontology) pair when more than `threshold` of the
/// ontology's classes type instances in the source, or when instance URIs
/// of the source follow the ontology's class namespace.
pub fn detect_semantic_mismatch_with_threshold(
    graph: &LslodSchemaGraph,
    catalog: &OriginCatalog,
    threshold: usize,
) -> Vec<MismatchRecord> {
    let mut typing: BTreeMap<(String, String), usize> = BTreeMap::new();
    for node in graph.nodes.values().filter(|n| n.kind == NodeKind::Class) {
        let Some(origin) = catalog.classify_origin(&node.uri) else {
            continue;
        };
        if !origin.kind.is_ontology() {
            continue;
        }
        for source in node.sources() {
            if node.count_in(source) > 0 {
                *typing
                    .entry((source.to_string(), origin.source_id.clone()))
                    .or_default() += 1;
            }
        }
    }
    let mut out: Vec<MismatchRecord> = typing
        .into_iter()
        .filter(|(_, n)| *n > threshold)
        .map(|((source, ontology), class_count)| MismatchRecord {
            source,
            ontology,
            class_count,
            reason: MismatchReason::Typing,
        })
        .collect();

    let mut by_pattern: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
    for link in instance_pattern_links(graph, catalog) {
        by_pattern
            .entry((link.source, link.origin.source_id))
            .or_default()
            .insert(link.class);
    }
    out.extend(
        by_pattern
            .into_iter()
            .map(|((source, ontology), classes)| MismatchRecord {
                source,
                ontology,
                class_count: classes.len(),
                reason: MismatchReason::InstancePattern,
            }),
    );
    out.sort();
    out
}

pub fn mismatch_tsv(records: &[MismatchRecord]) -> String {
    let rows = records.iter().map(|r| {
        vec![
            r.source.clone(),
            r.ontology.clone(),
            r.class_count.to_string(),
            r.reason.name().to_string(),
        ]
    });
    tsv::render(&["source", "ontology", "class_count", "reason"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{summarize, ClassProfile, SchemaFragment};
    use crate::schema::merge;
    use crate::term::Term;

    fn class(uri: String, instances: &[&str]) -> ClassProfile {
        let sample: Vec<Term> = instances.iter().map(|i| Term::iri(*i)).collect();
        ClassProfile {
            uri,
            count: instances.len().max(1) as u64,
            summary: summarize(&sample),
            sample_instances: sample,
            mismatch_suspect: false,
            error: None,
        }
    }

    #[test]
    fn typing_over_threshold() {
        let mut f = SchemaFragment::new("ep", "http://g");
        for i in 0..1500 {
            f.classes.push(class(
                format!("http://purl.obolibrary.org/obo/CHEBI_{i}"),
                &["http://x/a"],
            ));
        }
        let g = merge([("src", &f)]);
        let c = OriginCatalog::starter();
        let r = detect_semantic_mismatch(&g, &c);
        assert_eq!(
            r,
            vec![MismatchRecord {
                source: "src".into(),
                ontology: "chebi".into(),
                class_count: 1500,
                reason: MismatchReason::Typing
            }]
        );
        assert!(detect_semantic_mismatch_with_threshold(&g, &c, 1500).is_empty());
    }

    #[test]
    fn instance_patterns() {
        let mut f = SchemaFragment::new("ep", "http://g");
        f.classes.push(class(
            "http://x/Compound".into(),
            &[
                "http://purl.obolibrary.org/obo/CHEBI_1",
                "http://purl.obolibrary.org/obo/CHEBI_2",
            ],
        ));
        f.classes
            .push(class("http://x/Other".into(), &["http://x/o1"]));
        let g = merge([("src", &f)]);
        let r = detect_semantic_mismatch(&g, &OriginCatalog::starter());
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].reason, MismatchReason::InstancePattern);
        assert_eq!((r[0].ontology.as_str(), r[0].class_count), ("chebi", 1));
        assert_eq!(
            pattern_prefix(r"http://purl.obolibrary.org/obo/CHEBI_\d+"),
            "http://purl.obolibrary.org/obo/CHEBI_"
        );
    }
}
