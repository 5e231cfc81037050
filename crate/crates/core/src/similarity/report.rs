use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::embeddings::tokenize;
use super::louvain::CommunityAssignment;
use super::network::SimilarityNetwork;
use crate::tsv;

pub const DEFAULT_SIZE_FLOOR: usize = 2;
/// Tokens shown per community in the TSV.
pub const TOP_TOKENS: usize = 5;

pub const STOP_WORDS: &[&str] = &[
    "a", "an", "and", "as", "at", "by", "for", "from", "has", "have", "in", "is", "of", "on", "or",
    "the", "to", "with",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityRow {
    pub community: usize,
    pub size: usize,
    pub sources: Vec<String>,
    /// All non-stop-word tokens of the members' labels, most frequent first
    /// (ties alphabetical).
    pub tokens: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityReport {
    /// Communities at or above the size floor, largest first.
    pub rows: Vec<CommunityRow>,
    /// Everything below the floor in one row (`community` is the number of
    /// communities folded in).
    pub small: Option<CommunityRow>,
    pub modularity: f64,
}

fn count_tokens<'a>(labels: impl IntoIterator<Item = &'a str>) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for label in labels {
        for t in tokenize(label) {
            if !STOP_WORDS.contains(&t.as_str()) {
                *counts.entry(t).or_default() += 1;
            }
        }
    }
    let mut out: Vec<(String, usize)> = counts.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

pub fn community_report(
    assignment: &CommunityAssignment,
    network: &SimilarityNetwork,
    size_floor: usize,
) -> CommunityReport {
    let mut rows = Vec::new();
    let mut small_members = Vec::new();
    let mut small_count = 0;
    for (id, members) in assignment.members().into_iter().enumerate() {
        if members.len() < size_floor {
            small_count += 1;
            small_members.extend(members);
            continue;
        }
        rows.push(row(id, &members, network));
    }
    rows.sort_by(|a, b| b.size.cmp(&a.size).then(a.community.cmp(&b.community)));
    let small = (small_count > 0).then(|| {
        small_members.sort_unstable();
        CommunityRow {
            community: small_count,
            ..row(0, &small_members, network)
        }
    });
    CommunityReport {
        rows,
        small,
        modularity: assignment.modularity,
    }
}

fn row(id: usize, members: &[usize], network: &SimilarityNetwork) -> CommunityRow {
    let mut sources: Vec<String> = members
        .iter()
        .map(|&m| network.nodes[m].source.clone())
        .collect();
    sources.sort();
    sources.dedup();
    CommunityRow {
        community: id,
        size: members.len(),
        sources,
        tokens: count_tokens(members.iter().map(|&m| network.nodes[m].label.as_str())),
    }
}

impl CommunityReport {
    /// Columns community_id, size, sources, top_tokens. The folded small
    /// communities appear last with id `small`.
    pub fn to_tsv(&self) -> String {
        let fmt = |r: &CommunityRow, id: String| {
            vec![
                id,
                r.size.to_string(),
                r.sources.join(","),
                r.tokens
                    .iter()
                    .take(TOP_TOKENS)
                    .map(|(t, n)| format!("{t}:{n}"))
                    .collect::<Vec<_>>()
                    .join(" "),
            ]
        };
        let mut rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| fmt(r, r.community.to_string()))
            .collect();
        if let Some(s) = &self.small {
            rows.push(fmt(s, "small".into()));
        }
        tsv::render(&["community_id", "size", "sources", "top_tokens"], rows)
    }
}
