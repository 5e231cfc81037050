//! Intent-for-reuse detection: one external identifier wrapped in several
//! namespaces.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::catalog::{Origin, OriginCatalog};
use crate::tsv;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VariantMember {
    pub uri: String,
    pub namespace: String,
    pub recommended: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VariantGroup {
    pub origin: Origin,
    /// Lowercased identifier shared by the members.
    pub identifier: String,
    /// Sorted by URI.
    pub members: Vec<VariantMember>,
}

impl VariantGroup {
    pub fn namespaces(&self) -> BTreeSet<&str> {
        self.members.iter().map(|m| m.namespace.as_str()).collect()
    }

    pub fn recommended_namespaces(&self) -> BTreeSet<&str> {
        self.members
            .iter()
            .filter(|m| m.recommended)
            .map(|m| m.namespace.as_str())
            .collect()
    }
}

/// Groups URIs by (origin, identifier) and keeps the groups spanning at
/// least two catalog namespace patterns.
pub fn detect_uri_variants<'a>(
    uris: impl IntoIterator<Item = &'a str>,
    catalog: &OriginCatalog,
) -> Vec<VariantGroup> {
    type Key = (Origin, String);
    let mut groups: BTreeMap<Key, BTreeMap<String, (usize, VariantMember)>> = BTreeMap::new();
    for uri in uris {
        let Some(m) = catalog.match_uri(uri) else {
            continue;
        };
        let Some(identifier) = m.identifier else {
            continue;
        };
        groups
            .entry((m.origin.clone(), identifier))
            .or_default()
            .insert(
                uri.to_string(),
                (
                    m.pattern_index,
                    VariantMember {
                        uri: uri.to_string(),
                        namespace: m.namespace.to_string(),
                        recommended: m.recommended,
                    },
                ),
            );
    }
    groups
        .into_iter()
        .filter(|(_, members)| {
            members
                .values()
                .map(|(pattern, _)| *pattern)
                .collect::<BTreeSet<_>>()
                .len()
                >= 2
        })
        .map(|((origin, identifier), members)| VariantGroup {
            origin,
            identifier,
            members: members.into_values().map(|(_, m)| m).collect(),
        })
        .collect()
}

/// Report columns: origin, identifier, variant URIs, recommended namespace.
pub fn variant_groups_tsv(groups: &[VariantGroup]) -> String {
    let rows = groups.iter().map(|g| {
        vec![
            g.origin.source_id.clone(),
            g.identifier.clone(),
            g.members
                .iter()
                .map(|m| m.uri.as_str())
                .collect::<Vec<_>>()
                .join(" "),
            g.recommended_namespaces()
                .into_iter()
                .collect::<Vec<_>>()
                .join(" "),
        ]
    });
    tsv::render(
        &[
            "origin",
            "identifier",
            "variant_uris",
            "recommended_namespace",
        ],
        rows,
    )
}
