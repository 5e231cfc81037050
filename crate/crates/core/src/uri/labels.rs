//! Label extraction: catalog annotation, endpoint annotation, then a label
//! derived from the URI's local name.

use serde::{Deserialize, Serialize};

use super::catalog::OriginCatalog;
use crate::sparql::{templates::render_label_query, EndpointDescriptor, SparqlClient};
use crate::term::{local_name, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMethod {
    CatalogAnnotation,
    EndpointAnnotation,
    Regexp,
}

impl LabelMethod {
    pub fn name(self) -> &'static str {
        match self {
            LabelMethod::CatalogAnnotation => "catalog_annotation",
            LabelMethod::EndpointAnnotation => "endpoint_annotation",
            LabelMethod::Regexp => "regexp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledUri {
    pub uri: String,
    pub label: String,
    pub method: LabelMethod,
    /// Schema source the URI belongs to; set by the caller.
    pub source_id: Option<String>,
}

impl LabeledUri {
    pub fn in_source(mut self, source: impl Into<String>) -> Self {
        self.source_id = Some(source.into());
        self
    }
}

/// Splits on `-`, `_`, whitespace and camel-case boundaries, title-cases
/// each token and joins them with single spaces.
pub fn label_from_local_name(local: &str) -> String {
    let mut tokens: Vec<String> = Vec::new();
    for chunk in local.split(|c: char| c == '-' || c == '_' || c.is_whitespace()) {
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let prev = chars[i - 1];
            let cur = chars[i];
            let next = chars.get(i + 1);
            // aB → a|B ; ABc → A|Bc
            let lower_to_upper =
                (prev.is_lowercase() || prev.is_ascii_digit()) && cur.is_uppercase();
            let acronym_end =
                prev.is_uppercase() && cur.is_uppercase() && next.is_some_and(|n| n.is_lowercase());
            if lower_to_upper || acronym_end {
                tokens.push(chars[start..i].iter().collect());
                start = i;
            }
        }
        if start < chars.len() {
            tokens.push(chars[start..].iter().collect());
        }
    }
    tokens
        .iter()
        .filter(|t| !t.is_empty())
        .map(|t| title_case(t))
        .collect::<Vec<_>>()
        .join(" ")
}

fn title_case(token: &str) -> String {
    let mut chars = token.chars();
    match chars.next() {
        Some(first) => first
            .to_uppercase()
            .chain(chars.flat_map(char::to_lowercase))
            .collect(),
        None => String::new(),
    }
}

/// Endpoint used for the second stage.
pub struct LabelEndpoint<'a> {
    pub client: &'a SparqlClient,
    pub endpoint: &'a EndpointDescriptor,
}

pub fn extract_label(
    uri: &str,
    catalog: &OriginCatalog,
    endpoint: Option<&LabelEndpoint<'_>>,
) -> LabeledUri {
    if let Some((_, label)) = catalog.label_for(uri) {
        if !label.trim().is_empty() {
            return LabeledUri {
                uri: uri.to_string(),
                label: label.trim().to_string(),
                method: LabelMethod::CatalogAnnotation,
                source_id: None,
            };
        }
    }
    if let Some(ep) = endpoint {
        if let Some(label) = endpoint_label(uri, ep) {
            return LabeledUri {
                uri: uri.to_string(),
                label,
                method: LabelMethod::EndpointAnnotation,
                source_id: None,
            };
        }
    }
    let derived = label_from_local_name(local_name(uri));
    LabeledUri {
        uri: uri.to_string(),
        label: if derived.is_empty() {
            uri.to_string()
        } else {
            derived
        },
        method: LabelMethod::Regexp,
        source_id: None,
    }
}

fn endpoint_label(uri: &str, ep: &LabelEndpoint<'_>) -> Option<String> {
    let query = render_label_query(uri).ok()?;
    match ep.client.execute(ep.endpoint, &query) {
        Ok(result) => result
            .column("label")
            .filter(|t| t.is_literal())
            .map(Term::lexical)
            .map(str::trim)
            .find(|l| !l.is_empty())
            .map(str::to_string),
        Err(err) => {
            log::debug!("{}: label query for {uri} failed: {err}", ep.endpoint.id);
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_labels() {
        assert_eq!(label_from_local_name("mol_weight"), "Mol Weight");
        assert_eq!(
            label_from_local_name("hasMolecularWeight"),
            "Has Molecular Weight"
        );
        assert_eq!(
            label_from_local_name("Drug-Drug-Interaction"),
            "Drug Drug Interaction"
        );
        assert_eq!(label_from_local_name("HTTPServer"), "Http Server");
        assert_eq!(label_from_local_name("ec-number"), "Ec Number");
        assert_eq!(label_from_local_name("__"), "");
    }

    #[test]
    fn derived_labels_are_fixed_points() {
        for s in [
            "mol_weight",
            "hasMolecularWeight",
            "HTTPServer",
            "x-ref",
            "geneID2",
        ] {
            let once = label_from_local_name(s);
            assert_eq!(label_from_local_name(&once), once, "{s}");
        }
    }

    #[test]
    fn stage_order() {
        let mut catalog = OriginCatalog::starter();
        let uri = "http://semanticscience.org/resource/CHEMINF_000484";
        let entry = catalog
            .entries
            .iter_mut()
            .find(|e| e.source_id == "cheminf")
            .unwrap();
        entry
            .labels
            .insert(uri.into(), "average molecular weight descriptor".into());
        let l = extract_label(uri, &catalog, None);
        assert_eq!(l.label, "average molecular weight descriptor");
        assert_eq!(l.method, LabelMethod::CatalogAnnotation);

        let l = extract_label(
            "http://bio2rdf.org/kegg_vocabulary:mol_weight",
            &catalog,
            None,
        );
        assert_eq!(
            (l.label.as_str(), l.method),
            ("Mol Weight", LabelMethod::Regexp)
        );

        let l = extract_label("http://example.org/", &catalog, None);
        assert_eq!(l.label, "http://example.org/");
    }
}
