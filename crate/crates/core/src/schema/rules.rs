//! Graph URI → source id rewriting.

use regex::Regex;

use crate::tsv;

#[derive(Debug, Clone)]
pub struct GraphRule {
    pub pattern: Regex,
    /// May reference capture groups as `$1`, `${name}`.
    pub source_id: String,
}

/// Ordered rewrite rules; the first matching rule wins.
#[derive(Debug, Clone, Default)]
pub struct GraphRules {
    pub rules: Vec<GraphRule>,
}

#[derive(Debug, thiserror::Error)]
pub enum RulesError {
    #[error("rules line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("rules file: {0}")]
    Io(#[from] std::io::Error),
}

impl GraphRules {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, pattern: &str, source_id: &str) -> Result<(), regex::Error> {
        self.rules.push(GraphRule {
            pattern: Regex::new(pattern)?,
            source_id: source_id.to_string(),
        });
        Ok(())
    }

    /// Parses a TSV with columns `pattern` and `source_id`.
    pub fn parse(text: &str) -> Result<Self, RulesError> {
        let (_, rows) = tsv::parse(text)?;
        let mut rules = GraphRules::new();
        for (line, row) in rows {
            let [pattern, source_id] = row.as_slice() else {
                return Err(RulesError::Invalid {
                    line,
                    message: format!("expected 2 columns, found {}", row.len()),
                });
            };
            rules
                .push(pattern, source_id)
                .map_err(|e| RulesError::Invalid {
                    line,
                    message: e.to_string(),
                })?;
        }
        Ok(rules)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, RulesError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn normalize(&self, graph_uri: &str) -> String {
        normalize_graph_uri(graph_uri, self)
    }
}

/// Source id for `graph_uri`: the first matching rule's id (with capture
/// groups expanded), else host plus first path segment.
pub fn normalize_graph_uri(graph_uri: &str, rules: &GraphRules) -> String {
    for rule in &rules.rules {
        if let Some(caps) = rule.pattern.captures(graph_uri) {
            let mut out = String::new();
            caps.expand(&rule.source_id, &mut out);
            return out;
        }
    }
    default_source_id(graph_uri)
}

fn default_source_id(graph_uri: &str) -> String {
    match url::Url::parse(graph_uri) {
        Ok(u) if u.host_str().is_some() => {
            let host = u.host_str().unwrap_or_default();
            match u
                .path_segments()
                .and_then(|mut s| s.find(|seg| !seg.is_empty()))
            {
                Some(seg) => format!("{host}/{seg}"),
                None => host.to_string(),
            }
        }
        _ => graph_uri.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_matching_rule_wins() {
        let rules = GraphRules::parse("pattern\tsource_id\ndrugbank\tdrugbank\nbio2rdf\tbio2rdf\n")
            .unwrap();
        assert_eq!(
            rules.normalize("http://bio2rdf.org/drugbank_resource:bio2rdf.dataset.drugbank.R3"),
            "drugbank"
        );
        assert_eq!(
            rules.normalize("http://bio2rdf.org/kegg_resource:x"),
            "bio2rdf"
        );
    }

    #[test]
    fn capture_groups_expand() {
        let rules = GraphRules::parse(
            "pattern\tsource_id\n^http://bio2rdf\\.org/(\\w+)_resource:bio2rdf\\.dataset\\.\\w+\\.R\\d+$\t$1\n",
        )
        .unwrap();
        let a = rules.normalize("http://bio2rdf.org/kegg_resource:bio2rdf.dataset.kegg.R3");
        let b = rules.normalize("http://bio2rdf.org/kegg_resource:bio2rdf.dataset.kegg.R4");
        assert_eq!(a, "kegg");
        assert_eq!(a, b);
    }

    #[test]
    fn default_is_host_and_first_segment() {
        let rules = GraphRules::new();
        assert_eq!(
            rules.normalize("http://example.org/data/v2/graph"),
            "example.org/data"
        );
        assert_eq!(rules.normalize("http://example.org/"), "example.org");
        assert_eq!(rules.normalize("urn:x:y"), "urn:x:y");
        assert_eq!(
            rules.normalize("http://example.org/a"),
            rules.normalize("http://example.org/a")
        );
    }

    #[test]
    fn bad_regex_reports_line() {
        match GraphRules::parse("pattern\tsource_id\n(\tx\n") {
            Err(RulesError::Invalid { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
