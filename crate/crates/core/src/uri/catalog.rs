//! Origin catalog: which ontology, vocabulary or linked data source a URI
//! comes from.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

use crate::tsv;

/// Catalog shipped with the library.
pub const STARTER_CATALOG: &str = include_str!("../../data/origins.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginKind {
    BioportalOntology,
    OwlOnWeb,
    LovVocab,
    LdSource,
}

impl OriginKind {
    pub fn name(self) -> &'static str {
        match self {
            OriginKind::BioportalOntology => "bioportal_ontology",
            OriginKind::OwlOnWeb => "owl_on_web",
            OriginKind::LovVocab => "lov_vocab",
            OriginKind::LdSource => "ld_source",
        }
    }

    /// Ontologies, as opposed to vocabularies and data sources.
    pub fn is_ontology(self) -> bool {
        matches!(self, OriginKind::BioportalOntology | OriginKind::OwlOnWeb)
    }
}

impl fmt::Display for OriginKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OriginKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "bioportal_ontology" => Ok(OriginKind::BioportalOntology),
            "owl_on_web" => Ok(OriginKind::OwlOnWeb),
            "lov_vocab" => Ok(OriginKind::LovVocab),
            "ld_source" => Ok(OriginKind::LdSource),
            other => Err(format!("unknown origin kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Origin {
    pub source_id: String,
    pub kind: OriginKind,
}

/// One namespace representation of a catalog source.
#[derive(Debug, Clone)]
pub struct NamespacePattern {
    pub entry: usize,
    pub namespace: Regex,
    /// Applied to the lowercased remainder after the namespace; group 1 (or
    /// the whole match) is the identifier.
    pub identifier: Option<Regex>,
    pub recommended: bool,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub source_id: String,
    pub kind: OriginKind,
    /// term IRI → preferred label
    pub labels: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default)]
pub struct OriginCatalog {
    pub entries: Vec<CatalogEntry>,
    /// In file order; the first match wins.
    pub patterns: Vec<NamespacePattern>,
}

/// Result of matching a URI against the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriginMatch<'a> {
    pub origin: Origin,
    pub pattern_index: usize,
    /// The part of the URI the namespace regex matched.
    pub namespace: &'a str,
    /// Lowercased identifier, when the pattern defines one and it matched.
    pub identifier: Option<String>,
    pub recommended: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("catalog line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn compile(pattern: &str) -> Result<Regex, regex::Error> {
    RegexBuilder::new(pattern).case_insensitive(true).build()
}

impl OriginCatalog {
    /// The bundled starter catalog (no label maps).
    pub fn starter() -> Self {
        Self::parse(STARTER_CATALOG, None).expect("bundled catalog is valid")
    }

    /// Parses catalog TSV with columns `source_id`, `kind`,
    /// `namespace_regex`, `identifier_regex`, `labels_path` and an optional
    /// `recommended` (`*`, `yes` or `true`). Several rows may share a source
    /// id; kind and labels must then agree or be left empty. Relative label
    /// paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self, CatalogError> {
        let (header, rows) = tsv::parse(text).map_err(|e| CatalogError::Invalid {
            line: 1,
            message: e.to_string(),
        })?;
        let col = |name: &str| header.iter().position(|h| h.trim() == name);
        let missing = |name: &str| CatalogError::Invalid {
            line: 1,
            message: format!("missing column {name}"),
        };
        let c_id = col("source_id").ok_or_else(|| missing("source_id"))?;
        let c_kind = col("kind").ok_or_else(|| missing("kind"))?;
        let c_ns = col("namespace_regex").ok_or_else(|| missing("namespace_regex"))?;
        let c_idre = col("identifier_regex");
        let c_labels = col("labels_path");
        let c_rec = col("recommended");

        let mut catalog = OriginCatalog::default();
        let mut by_id: BTreeMap<String, usize> = BTreeMap::new();
        for (line, row) in rows {
            let get = |c: Option<usize>| c.and_then(|c| row.get(c)).map(|s| s.trim()).unwrap_or("");
            let bad = |message: String| CatalogError::Invalid { line, message };
            let id = get(Some(c_id));
            if id.is_empty() {
                return Err(bad("empty source_id".into()));
            }
            let kind: OriginKind = get(Some(c_kind)).parse().map_err(bad)?;
            let entry = match by_id.get(id) {
                Some(&i) => {
                    if catalog.entries[i].kind != kind {
                        return Err(bad(format!("source {id} declared with two kinds")));
                    }
                    i
                }
                None => {
                    catalog.entries.push(CatalogEntry {
                        source_id: id.to_string(),
                        kind,
                        labels: BTreeMap::new(),
                    });
                    by_id.insert(id.to_string(), catalog.entries.len() - 1);
                    catalog.entries.len() - 1
                }
            };
            let labels_path = get(c_labels);
            if !labels_path.is_empty() {
                let path: PathBuf = match base_dir {
                    Some(dir) => dir.join(labels_path),
                    None => PathBuf::from(labels_path),
                };
                let labels = load_labels(&path)?;
                catalog.entries[entry].labels.extend(labels);
            }
            let namespace = compile(get(Some(c_ns))).map_err(|e| bad(e.to_string()))?;
            let id_re = get(c_idre);
            let identifier = if id_re.is_empty() {
                None
            } else {
                Some(compile(id_re).map_err(|e| bad(e.to_string()))?)
            };
            let recommended = matches!(
                get(c_rec).to_ascii_lowercase().as_str(),
                "*" | "yes" | "true" | "1"
            );
            catalog.patterns.push(NamespacePattern {
                entry,
                namespace,
                identifier,
                recommended,
            });
        }
        Ok(catalog)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CatalogError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, path.parent())
    }

    pub fn entry(&self, source_id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.source_id == source_id)
    }

    /// Matches the lowercased `uri` against the namespace patterns in order.
    pub fn match_uri<'a>(&self, uri: &'a str) -> Option<OriginMatch<'a>> {
        let lower = uri.to_lowercase();
        for (i, p) in self.patterns.iter().enumerate() {
            let Some(m) = p.namespace.find(&lower) else {
                continue;
            };
            if m.start() != 0 {
                continue;
            }
            let entry = &self.entries[p.entry];
            // Lowercasing can change byte lengths outside ASCII.
            let namespace = if lower.len() == uri.len() {
                &uri[..m.end()]
            } else {
                uri
            };
            let rest = &lower[m.end()..];
            let identifier = match &p.identifier {
                _ if rest.is_empty() => Some(String::new()),
                None => Some(rest.to_string()),
                Some(re) => re.captures(rest).map(|c| {
                    c.get(1)
                        .unwrap_or_else(|| c.get(0).unwrap())
                        .as_str()
                        .to_string()
                }),
            };
            return Some(OriginMatch {
                origin: Origin {
                    source_id: entry.source_id.clone(),
                    kind: entry.kind,
                },
                pattern_index: i,
                namespace,
                identifier,
                recommended: p.recommended,
            });
        }
        None
    }

    pub fn classify_origin(&self, uri: &str) -> Option<Origin> {
        self.match_uri(uri).map(|m| m.origin)
    }

    /// Label from any catalog label map, preferring the URI's own origin.
    pub fn label_for(&self, uri: &str) -> Option<(&str, &str)> {
        if let Some(origin) = self.classify_origin(uri) {
            if let Some(entry) = self.entry(&origin.source_id) {
                if let Some(l) = entry.labels.get(uri) {
                    return Some((&entry.source_id, l));
                }
            }
        }
        self.entries.iter().find_map(|e| {
            e.labels
                .get(uri)
                .map(|l| (e.source_id.as_str(), l.as_str()))
        })
    }
}

/// Loads a `uri<TAB>label` file (header row required).
pub fn load_labels(path: &Path) -> Result<BTreeMap<String, String>, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let (_, rows) = tsv::parse(&text).map_err(|e| CatalogError::Invalid {
        line: 1,
        message: format!("{}: {e}", path.display()),
    })?;
    let mut out = BTreeMap::new();
    for (line, row) in rows {
        match row.as_slice() {
            [uri, label, ..] if !label.trim().is_empty() => {
                out.insert(uri.trim().to_string(), label.trim().to_string());
            }
            _ => {
                return Err(CatalogError::Invalid {
                    line,
                    message: format!("{}: expected uri and label", path.display()),
                })
            }
        }
    }
    Ok(out)
}
