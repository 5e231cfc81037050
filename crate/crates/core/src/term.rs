//! RDF terms as they travel through SPARQL results, fixtures and samples.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const SKOS_PREF_LABEL: &str = "http://www.w3.org/2004/02/skos/core#prefLabel";

pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
pub const XSD_DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
pub const XSD_DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";

/// Namespaces whose members are standard datatypes. Anything else used as a
/// literal datatype is recorded as non-standard.
const STANDARD_DATATYPE_NAMESPACES: [&str; 3] = [
    XSD,
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "http://www.w3.org/2000/01/rdf-schema#",
];

/// A bound value: IRI, literal or blank node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Term {
    #[serde(rename = "uri")]
    Iri { value: String },
    #[serde(alias = "typed-literal")]
    Literal {
        value: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        datatype: Option<String>,
        #[serde(default, rename = "xml:lang", skip_serializing_if = "Option::is_none")]
        lang: Option<String>,
    },
    #[serde(rename = "bnode")]
    BlankNode { value: String },
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Self {
        Term::Iri {
            value: value.into(),
        }
    }

    pub fn literal(value: impl Into<String>) -> Self {
        Term::Literal {
            value: value.into(),
            datatype: None,
            lang: None,
        }
    }

    pub fn typed(value: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal {
            value: value.into(),
            datatype: Some(datatype.into()),
            lang: None,
        }
    }

    pub fn lang(value: impl Into<String>, lang: impl Into<String>) -> Self {
        Term::Literal {
            value: value.into(),
            datatype: None,
            lang: Some(lang.into()),
        }
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::BlankNode {
            value: label.into(),
        }
    }

    /// IRI string, label of a blank node, or literal lexical form.
    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri { value } | Term::BlankNode { value } | Term::Literal { value, .. } => value,
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    /// Value of `DATATYPE(?o)` in SPARQL 1.1: simple literals are
    /// `xsd:string`, language-tagged ones `rdf:langString`, non-literals unbound.
    pub fn sparql_datatype(&self) -> Option<&str> {
        match self {
            Term::Literal {
                datatype: Some(dt), ..
            } => Some(dt),
            Term::Literal { lang: Some(_), .. } => Some(RDF_LANG_STRING),
            Term::Literal { .. } => Some(XSD_STRING),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri { value } => write!(f, "<{value}>"),
            Term::BlankNode { value } => write!(f, "_:{value}"),
            Term::Literal {
                value,
                datatype,
                lang,
            } => {
                write!(f, "\"{}\"", escape_literal(value))?;
                if let Some(lang) = lang {
                    write!(f, "@{lang}")
                } else if let Some(dt) = datatype {
                    write!(f, "^^<{dt}>")
                } else {
                    Ok(())
                }
            }
        }
    }
}

fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// Byte offset where the local name starts: just after the rightmost `/`,
/// `#` or `:`.
fn local_start(iri: &str) -> usize {
    iri.rfind(['/', '#', ':']).map(|i| i + 1).unwrap_or(0)
}

/// The IRI truncated after its rightmost `/`, `#` or `:` (separator included).
pub fn namespace(iri: &str) -> &str {
    &iri[..local_start(iri)]
}

pub fn local_name(iri: &str) -> &str {
    &iri[local_start(iri)..]
}

/// True when `iri` parses as an absolute IRI with a scheme.
pub fn is_absolute_iri(iri: &str) -> bool {
    url::Url::parse(iri).is_ok()
}

pub fn is_standard_datatype(iri: &str) -> bool {
    STANDARD_DATATYPE_NAMESPACES
        .iter()
        .any(|ns| iri.starts_with(ns))
}
