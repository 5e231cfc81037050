//! `application/sparql-results+json` documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ClientError;
use crate::term::{is_absolute_iri, Term};

pub const RESULTS_JSON_MEDIA_TYPE: &str = "application/sparql-results+json";

pub type Binding = BTreeMap<String, Term>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryResult {
    pub variables: Vec<String>,
    pub rows: Vec<Binding>,
}

#[derive(Serialize, Deserialize)]
struct Document {
    head: Head,
    results: Results,
}

#[derive(Serialize, Deserialize)]
struct Head {
    #[serde(default)]
    vars: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct Results {
    bindings: Vec<Binding>,
}

impl QueryResult {
    pub fn new(variables: Vec<String>) -> Self {
        QueryResult {
            variables,
            rows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values bound to `var`, skipping rows where it is unbound.
    pub fn column<'a>(&'a self, var: &'a str) -> impl Iterator<Item = &'a Term> + 'a {
        self.rows.iter().filter_map(move |row| row.get(var))
    }

    pub fn parse_json(text: &str) -> Result<Self, ClientError> {
        let doc: Document = serde_json::from_str(text)
            .map_err(|e| ClientError::MalformedResponse(e.to_string()))?;
        let result = QueryResult {
            variables: doc.head.vars,
            rows: doc.results.bindings,
        };
        result.check()?;
        Ok(result)
    }

    pub fn to_json(&self) -> String {
        let doc = Document {
            head: Head {
                vars: self.variables.clone(),
            },
            results: Results {
                bindings: self.rows.clone(),
            },
        };
        serde_json::to_string(&doc).expect("results document serializes")
    }

    fn check(&self) -> Result<(), ClientError> {
        for row in &self.rows {
            for (var, term) in row {
                if !self.variables.iter().any(|v| v == var) {
                    return Err(ClientError::MalformedResponse(format!(
                        "binding for undeclared variable ?{var}"
                    )));
                }
                if let Term::Iri { value } = term {
                    if !is_absolute_iri(value) {
                        return Err(ClientError::MalformedResponse(format!(
                            "relative IRI {value:?} bound to ?{var}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
