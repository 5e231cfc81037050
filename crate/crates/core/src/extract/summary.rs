//! Value summaries over sampled instances and assertion values.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::term::{local_name, namespace, Term, XSD_DATE, XSD_FLOAT, XSD_INTEGER, XSD_STRING};

/// Values whose distinct/sample ratio is at most this are categorical.
pub const DEFAULT_CATEGORICAL_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueSummary {
    pub sample_size: usize,
    pub is_categorical: bool,
    pub inferred_datatype: Option<String>,
    pub namespaces: BTreeMap<String, usize>,
    pub median_length: Option<f64>,
    pub uri_patterns: BTreeMap<String, usize>,
}

impl Default for ValueSummary {
    fn default() -> Self {
        summarize(&[])
    }
}

pub fn summarize(values: &[Term]) -> ValueSummary {
    summarize_with_threshold(values, DEFAULT_CATEGORICAL_THRESHOLD)
}

pub fn summarize_with_threshold(values: &[Term], categorical_threshold: f64) -> ValueSummary {
    let sample_size = values.len();
    let distinct: BTreeSet<&Term> = values.iter().collect();
    let is_categorical =
        sample_size > 0 && distinct.len() as f64 / sample_size as f64 <= categorical_threshold;

    let mut namespaces = BTreeMap::new();
    let mut uri_patterns = BTreeMap::new();
    for iri in values.iter().filter_map(Term::as_iri) {
        *namespaces.entry(namespace(iri).to_string()).or_default() += 1;
        *uri_patterns.entry(uri_pattern(iri)).or_default() += 1;
    }

    let mut lengths: Vec<usize> = values.iter().map(|v| v.lexical().chars().count()).collect();
    lengths.sort_unstable();
    let median_length = match lengths.len() {
        0 => None,
        n if n % 2 == 1 => Some(lengths[n / 2] as f64),
        n => Some((lengths[n / 2 - 1] + lengths[n / 2]) as f64 / 2.0),
    };

    ValueSummary {
        sample_size,
        is_categorical,
        inferred_datatype: infer_datatype(values),
        namespaces,
        median_length,
        uri_patterns,
    }
}

/// Namespace kept verbatim, then digit runs → `\d+` and lowercase runs →
/// `[a-z]+` in the local part.
pub fn uri_pattern(iri: &str) -> String {
    let ns = namespace(iri);
    let mut out = String::from(ns);
    let mut chars = local_name(iri).chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_ascii_digit() {
            while chars.peek().is_some_and(char::is_ascii_digit) {
                chars.next();
            }
            out.push_str(r"\d+");
        } else if c.is_ascii_lowercase() {
            while chars.peek().is_some_and(char::is_ascii_lowercase) {
                chars.next();
            }
            out.push_str("[a-z]+");
        } else {
            out.push(c);
        }
    }
    out
}

fn infer_datatype(values: &[Term]) -> Option<String> {
    let literals: Vec<&Term> = values.iter().filter(|v| v.is_literal()).collect();
    if literals.is_empty() {
        return None;
    }
    let mut declared: BTreeMap<&str, usize> = BTreeMap::new();
    for lit in &literals {
        if let Term::Literal {
            datatype: Some(_), ..
        }
        | Term::Literal { lang: Some(_), .. } = lit
        {
            *declared.entry(lit.sparql_datatype().unwrap()).or_default() += 1;
        }
    }
    // BTreeMap iteration is lexicographic, so the first maximum wins ties.
    let modal = declared
        .iter()
        .fold(None::<(&str, usize)>, |best, (dt, n)| match best {
            Some((_, m)) if m >= *n => best,
            _ => Some((dt, *n)),
        });
    if let Some((dt, _)) = modal {
        return Some(dt.to_string());
    }

    static INTEGER: OnceLock<Regex> = OnceLock::new();
    static FLOAT: OnceLock<Regex> = OnceLock::new();
    static DATE: OnceLock<Regex> = OnceLock::new();
    let integer = INTEGER.get_or_init(|| Regex::new(r"^[+-]?\d+$").unwrap());
    let float =
        FLOAT.get_or_init(|| Regex::new(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$").unwrap());
    let date = DATE.get_or_init(|| Regex::new(r"^\d{4}-\d{2}-\d{2}$").unwrap());
    let all = |re: &Regex| literals.iter().all(|l| re.is_match(l.lexical().trim()));
    let dt = if all(integer) {
        XSD_INTEGER
    } else if all(float) {
        XSD_FLOAT
    } else if all(date) {
        XSD_DATE
    } else {
        XSD_STRING
    };
    Some(dt.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sample() {
        let s = summarize(&[]);
        assert_eq!(s.sample_size, 0);
        assert!(!s.is_categorical);
        assert!(s.inferred_datatype.is_none());
        assert!(s.namespaces.is_empty() && s.uri_patterns.is_empty());
        assert!(s.median_length.is_none());
    }

    #[test]
    fn drugbank_identifiers() {
        let s = summarize(&[
            Term::iri("http://bio2rdf.org/drugbank:DB03536"),
            Term::iri("http://bio2rdf.org/drugbank:DB00619"),
        ]);
        assert_eq!(
            s.namespaces,
            BTreeMap::from([("http://bio2rdf.org/drugbank:".to_string(), 2)])
        );
        assert_eq!(
            s.uri_patterns,
            BTreeMap::from([(r"http://bio2rdf.org/drugbank:DB\d+".to_string(), 2)])
        );
        assert!(s.inferred_datatype.is_none());
    }

    #[test]
    fn float_values() {
        let s = summarize(&[
            Term::typed("52221.1", XSD_FLOAT),
            Term::typed("56345.0", XSD_FLOAT),
            Term::typed("57530.0", XSD_FLOAT),
        ]);
        assert_eq!(s.inferred_datatype.as_deref(), Some(XSD_FLOAT));
        assert_eq!(s.median_length, Some("56345.0".len() as f64));
    }

    #[test]
    fn heuristics_for_untyped_literals() {
        let of = |v: &[&str]| {
            let terms: Vec<Term> = v.iter().map(|s| Term::literal(*s)).collect();
            summarize(&terms).inferred_datatype.unwrap()
        };
        assert_eq!(of(&["1", "-20"]), XSD_INTEGER);
        assert_eq!(of(&["1", "2.5", "1e3"]), XSD_FLOAT);
        assert_eq!(of(&["2018-01-02"]), XSD_DATE);
        assert_eq!(of(&["aspirin", "3"]), XSD_STRING);
    }

    #[test]
    fn modal_datatype_ties_break_lexicographically() {
        let s = summarize(&[
            Term::typed("1", "http://ex.org/b"),
            Term::typed("1", "http://ex.org/a"),
            Term::literal("x"),
        ]);
        assert_eq!(s.inferred_datatype.as_deref(), Some("http://ex.org/a"));
    }

    #[test]
    fn categorical_threshold() {
        let mut values = vec![Term::literal("yes"); 19];
        values.push(Term::literal("no"));
        assert!(summarize(&values).is_categorical);
        values.push(Term::literal("maybe"));
        assert!(!summarize(&values).is_categorical);
    }

    #[test]
    fn even_median_is_mean_of_middle_pair() {
        let s = summarize(&[Term::literal("ab"), Term::literal("abcd")]);
        assert_eq!(s.median_length, Some(3.0));
    }

    #[test]
    fn patterns_generalize_lowercase_runs() {
        assert_eq!(
            uri_pattern("http://ex.org/id/abc_12x"),
            r"http://ex.org/id/[a-z]+_\d+[a-z]+"
        );
        assert_eq!(
            uri_pattern("http://purl.obolibrary.org/obo/CHEBI_15377"),
            r"http://purl.obolibrary.org/obo/CHEBI_\d+"
        );
    }
}
