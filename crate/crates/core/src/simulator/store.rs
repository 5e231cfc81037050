//! In-memory quad store and the line-based fixture format.
//!
//! One quad per line: `subject predicate object graph`, optionally followed
//! by ` .`. IRIs are written `<…>`, blank nodes `_:label`, literals as
//! double-quoted strings with `\` escapes and an optional `@lang` or
//! `^^<datatype>` suffix. Blank lines and lines starting with `#` are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use super::SimulatorError;
use crate::term::{is_absolute_iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixtureStore {
    pub graphs: BTreeMap<String, BTreeSet<Triple>>,
}

impl FixtureStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        graph: impl Into<String>,
        subject: Term,
        predicate: impl Into<String>,
        object: Term,
    ) {
        self.graphs.entry(graph.into()).or_default().insert(Triple {
            subject,
            predicate: predicate.into(),
            object,
        });
    }

    pub fn quad_count(&self) -> usize {
        self.graphs.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.quad_count() == 0
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimulatorError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SimulatorError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, SimulatorError> {
        let mut store = FixtureStore::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| SimulatorError::Parse {
                line: line_no,
                message,
            };
            let mut cursor = Cursor { rest: line };
            let subject = cursor.term().map_err(err)?;
            let predicate = cursor.term().map_err(err)?;
            let object = cursor.term().map_err(err)?;
            let graph = cursor.term().map_err(err)?;
            cursor.finish().map_err(err)?;

            if subject.is_literal() {
                return Err(err("literal in subject position".into()));
            }
            let Term::Iri { value: predicate } = predicate else {
                return Err(err("predicate must be an IRI".into()));
            };
            let Term::Iri { value: graph } = graph else {
                return Err(err("graph must be an IRI".into()));
            };
            store.insert(graph, subject, predicate, object);
        }
        Ok(store)
    }

    pub fn to_fixture_string(&self) -> String {
        let mut out = String::new();
        for (graph, triples) in &self.graphs {
            for t in triples {
                let _ = writeln!(
                    out,
                    "{} <{}> {} <{}> .",
                    t.subject, t.predicate, t.object, graph
                );
            }
        }
        out
    }
}

struct Cursor<'a> {
    rest: &'a str,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn finish(&mut self) -> Result<(), String> {
        self.skip_ws();
        let tail = self.rest.strip_prefix('.').unwrap_or(self.rest).trim();
        if tail.is_empty() || tail.starts_with('#') {
            Ok(())
        } else {
            Err(format!("unexpected trailing input {tail:?}"))
        }
    }

    fn iri(&mut self) -> Result<String, String> {
        // Caller has checked the leading '<'.
        let end = self.rest.find('>').ok_or("unterminated IRI")?;
        let iri = &self.rest[1..end];
        if !is_absolute_iri(iri) || iri.contains(char::is_whitespace) {
            return Err(format!("not an absolute IRI: {iri:?}"));
        }
        self.rest = &self.rest[end + 1..];
        Ok(iri.to_string())
    }

    fn term(&mut self) -> Result<Term, String> {
        self.skip_ws();
        let first = self.rest.chars().next().ok_or("missing term")?;
        match first {
            '<' => Ok(Term::iri(self.iri()?)),
            '_' => {
                let body = self.rest.strip_prefix("_:").ok_or("bad blank node")?;
                let end = body.find(char::is_whitespace).unwrap_or(body.len());
                if end == 0 {
                    return Err("empty blank node label".into());
                }
                let label = &body[..end];
                self.rest = &body[end..];
                Ok(Term::blank(label))
            }
            '"' => {
                let mut value = String::new();
                let mut chars = self.rest[1..].char_indices();
                let close = loop {
                    let (i, c) = chars.next().ok_or("unterminated literal")?;
                    match c {
                        '"' => break i + 1,
                        '\\' => {
                            let (_, e) = chars.next().ok_or("dangling escape")?;
                            value.push(match e {
                                'n' => '\n',
                                'r' => '\r',
                                't' => '\t',
                                '"' => '"',
                                '\\' => '\\',
                                other => return Err(format!("unknown escape \\{other}")),
                            });
                        }
                        c => value.push(c),
                    }
                };
                self.rest = &self.rest[close + 1..];
                if let Some(after) = self.rest.strip_prefix("^^") {
                    self.rest = after;
                    if !self.rest.starts_with('<') {
                        return Err("datatype must be an IRI".into());
                    }
                    let dt = self.iri()?;
                    Ok(Term::typed(value, dt))
                } else if let Some(after) = self.rest.strip_prefix('@') {
                    let end = after.find(char::is_whitespace).unwrap_or(after.len());
                    if end == 0 {
                        return Err("empty language tag".into());
                    }
                    self.rest = &after[end..];
                    Ok(Term::lang(value, &after[..end]))
                } else {
                    Ok(Term::literal(value))
                }
            }
            other => Err(format!("unexpected character {other:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::XSD_FLOAT;

    #[test]
    fn empty_input_gives_empty_store() {
        assert!(FixtureStore::parse("").unwrap().is_empty());
        assert!(FixtureStore::parse("# only a comment\n\n")
            .unwrap()
            .is_empty());
    }

    #[test]
    fn single_quad() {
        let s =
            FixtureStore::parse("<http://a/s> <http://a/p> <http://a/o> <http://a/g> .\n").unwrap();
        assert_eq!(s.graphs.len(), 1);
        assert_eq!(s.quad_count(), 1);
    }

    #[test]
    fn parses_all_term_forms() {
        let text = concat!(
            "<http://a/s> <http://a/p> \"52221.1\"^^<http://www.w3.org/2001/XMLSchema#float> <http://a/g>\n",
            "_:b1 <http://a/p> \"say \\\"hi\\\"\"@en <http://a/g> .\n",
            "<http://a/s> <http://a/q> _:b1 <http://a/g> . # trailing comment\n",
            "<http://a/s> <http://a/r> \"plain\" <http://a/h> .\n",
        );
        let s = FixtureStore::parse(text).unwrap();
        assert_eq!(s.quad_count(), 4);
        let g = &s.graphs["http://a/g"];
        assert!(g
            .iter()
            .any(|t| t.object == Term::typed("52221.1", XSD_FLOAT)));
        assert!(g.iter().any(|t| t.object == Term::lang("say \"hi\"", "en")));
        assert!(g.iter().any(|t| t.subject == Term::blank("b1")));
    }

    #[test]
    fn reports_line_numbers() {
        let text = "<http://a/s> <http://a/p> <http://a/o> <http://a/g> .\n<http://a/s> \"p\" <http://a/o> <http://a/g> .\n";
        match FixtureStore::parse(text) {
            Err(SimulatorError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            FixtureStore::parse("<http://a/s> <http://a/p> <http://a/o>\n"),
            Err(SimulatorError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            FixtureStore::parse("<rel> <http://a/p> <http://a/o> <http://a/g>\n"),
            Err(SimulatorError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn fixture_text_round_trips() {
        let text = concat!(
            "<http://a/s> <http://a/p> \"x\\ty\"^^<http://a/dt> <http://a/g> .\n",
            "_:b <http://a/p> \"z\"@de <http://a/g> .\n",
        );
        let s = FixtureStore::parse(text).unwrap();
        assert_eq!(FixtureStore::parse(&s.to_fixture_string()).unwrap(), s);
    }
}
