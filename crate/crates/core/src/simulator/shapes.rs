//! Recognition of the query shapes the simulator answers.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;

use crate::term::{RDFS_LABEL, SKOS_PREF_LABEL};

/// Query shapes, used both to dispatch evaluation and to target faults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShapeKind {
    ProbeBasic,
    ProbeNamedGraphs,
    ProbeGroupBy,
    ProbeBind,
    ProbeOrderByRand,
    Sq1,
    Sq1Fallback,
    Sq2,
    Sq2Fallback,
    Sq3,
    Sq3Fallback,
    Sq4,
    Sq4Fallback,
    Sq5,
    Sq5Fallback,
    Label,
}

const NAMES: [(ShapeKind, &str); 16] = [
    (ShapeKind::ProbeBasic, "probe-basic"),
    (ShapeKind::ProbeNamedGraphs, "probe-graphs"),
    (ShapeKind::ProbeGroupBy, "probe-group-by"),
    (ShapeKind::ProbeBind, "probe-bind"),
    (ShapeKind::ProbeOrderByRand, "probe-rand"),
    (ShapeKind::Sq1, "SQ1"),
    (ShapeKind::Sq1Fallback, "SQ1-fallback"),
    (ShapeKind::Sq2, "SQ2"),
    (ShapeKind::Sq2Fallback, "SQ2-fallback"),
    (ShapeKind::Sq3, "SQ3"),
    (ShapeKind::Sq3Fallback, "SQ3-fallback"),
    (ShapeKind::Sq4, "SQ4"),
    (ShapeKind::Sq4Fallback, "SQ4-fallback"),
    (ShapeKind::Sq5, "SQ5"),
    (ShapeKind::Sq5Fallback, "SQ5-fallback"),
    (ShapeKind::Label, "label"),
];

impl ShapeKind {
    pub fn name(self) -> &'static str {
        NAMES
            .iter()
            .find(|(k, _)| *k == self)
            .map(|(_, n)| *n)
            .unwrap()
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NAMES
            .iter()
            .find(|(_, n)| n.eq_ignore_ascii_case(s))
            .map(|(k, _)| *k)
            .ok_or_else(|| format!("unknown query shape {s:?}"))
    }
}

/// A recognized query with its extracted parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub kind: ShapeKind,
    pub graph: Option<String>,
    pub concept: Option<String>,
    pub property: Option<String>,
    pub iri: Option<String>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

impl Shape {
    /// Parameters rendered for the request log.
    pub fn params_string(&self) -> String {
        let mut parts = Vec::new();
        for (name, v) in [
            ("graph", &self.graph),
            ("concept", &self.concept),
            ("property", &self.property),
            ("iri", &self.iri),
        ] {
            if let Some(v) = v {
                parts.push(format!("{name}=<{v}>"));
            }
        }
        if let Some(l) = self.limit {
            parts.push(format!("limit={l}"));
        }
        if let Some(o) = self.offset {
            parts.push(format!("offset={o}"));
        }
        parts.join(" ")
    }
}

/// Collapses whitespace and pads punctuation outside IRIs so that spacing
/// differences do not matter.
pub fn normalize_query(query: &str) -> String {
    let mut out = String::with_capacity(query.len() + 16);
    let mut in_iri = false;
    for c in query.chars() {
        if in_iri {
            out.push(c);
            if c == '>' {
                in_iri = false;
            }
            continue;
        }
        match c {
            '<' if !out.ends_with('(') && !out.ends_with("( ") => {
                in_iri = true;
                out.push(c);
            }
            '{' | '}' | '(' | ')' | ';' => {
                out.push(' ');
                out.push(c);
                out.push(' ');
            }
            c if c.is_whitespace() => out.push(' '),
            c => out.push(c),
        }
    }
    out.split(' ')
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

struct Pattern {
    kind: ShapeKind,
    regex: Regex,
    slots: Vec<char>,
}

/// Query texts with slots: `<@G>` graph, `<@C>` concept, `<@P>` property,
/// `<@U>` IRI, `@N` limit, `@M` offset.
fn pattern_sources() -> Vec<(ShapeKind, String)> {
    vec![
        (ShapeKind::ProbeBasic, "SELECT ?s WHERE { ?s ?p ?o } LIMIT 1".into()),
        (
            ShapeKind::ProbeNamedGraphs,
            "SELECT ?g WHERE { GRAPH ?g { ?s ?p ?o } } LIMIT 1".into(),
        ),
        (
            ShapeKind::ProbeGroupBy,
            "SELECT ?p (COUNT(?s) AS ?n) WHERE { ?s ?p ?o } GROUP BY ?p LIMIT 1".into(),
        ),
        (
            ShapeKind::ProbeBind,
            "SELECT ?s ?t WHERE { ?s ?p ?o . BIND(DATATYPE(?o) AS ?t) } LIMIT 1".into(),
        ),
        (
            ShapeKind::ProbeOrderByRand,
            "SELECT ?s WHERE { ?s ?p ?o } ORDER BY RAND() LIMIT 1".into(),
        ),
        (ShapeKind::Sq1, "SELECT DISTINCT ?g WHERE { GRAPH ?g { ?s ?p ?o } }".into()),
        (ShapeKind::Sq1Fallback, "SELECT DISTINCT ?g WHERE { GRAPH ?g { } }".into()),
        (
            ShapeKind::Sq2,
            "SELECT ?Concept (COUNT (?x) AS ?cCount) WHERE { GRAPH <@G> { ?x rdf:type ?Concept } } GROUP BY ?Concept ORDER BY DESC(?cCount)".into(),
        ),
        (
            ShapeKind::Sq2Fallback,
            "SELECT ?x ?Concept WHERE { GRAPH <@G> { ?x rdf:type ?Concept } } LIMIT @N OFFSET @M".into(),
        ),
        (
            ShapeKind::Sq3,
            "SELECT DISTINCT ?p ?c (COUNT(?x) AS ?count) ?valType WHERE { GRAPH <@G> { ?x rdf:type <@C>; ?p ?o . OPTIONAL {?o rdf:type ?c} . FILTER(!(?p = 'rdf:type')) . BIND(DATATYPE(?o) AS ?valType) } } GROUP BY ?p ?c ?valType ORDER BY DESC(?count)".into(),
        ),
        (
            ShapeKind::Sq3Fallback,
            "SELECT ?x ?p ?o ?c WHERE { GRAPH <@G> { ?x rdf:type <@C> ; ?p ?o . OPTIONAL { ?o rdf:type ?c } } } LIMIT @N OFFSET @M".into(),
        ),
        (
            ShapeKind::Sq4,
            "SELECT ?x WHERE { GRAPH <@G> { ?x rdf:type <@C> } } ORDER BY RAND() LIMIT @N".into(),
        ),
        (
            ShapeKind::Sq4Fallback,
            "SELECT ?x WHERE { GRAPH <@G> { ?x rdf:type <@C> } } LIMIT @N OFFSET @M".into(),
        ),
        (
            ShapeKind::Sq5,
            "SELECT ?x WHERE { GRAPH <@G> { ?c rdf:type <@C>; <@P> ?x } } ORDER BY RAND() LIMIT @N".into(),
        ),
        (
            ShapeKind::Sq5Fallback,
            "SELECT ?x WHERE { GRAPH <@G> { ?c rdf:type <@C> ; <@P> ?x } } LIMIT @N OFFSET @M".into(),
        ),
        (
            ShapeKind::Label,
            format!(
                "SELECT ?label WHERE {{ {{ <@U> <{RDFS_LABEL}> ?label }} UNION {{ <@U> <{SKOS_PREF_LABEL}> ?label }} }} LIMIT 1"
            ),
        ),
    ]
}

fn patterns() -> &'static [Pattern] {
    static PATTERNS: OnceLock<Vec<Pattern>> = OnceLock::new();
    PATTERNS.get_or_init(|| {
        pattern_sources()
            .into_iter()
            .map(|(kind, source)| {
                let escaped = regex::escape(&normalize_query(&source));
                let mut slots = Vec::new();
                let mut re = String::from("^");
                let mut rest = escaped.as_str();
                while let Some(at) = rest.find('@') {
                    let slot = rest[at + 1..].chars().next().unwrap();
                    slots.push(slot);
                    re.push_str(&rest[..at]);
                    re.push_str(match slot {
                        'N' | 'M' => "([0-9]+)",
                        _ => "([^<>\\s]+)",
                    });
                    rest = &rest[at + 2..];
                }
                re.push_str(rest);
                re.push('$');
                Pattern {
                    kind,
                    regex: Regex::new(&re).expect("shape pattern compiles"),
                    slots,
                }
            })
            .collect()
    })
}

/// Recognizes `query`, or returns `None` for anything outside the shapes.
pub fn recognize(query: &str) -> Option<Shape> {
    let normalized = normalize_query(query);
    for pattern in patterns() {
        let Some(caps) = pattern.regex.captures(&normalized) else {
            continue;
        };
        let mut shape = Shape {
            kind: pattern.kind,
            graph: None,
            concept: None,
            property: None,
            iri: None,
            limit: None,
            offset: None,
        };
        let mut seen_iri: Option<String> = None;
        for (i, slot) in pattern.slots.iter().enumerate() {
            let value = caps[i + 1].to_string();
            match slot {
                'G' => shape.graph = Some(value),
                'C' => shape.concept = Some(value),
                'P' => shape.property = Some(value),
                'U' => {
                    // Both arms of the label UNION must name the same IRI.
                    if seen_iri.as_ref().is_some_and(|s| *s != value) {
                        return None;
                    }
                    seen_iri = Some(value.clone());
                    shape.iri = Some(value);
                }
                'N' => shape.limit = Some(value.parse().ok()?),
                'M' => shape.offset = Some(value.parse().ok()?),
                _ => unreachable!(),
            }
        }
        return Some(shape);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparql::templates::{render_canonical, render_fallback, render_label_query};
    use crate::sparql::{TemplateId, TemplateParams};

    #[test]
    fn normalization_ignores_spacing_but_keeps_iris() {
        assert_eq!(
            normalize_query("SELECT  ?x WHERE{GRAPH <http://g/a b> {?x ?p ?o}}"),
            "SELECT ?x WHERE { GRAPH <http://g/a b> { ?x ?p ?o } }"
        );
        assert_eq!(normalize_query("COUNT (?x)"), normalize_query("COUNT(?x)"));
    }

    #[test]
    fn recognizes_every_client_query_form() {
        let p = TemplateParams::graph("http://g/1")
            .concept("http://c/A")
            .property("http://p/q");
        let canon = [
            (TemplateId::Sq1, ShapeKind::Sq1),
            (TemplateId::Sq2, ShapeKind::Sq2),
            (TemplateId::Sq3, ShapeKind::Sq3),
            (TemplateId::Sq4, ShapeKind::Sq4),
            (TemplateId::Sq5, ShapeKind::Sq5),
        ];
        for (id, kind) in canon {
            let shape = recognize(&render_canonical(id, &p, 123).unwrap()).unwrap();
            assert_eq!(shape.kind, kind);
        }
        let shape = recognize(&render_canonical(TemplateId::Sq5, &p, 7).unwrap()).unwrap();
        assert_eq!(shape.graph.as_deref(), Some("http://g/1"));
        assert_eq!(shape.concept.as_deref(), Some("http://c/A"));
        assert_eq!(shape.property.as_deref(), Some("http://p/q"));
        assert_eq!(shape.limit, Some(7));

        let fallbacks = [
            (TemplateId::Sq1, ShapeKind::Sq1Fallback),
            (TemplateId::Sq2, ShapeKind::Sq2Fallback),
            (TemplateId::Sq3, ShapeKind::Sq3Fallback),
            (TemplateId::Sq4, ShapeKind::Sq4Fallback),
            (TemplateId::Sq5, ShapeKind::Sq5Fallback),
        ];
        for (id, kind) in fallbacks {
            let shape = recognize(&render_fallback(id, &p, 10, 30).unwrap()).unwrap();
            assert_eq!(shape.kind, kind);
            if id != TemplateId::Sq1 {
                assert_eq!((shape.limit, shape.offset), (Some(10), Some(30)));
            }
        }
        let label = recognize(&render_label_query("http://x/y").unwrap()).unwrap();
        assert_eq!(label.kind, ShapeKind::Label);
        assert_eq!(label.iri.as_deref(), Some("http://x/y"));
    }

    #[test]
    fn recognizes_probes() {
        use crate::sparql::*;
        let probes = [
            (PROBE_BASIC, ShapeKind::ProbeBasic),
            (PROBE_NAMED_GRAPHS, ShapeKind::ProbeNamedGraphs),
            (PROBE_GROUP_BY, ShapeKind::ProbeGroupBy),
            (PROBE_BIND, ShapeKind::ProbeBind),
            (PROBE_ORDER_BY_RAND, ShapeKind::ProbeOrderByRand),
        ];
        for (q, kind) in probes {
            assert_eq!(recognize(q).unwrap().kind, kind, "{q}");
        }
    }

    #[test]
    fn rejects_other_queries() {
        assert!(recognize("SELECT * WHERE { ?s ?p ?o }").is_none());
        assert!(recognize("ASK { ?s ?p ?o }").is_none());
        assert!(recognize("").is_none());
    }

    #[test]
    fn shape_names_round_trip() {
        for (kind, name) in NAMES {
            assert_eq!(name.parse::<ShapeKind>().unwrap(), kind);
            assert_eq!(kind.to_string(), name);
        }
    }
}
