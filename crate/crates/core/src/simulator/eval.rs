//! Direct evaluation of recognized shapes over a [`FixtureStore`].

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::shapes::{Shape, ShapeKind};
use super::store::FixtureStore;
use crate::sparql::{Binding, QueryResult};
use crate::term::{Term, RDFS_LABEL, RDF_TYPE, SKOS_PREF_LABEL, XSD_INTEGER};

#[derive(Debug, Default)]
struct GraphIndex {
    /// subject → (predicate, object), in store order
    by_subject: BTreeMap<Term, Vec<(String, Term)>>,
    /// class IRI → typed subjects
    instances: BTreeMap<String, BTreeSet<Term>>,
    /// subject → its rdf:type objects
    types: BTreeMap<Term, BTreeSet<Term>>,
}

/// Per-graph indexes built once per served store.
#[derive(Debug)]
pub struct Evaluator {
    graphs: BTreeMap<String, GraphIndex>,
}

fn row<const N: usize>(pairs: [(&str, Term); N]) -> Binding {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn count_literal(n: usize) -> Term {
    Term::typed(n.to_string(), XSD_INTEGER)
}

fn result(vars: &[&str], rows: Vec<Binding>) -> QueryResult {
    let mut out = QueryResult::new(vars.iter().map(|v| v.to_string()).collect());
    out.rows = rows;
    out
}

fn page<T>(items: Vec<T>, limit: Option<usize>, offset: Option<usize>) -> Vec<T> {
    let offset = offset.unwrap_or(0);
    let limit = limit.unwrap_or(usize::MAX);
    items.into_iter().skip(offset).take(limit).collect()
}

impl Evaluator {
    pub fn new(store: &FixtureStore) -> Self {
        let mut graphs = BTreeMap::new();
        for (g, triples) in &store.graphs {
            let mut idx = GraphIndex::default();
            for t in triples {
                idx.by_subject
                    .entry(t.subject.clone())
                    .or_default()
                    .push((t.predicate.clone(), t.object.clone()));
                if t.predicate == RDF_TYPE {
                    if let Some(class) = t.object.as_iri() {
                        idx.instances
                            .entry(class.to_string())
                            .or_default()
                            .insert(t.subject.clone());
                    }
                    idx.types
                        .entry(t.subject.clone())
                        .or_default()
                        .insert(t.object.clone());
                }
            }
            graphs.insert(g.clone(), idx);
        }
        Evaluator { graphs }
    }

    fn graph(&self, shape: &Shape) -> Option<&GraphIndex> {
        shape.graph.as_deref().and_then(|g| self.graphs.get(g))
    }

    fn instances<'a>(&'a self, shape: &Shape) -> impl Iterator<Item = &'a Term> + 'a {
        let set = self.graph(shape).and_then(|g| {
            g.instances
                .get(shape.concept.as_deref().unwrap_or_default())
        });
        set.into_iter().flatten()
    }

    /// Every triple of the default graph, which is the union of all graphs.
    fn all_triples(&self) -> impl Iterator<Item = (&Term, &String, &Term)> + '_ {
        self.graphs.values().flat_map(|g| {
            g.by_subject
                .iter()
                .flat_map(|(s, po)| po.iter().map(move |(p, o)| (s, p, o)))
        })
    }

    /// Answers `shape`. `rand_seed` drives `ORDER BY RAND()`.
    pub fn evaluate(&self, shape: &Shape, rand_seed: u64) -> QueryResult {
        let mut rng = ChaCha8Rng::seed_from_u64(rand_seed);
        match shape.kind {
            ShapeKind::ProbeBasic => {
                let rows = self
                    .all_triples()
                    .take(1)
                    .map(|(s, _, _)| row([("s", s.clone())]))
                    .collect();
                result(&["s"], rows)
            }
            ShapeKind::ProbeNamedGraphs => {
                let rows = self
                    .graphs
                    .iter()
                    .filter(|(_, g)| !g.by_subject.is_empty())
                    .take(1)
                    .map(|(g, _)| row([("g", Term::iri(g))]))
                    .collect();
                result(&["g"], rows)
            }
            ShapeKind::ProbeGroupBy => {
                let mut counts: BTreeMap<&String, usize> = BTreeMap::new();
                for (_, p, _) in self.all_triples() {
                    *counts.entry(p).or_default() += 1;
                }
                let rows = counts
                    .into_iter()
                    .take(1)
                    .map(|(p, n)| row([("p", Term::iri(p)), ("n", count_literal(n))]))
                    .collect();
                result(&["p", "n"], rows)
            }
            ShapeKind::ProbeBind => {
                let rows = self
                    .all_triples()
                    .take(1)
                    .map(|(s, _, o)| {
                        let mut r = row([("s", s.clone())]);
                        if let Some(dt) = o.sparql_datatype() {
                            r.insert("t".into(), Term::iri(dt));
                        }
                        r
                    })
                    .collect();
                result(&["s", "t"], rows)
            }
            ShapeKind::ProbeOrderByRand => {
                let subjects: Vec<&Term> = self.all_triples().map(|(s, _, _)| s).collect();
                let rows = subjects
                    .choose(&mut rng)
                    .map(|s| vec![row([("s", (*s).clone())])])
                    .unwrap_or_default();
                result(&["s"], rows)
            }
            ShapeKind::Sq1 | ShapeKind::Sq1Fallback => {
                let rows = self
                    .graphs
                    .iter()
                    .filter(|(_, g)| {
                        shape.kind == ShapeKind::Sq1Fallback || !g.by_subject.is_empty()
                    })
                    .map(|(g, _)| row([("g", Term::iri(g))]))
                    .collect();
                result(&["g"], rows)
            }
            ShapeKind::Sq2 => {
                let mut counts: Vec<(Term, usize)> = self
                    .graph(shape)
                    .map(|g| {
                        let mut by_type: BTreeMap<&Term, usize> = BTreeMap::new();
                        for types in g.types.values() {
                            for t in types {
                                *by_type.entry(t).or_default() += 1;
                            }
                        }
                        by_type.into_iter().map(|(t, n)| (t.clone(), n)).collect()
                    })
                    .unwrap_or_default();
                counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                let rows = counts
                    .into_iter()
                    .map(|(c, n)| row([("Concept", c), ("cCount", count_literal(n))]))
                    .collect();
                result(&["Concept", "cCount"], rows)
            }
            ShapeKind::Sq2Fallback => {
                let mut pairs = Vec::new();
                if let Some(g) = self.graph(shape) {
                    for (x, types) in &g.types {
                        for t in types {
                            pairs.push(row([("x", x.clone()), ("Concept", t.clone())]));
                        }
                    }
                }
                result(&["x", "Concept"], page(pairs, shape.limit, shape.offset))
            }
            ShapeKind::Sq3 => {
                type Key = (Term, Option<Term>, Option<Term>);
                let mut counts: BTreeMap<Key, usize> = BTreeMap::new();
                self.for_each_sq3_solution(shape, |_, p, o, c| {
                    let val_type = o.sparql_datatype().map(Term::iri);
                    *counts
                        .entry((Term::iri(p), c.cloned(), val_type))
                        .or_default() += 1;
                });
                let mut sorted: Vec<_> = counts.into_iter().collect();
                sorted.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                let rows = sorted
                    .into_iter()
                    .map(|((p, c, val_type), n)| {
                        let mut r = row([("p", p), ("count", count_literal(n))]);
                        if let Some(c) = c {
                            r.insert("c".into(), c);
                        }
                        if let Some(v) = val_type {
                            r.insert("valType".into(), v);
                        }
                        r
                    })
                    .collect();
                result(&["p", "c", "count", "valType"], rows)
            }
            ShapeKind::Sq3Fallback => {
                let mut rows = Vec::new();
                self.for_each_sq3_solution(shape, |x, p, o, c| {
                    let mut r = row([("x", x.clone()), ("p", Term::iri(p)), ("o", o.clone())]);
                    if let Some(c) = c {
                        r.insert("c".into(), c.clone());
                    }
                    rows.push(r);
                });
                result(&["x", "p", "o", "c"], page(rows, shape.limit, shape.offset))
            }
            ShapeKind::Sq4 | ShapeKind::Sq4Fallback => {
                let mut xs: Vec<Binding> = self
                    .instances(shape)
                    .map(|x| row([("x", x.clone())]))
                    .collect();
                if shape.kind == ShapeKind::Sq4 {
                    xs.shuffle(&mut rng);
                }
                result(&["x"], page(xs, shape.limit, shape.offset))
            }
            ShapeKind::Sq5 | ShapeKind::Sq5Fallback => {
                let property = shape.property.as_deref().unwrap_or_default();
                let mut xs = Vec::new();
                if let Some(g) = self.graph(shape) {
                    for c in self.instances(shape) {
                        for (p, o) in g.by_subject.get(c).into_iter().flatten() {
                            if p == property {
                                xs.push(row([("x", o.clone())]));
                            }
                        }
                    }
                }
                if shape.kind == ShapeKind::Sq5 {
                    xs.shuffle(&mut rng);
                }
                result(&["x"], page(xs, shape.limit, shape.offset))
            }
            ShapeKind::Label => {
                let iri = Term::iri(shape.iri.as_deref().unwrap_or_default());
                let mut found = None;
                for predicate in [RDFS_LABEL, SKOS_PREF_LABEL] {
                    found = self
                        .graphs
                        .values()
                        .filter_map(|g| g.by_subject.get(&iri))
                        .flatten()
                        .filter(|(p, o)| p == predicate && o.is_literal())
                        .map(|(_, o)| o.clone())
                        .min();
                    if found.is_some() {
                        break;
                    }
                }
                let rows = found.map(|l| row([("label", l)])).into_iter().collect();
                result(&["label"], rows)
            }
        }
    }

    /// Solutions of `?x rdf:type C ; ?p ?o . OPTIONAL { ?o rdf:type ?c }`.
    fn for_each_sq3_solution(
        &self,
        shape: &Shape,
        mut f: impl FnMut(&Term, &str, &Term, Option<&Term>),
    ) {
        let Some(g) = self.graph(shape) else {
            return;
        };
        for x in self.instances(shape) {
            for (p, o) in g.by_subject.get(x).into_iter().flatten() {
                match g.types.get(o) {
                    Some(types) if !o.is_literal() => {
                        for c in types {
                            f(x, p, o, Some(c));
                        }
                    }
                    _ => f(x, p, o, None),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::shapes::recognize;
    use crate::sparql::templates::{render_canonical, render_fallback};
    use crate::sparql::{TemplateId, TemplateParams};

    fn store() -> FixtureStore {
        FixtureStore::parse(concat!(
            "<http://e/a1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://e/A> <http://e/g> .\n",
            "<http://e/a2> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://e/A> <http://e/g> .\n",
            "<http://e/b1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://e/B> <http://e/g> .\n",
            "<http://e/a1> <http://e/name> \"x\" <http://e/g> .\n",
            "<http://e/a2> <http://e/name> \"y\"@en <http://e/g> .\n",
            "<http://e/a1> <http://e/rel> <http://e/b1> <http://e/g> .\n",
        ))
        .unwrap()
    }

    fn eval(query: &str) -> QueryResult {
        Evaluator::new(&store()).evaluate(&recognize(query).unwrap(), 1)
    }

    #[test]
    fn empty_store_has_no_graphs() {
        let ev = Evaluator::new(&FixtureStore::new());
        let sq1 =
            recognize(&render_canonical(TemplateId::Sq1, &TemplateParams::default(), 1).unwrap())
                .unwrap();
        assert!(ev.evaluate(&sq1, 0).is_empty());
    }

    #[test]
    fn one_graph_two_classes() {
        let sq1 = eval(&render_canonical(TemplateId::Sq1, &TemplateParams::default(), 1).unwrap());
        assert_eq!(sq1.len(), 1);
        let sq2 = eval(
            &render_canonical(TemplateId::Sq2, &TemplateParams::graph("http://e/g"), 1).unwrap(),
        );
        assert_eq!(sq2.len(), 2);
        assert_eq!(sq2.rows[0]["Concept"], Term::iri("http://e/A"));
        assert_eq!(sq2.rows[0]["cCount"], count_literal(2));
        assert_eq!(sq2.rows[1]["cCount"], count_literal(1));
    }

    #[test]
    fn sq3_groups_by_property_type_and_datatype() {
        let p = TemplateParams::graph("http://e/g").concept("http://e/A");
        let r = eval(&render_canonical(TemplateId::Sq3, &p, 1).unwrap());
        // rdf:type (2), name/xsd:string, name/rdf:langString, rel/B
        assert_eq!(r.len(), 4);
        assert_eq!(r.rows[0]["p"], Term::iri(RDF_TYPE));
        assert_eq!(r.rows[0]["count"], count_literal(2));
        let rel = r
            .rows
            .iter()
            .find(|row| row["p"] == Term::iri("http://e/rel"))
            .unwrap();
        assert_eq!(rel["c"], Term::iri("http://e/B"));
        assert!(!rel.contains_key("valType"));
    }

    #[test]
    fn paging_covers_listing_once() {
        let p = TemplateParams::graph("http://e/g").concept("http://e/A");
        let full = eval(&render_fallback(TemplateId::Sq3, &p, 100, 0).unwrap());
        let mut paged = Vec::new();
        for off in 0..full.len() {
            paged.extend(eval(&render_fallback(TemplateId::Sq3, &p, 1, off).unwrap()).rows);
        }
        assert_eq!(paged, full.rows);
    }

    #[test]
    fn rand_order_depends_on_seed_only() {
        let ev = Evaluator::new(&store());
        let p = TemplateParams::graph("http://e/g").concept("http://e/A");
        let shape = recognize(&render_canonical(TemplateId::Sq4, &p, 10).unwrap()).unwrap();
        assert_eq!(ev.evaluate(&shape, 5), ev.evaluate(&shape, 5));
        assert_eq!(ev.evaluate(&shape, 5).len(), 2);
    }
}
