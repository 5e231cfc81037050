use lodprof_core::extract::{summarize, ClassProfile, Range, Realization, SchemaFragment};
use lodprof_core::schema::{merge, LslodSchemaGraph, NodeKind};
use lodprof_core::term::Term;
use proptest::prelude::*;

fn arb_fragment() -> impl Strategy<Value = (String, SchemaFragment)> {
    let class = 0..4u8;
    let prop = 0..4u8;
    let range = prop_oneof![
        (0..4u8).prop_map(|c| Range::Class(format!("http://x/C{c}"))),
        (0..2u8).prop_map(|d| Range::Datatype(format!("http://www.w3.org/2001/XMLSchema#t{d}"))),
        Just(Range::Anonymous),
    ];
    (
        0..3u8,
        0..2u8,
        prop::collection::btree_map(class, 1..50u64, 0..4),
        prop::collection::vec((0..4u8, prop, range, 1..20u64), 0..5),
    )
        .prop_map(|(src, graph, classes, reals)| {
            let mut f = SchemaFragment::new(format!("ep{src}"), format!("http://g/{src}/{graph}"));
            for (c, n) in &classes {
                let sample: Vec<Term> = (0..(*n).min(3))
                    .map(|i| Term::iri(format!("http://i/{c}/{i}")))
                    .collect();
                f.classes.push(ClassProfile {
                    uri: format!("http://x/C{c}"),
                    count: *n,
                    summary: summarize(&sample),
                    sample_instances: sample,
                    mismatch_suspect: false,
                    error: None,
                });
            }
            let mut seen = std::collections::BTreeSet::new();
            for (d, p, range, n) in reals {
                if !seen.insert((d, p, range.clone())) {
                    continue;
                }
                f.property_realizations.push(Realization {
                    domain: format!("http://x/C{d}"),
                    property: format!("http://x/p{p}"),
                    kind: range.property_kind(),
                    range,
                    count: n,
                    sample_assertion_values: vec![],
                    summary: summarize(&[]),
                    error: None,
                });
            }
            (format!("s{src}"), f)
        })
}

fn graph_of(frags: &[(String, SchemaFragment)]) -> LslodSchemaGraph {
    merge(frags.iter().map(|(s, f)| (s.as_str(), f)))
}

proptest! {
    #[test]
    fn merge_is_order_independent(frags in prop::collection::vec(arb_fragment(), 0..6)) {
        let forward = graph_of(&frags);
        let mut reversed = frags.clone();
        reversed.reverse();
        prop_assert_eq!(&forward, &graph_of(&reversed));
    }

    #[test]
    fn merge_is_idempotent_and_associative(frags in prop::collection::vec(arb_fragment(), 1..6)) {
        let once = graph_of(&frags);
        let mut twice = once.clone();
        twice.absorb(&graph_of(&frags));
        prop_assert_eq!(&once, &twice);

        let (left, right) = frags.split_at(frags.len() / 2);
        let mut joined = graph_of(left);
        joined.absorb(&graph_of(right));
        prop_assert_eq!(&once, &joined);
    }

    #[test]
    fn json_round_trip(frags in prop::collection::vec(arb_fragment(), 0..5)) {
        let g = graph_of(&frags);
        prop_assert_eq!(LslodSchemaGraph::from_json(&g.to_json()).unwrap(), g.clone());
        for e in g.edges.values() {
            prop_assert!(g.nodes.contains_key(&e.from));
            prop_assert!(g.nodes.contains_key(&e.to));
            prop_assert!(g.sources.contains_key(&e.source));
            match e.role {
                lodprof_core::schema::EdgeRole::Domain => prop_assert_eq!(e.from.kind, NodeKind::Class),
                lodprof_core::schema::EdgeRole::Range => prop_assert!(matches!(e.to.kind, NodeKind::Class | NodeKind::Datatype)),
            }
        }
    }
}

#[test]
fn exports_have_headers_and_rows() {
    let mut f = SchemaFragment::new("ep", "http://g/1");
    f.classes.push(ClassProfile {
        uri: "http://x/C".into(),
        count: 2,
        sample_instances: vec![],
        summary: summarize(&[]),
        mismatch_suspect: false,
        error: None,
    });
    f.property_realizations.push(Realization {
        domain: "http://x/C".into(),
        property: "http://x/p".into(),
        kind: lodprof_core::extract::PropertyKind::Data,
        range: Range::Datatype("http://www.w3.org/2001/XMLSchema#string".into()),
        count: 2,
        sample_assertion_values: vec![],
        summary: summarize(&[]),
        error: None,
    });
    let g = merge([("s", &f)]);
    assert_eq!(g.classes_tsv().lines().count(), 2);
    assert_eq!(g.data_properties_tsv().lines().count(), 2);
    assert_eq!(g.object_properties_tsv().lines().count(), 1);
    assert_eq!(g.datatypes_tsv().lines().count(), 2);
    let xml = g.to_graphml();
    assert_eq!(xml.matches("<node ").count(), 3);
    assert_eq!(xml.matches("<edge ").count(), 2);
}
