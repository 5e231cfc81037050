use std::collections::BTreeSet;
use std::time::Duration;

use lodprof_core::extract::{
    extract_all, extract_endpoint, ExtractError, ExtractOptions, PropertyKind, Range,
};
use lodprof_core::simulator::{serve, Behavior, FaultScript, FaultTarget, FixtureStore, ShapeKind};
use lodprof_core::sparql::{
    CapabilityProfile, EndpointDescriptor, RetryPolicy, SamplingOptions, SparqlClient,
};
use lodprof_core::term::{Term, RDF_TYPE, XSD_FLOAT};

const G: &str = "http://bio2rdf.org/drugbank_resource:bio2rdf.dataset.drugbank.R3";
const V: &str = "http://bio2rdf.org/drugbank_vocabulary:";

fn client() -> SparqlClient {
    SparqlClient::with_retry_policy(RetryPolicy {
        base: Duration::from_millis(5),
        cap: Duration::from_millis(20),
    })
}

fn endpoint(url: &str) -> EndpointDescriptor {
    EndpointDescriptor::new("drugbank", url)
        .unwrap()
        .with_timeout(Duration::from_secs(5))
        .with_politeness_delay(Duration::ZERO)
        .with_max_retries(1)
}

fn drugbank_store() -> FixtureStore {
    let mut s = FixtureStore::new();
    let v = |l: &str| format!("{V}{l}");
    let weights = ["52221.1", "56345.0", "57530.0"];
    for (i, w) in ["DB03536", "DB00619", "DB00945"].iter().zip(weights) {
        let drug = Term::iri(format!("http://bio2rdf.org/drugbank:{i}"));
        s.insert(G, drug.clone(), RDF_TYPE, Term::iri(v("Drug")));
        s.insert(
            G,
            drug.clone(),
            v("molecular-weight"),
            Term::typed(w, XSD_FLOAT),
        );
        s.insert(
            G,
            drug,
            v("target"),
            Term::iri("http://bio2rdf.org/drugbank:BE0000059"),
        );
    }
    s.insert(
        G,
        Term::iri("http://bio2rdf.org/drugbank:BE0000059"),
        RDF_TYPE,
        Term::iri(v("Target")),
    );
    s
}

#[test]
fn drug_fragment_has_listing_shape() {
    let sim = serve(drugbank_store(), FaultScript::new(), 0).unwrap();
    let out =
        extract_endpoint(&client(), &endpoint(&sim.url()), &ExtractOptions::default()).unwrap();
    let fragment = &out[G];
    let drug = fragment.class(&format!("{V}Drug")).unwrap();
    assert_eq!(drug.count, 3);
    assert_eq!(drug.sample_instances.len(), 3);
    assert_eq!(fragment.class(&format!("{V}Target")).unwrap().count, 1);

    let target = fragment
        .property_realizations
        .iter()
        .find(|r| r.property == format!("{V}target"))
        .unwrap();
    assert_eq!(target.domain, format!("{V}Drug"));
    assert_eq!(target.kind, PropertyKind::Object);
    assert_eq!(target.range, Range::Class(format!("{V}Target")));
    assert_eq!(target.count, 3);

    let mw = fragment
        .property_realizations
        .iter()
        .find(|r| r.property == format!("{V}molecular-weight"))
        .unwrap();
    assert_eq!(mw.kind, PropertyKind::Data);
    assert_eq!(mw.range, Range::Datatype(XSD_FLOAT.into()));
    assert_eq!(mw.summary.inferred_datatype.as_deref(), Some(XSD_FLOAT));
    assert_eq!(mw.sample_assertion_values.len(), 3);
    assert!(fragment
        .property_realizations
        .iter()
        .all(|r| r.property != RDF_TYPE));
    assert!(fragment.issues.is_empty());
}

#[test]
fn untyped_graph_has_no_classes() {
    let mut s = FixtureStore::new();
    s.insert(
        "http://ex.org/g",
        Term::iri("http://ex.org/a"),
        "http://ex.org/p",
        Term::literal("x"),
    );
    let sim = serve(s, FaultScript::new(), 0).unwrap();
    let out =
        extract_endpoint(&client(), &endpoint(&sim.url()), &ExtractOptions::default()).unwrap();
    assert_eq!(out.len(), 1);
    assert!(out["http://ex.org/g"].classes.is_empty());
}

fn big_class_store() -> FixtureStore {
    let mut s = FixtureStore::new();
    for i in 0..5000 {
        s.insert(
            "http://ex.org/g",
            Term::iri(format!("http://ex.org/i{i}")),
            RDF_TYPE,
            Term::iri("http://ex.org/Big"),
        );
    }
    s
}

#[test]
fn large_class_sample_is_exact_size_and_distinct() {
    let sim = serve(big_class_store(), FaultScript::new(), 0).unwrap();
    let mut ep = endpoint(&sim.url());
    for profile in [CapabilityProfile::FULL, CapabilityProfile::MINIMAL] {
        ep = ep.with_capability(profile);
        let out = extract_endpoint(&client(), &ep, &ExtractOptions::default()).unwrap();
        let class = out["http://ex.org/g"].class("http://ex.org/Big").unwrap();
        assert_eq!(class.count, 5000);
        assert_eq!(class.sample_instances.len(), 2000);
        let distinct: BTreeSet<_> = class.sample_instances.iter().collect();
        assert_eq!(distinct.len(), 2000);
        assert!(class
            .sample_instances
            .iter()
            .all(|t| t.as_iri().is_some_and(|i| i.starts_with("http://ex.org/i"))));
    }
}

#[test]
fn same_seed_same_fragments() {
    let sim = serve(big_class_store(), FaultScript::new(), 0).unwrap();
    let ep = endpoint(&sim.url()).with_capability(CapabilityProfile::MINIMAL);
    let opts = ExtractOptions {
        sampling: SamplingOptions {
            sample_n: 100,
            seed: 42,
        },
        ..Default::default()
    };
    let a = extract_endpoint(&client(), &ep, &opts).unwrap();
    let b = extract_endpoint(&client(), &ep, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn full_and_fallback_paths_agree() {
    let sim = serve(drugbank_store(), FaultScript::new(), 0).unwrap();
    let ep = endpoint(&sim.url());
    let full = extract_endpoint(
        &client(),
        &ep.clone().with_capability(CapabilityProfile::FULL),
        &ExtractOptions::default(),
    )
    .unwrap();
    let fallback = extract_endpoint(
        &client(),
        &ep.with_capability(CapabilityProfile::MINIMAL),
        &ExtractOptions::default(),
    )
    .unwrap();
    assert_eq!(full, fallback);
}

#[test]
fn failing_subquery_is_recorded_not_fatal() {
    let script = FaultScript::new()
        .rule(FaultTarget::Shape(ShapeKind::Sq5), Behavior::HttpError(400))
        .unwrap();
    let sim = serve(drugbank_store(), script, 0).unwrap();
    let out =
        extract_endpoint(&client(), &endpoint(&sim.url()), &ExtractOptions::default()).unwrap();
    let fragment = &out[G];
    assert_eq!(fragment.classes.len(), 2);
    assert_eq!(fragment.property_realizations.len(), 2);
    assert!(fragment
        .property_realizations
        .iter()
        .all(|r| r.error.is_some()));
    assert_eq!(fragment.issues.len(), 2);
}

#[test]
fn class_cap_flags_smallest_classes() {
    let sim = serve(drugbank_store(), FaultScript::new(), 0).unwrap();
    let opts = ExtractOptions {
        class_cap: 1,
        ..Default::default()
    };
    let out = extract_endpoint(&client(), &endpoint(&sim.url()), &opts).unwrap();
    let fragment = &out[G];
    let target = fragment.class(&format!("{V}Target")).unwrap();
    assert!(target.mismatch_suspect);
    assert!(target.sample_instances.is_empty());
    assert!(
        !fragment
            .class(&format!("{V}Drug"))
            .unwrap()
            .mismatch_suspect
    );
}

#[test]
fn unusable_endpoint_is_reported() {
    let script = FaultScript::new()
        .rule(FaultTarget::Any, Behavior::HttpError(400))
        .unwrap();
    let sim = serve(drugbank_store(), script, 0).unwrap();
    let err =
        extract_endpoint(&client(), &endpoint(&sim.url()), &ExtractOptions::default()).unwrap_err();
    assert!(matches!(err, ExtractError::EndpointUnusable { .. }));
}

#[test]
fn several_endpoints_in_parallel() {
    let a = serve(drugbank_store(), FaultScript::new(), 0).unwrap();
    let b = serve(big_class_store(), FaultScript::new(), 0).unwrap();
    let eps = vec![
        EndpointDescriptor::new("a", a.url())
            .unwrap()
            .with_politeness_delay(Duration::ZERO),
        EndpointDescriptor::new("b", b.url())
            .unwrap()
            .with_politeness_delay(Duration::ZERO),
    ];
    let out = extract_all(&client(), &eps, &ExtractOptions::default(), 4);
    assert_eq!(out.len(), 2);
    assert!(out["a"].as_ref().unwrap().contains_key(G));
    assert!(out["b"].as_ref().unwrap().contains_key("http://ex.org/g"));
}

#[test]
fn fragment_json_round_trips() {
    let sim = serve(drugbank_store(), FaultScript::new(), 0).unwrap();
    let out =
        extract_endpoint(&client(), &endpoint(&sim.url()), &ExtractOptions::default()).unwrap();
    let f = &out[G];
    let json = f.to_json();
    assert!(json.contains("\"sample_instances\""));
    assert!(json.contains("\"sample_assertion_values\""));
    assert_eq!(
        &lodprof_core::extract::SchemaFragment::from_json(&json).unwrap(),
        f
    );
}
