use std::time::Duration;

use lodprof_core::simulator::{
    serve, Behavior, FaultScript, FaultTarget, FixtureStore, ShapeKind, SimulatorError,
};
use lodprof_core::sparql::{
    CapabilityProfile, ClientError, EndpointDescriptor, RetryPolicy, SamplingOptions, SparqlClient,
    TemplateId, TemplateParams, PROBE_BASIC,
};
use lodprof_core::term::{Term, XSD_INTEGER};

const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

fn small_store() -> FixtureStore {
    let mut s = FixtureStore::new();
    for i in 0..3 {
        s.insert(
            "http://ex.org/g",
            Term::iri(format!("http://ex.org/a{i}")),
            TYPE,
            Term::iri("http://ex.org/A"),
        );
    }
    s.insert(
        "http://ex.org/g",
        Term::iri("http://ex.org/b0"),
        TYPE,
        Term::iri("http://ex.org/B"),
    );
    s.insert(
        "http://ex.org/g",
        Term::iri("http://ex.org/a0"),
        "http://ex.org/w",
        Term::typed("1.5", "http://www.w3.org/2001/XMLSchema#float"),
    );
    s
}

fn fast_client() -> SparqlClient {
    SparqlClient::with_retry_policy(RetryPolicy {
        base: Duration::from_millis(10),
        cap: Duration::from_millis(40),
    })
}

fn endpoint(url: &str) -> EndpointDescriptor {
    EndpointDescriptor::new("sim", url)
        .unwrap()
        .with_timeout(Duration::from_millis(400))
        .with_politeness_delay(Duration::ZERO)
}

#[test]
fn empty_store_sq1_is_empty() {
    let sim = serve(FixtureStore::new(), FaultScript::new(), 0).unwrap();
    let client = fast_client();
    let r = client
        .execute_template(
            &endpoint(&sim.url()),
            TemplateId::Sq1,
            &TemplateParams::default(),
            SamplingOptions::default(),
        )
        .unwrap();
    assert!(r.is_empty());
}

#[test]
fn sq2_counts_over_the_wire() {
    let sim = serve(small_store(), FaultScript::new(), 0).unwrap();
    let client = fast_client();
    let ep = endpoint(&sim.url());
    let graphs = client
        .execute_template(
            &ep,
            TemplateId::Sq1,
            &TemplateParams::default(),
            SamplingOptions::default(),
        )
        .unwrap();
    assert_eq!(graphs.len(), 1);
    let r = client
        .execute_template(
            &ep,
            TemplateId::Sq2,
            &TemplateParams::graph("http://ex.org/g"),
            SamplingOptions::default(),
        )
        .unwrap();
    assert_eq!(r.len(), 2);
    assert_eq!(r.rows[0]["cCount"], Term::typed("3", XSD_INTEGER));
    assert_eq!(r.rows[1]["cCount"], Term::typed("1", XSD_INTEGER));
}

#[test]
fn scripted_timeouts_then_success() {
    let script = FaultScript::new()
        .rule(
            FaultTarget::Shape(ShapeKind::Sq2),
            Behavior::TimeoutNTimes(2),
        )
        .unwrap()
        .with_stall(Duration::from_millis(800));
    let sim = serve(small_store(), script, 0).unwrap();
    let client = fast_client();
    let ep = endpoint(&sim.url()).with_max_retries(3);
    let r = client
        .execute_template(
            &ep,
            TemplateId::Sq2,
            &TemplateParams::graph("http://ex.org/g"),
            SamplingOptions::default(),
        )
        .unwrap();
    assert_eq!(r.len(), 2);
    let log = sim.request_log();
    let sq2: Vec<_> = log.iter().filter(|e| e.template_id == "SQ2").collect();
    assert_eq!(sq2.len(), 3);
    assert_eq!(
        sq2.iter().map(|e| e.status).collect::<Vec<_>>(),
        vec![0, 0, 200]
    );
}

#[test]
fn exhausted_timeouts_fall_back_to_paged_form() {
    let script = FaultScript::new()
        .rule(
            FaultTarget::Shape(ShapeKind::Sq2),
            Behavior::TimeoutNTimes(5),
        )
        .unwrap()
        .with_stall(Duration::from_millis(600));
    let sim = serve(small_store(), script, 0).unwrap();
    let ep = endpoint(&sim.url()).with_max_retries(1);
    let r = fast_client()
        .execute_template(
            &ep,
            TemplateId::Sq2,
            &TemplateParams::graph("http://ex.org/g"),
            SamplingOptions::default(),
        )
        .unwrap();
    assert_eq!(r.rows[0]["Concept"], Term::iri("http://ex.org/A"));
    assert!(sim
        .request_log()
        .iter()
        .any(|e| e.template_id == "SQ2-fallback"));
}

#[test]
fn rejected_keywords_shape_the_capability_profile() {
    let script = FaultScript::new()
        .reject("GROUP BY")
        .unwrap()
        .reject("RAND")
        .unwrap();
    let sim = serve(small_store(), script, 0).unwrap();
    let profile = fast_client()
        .detect_capabilities(&endpoint(&sim.url()))
        .unwrap();
    assert!(!profile.supports_group_by);
    assert!(!profile.supports_order_by_rand);
    assert!(profile.supports_bind);
    assert!(profile.supports_named_graphs);
}

#[test]
fn full_simulator_reports_full_profile() {
    let sim = serve(small_store(), FaultScript::new(), 0).unwrap();
    let profile = fast_client()
        .detect_capabilities(&endpoint(&sim.url()))
        .unwrap();
    assert_eq!(profile, CapabilityProfile::FULL);
}

#[test]
fn other_queries_get_400() {
    let sim = serve(small_store(), FaultScript::new(), 0).unwrap();
    let err = fast_client()
        .execute(&endpoint(&sim.url()), "SELECT * WHERE { ?s ?p ?o }")
        .unwrap_err();
    assert!(
        matches!(err, ClientError::EndpointError { status: 400, .. }),
        "{err}"
    );
}

#[test]
fn scripted_http_errors_are_retried_when_5xx() {
    let script = FaultScript::new()
        .rule(FaultTarget::Any, Behavior::HttpError(503))
        .unwrap();
    let sim = serve(small_store(), script, 0).unwrap();
    let err = fast_client()
        .execute(&endpoint(&sim.url()).with_max_retries(2), PROBE_BASIC)
        .unwrap_err();
    assert!(matches!(
        err,
        ClientError::EndpointError { status: 503, .. }
    ));
    assert_eq!(sim.request_log().len(), 3);
}

#[test]
fn politeness_delay_separates_requests() {
    let sim = serve(small_store(), FaultScript::new(), 0).unwrap();
    let delay = Duration::from_millis(120);
    let ep = endpoint(&sim.url()).with_politeness_delay(delay);
    let client = fast_client();
    for _ in 0..4 {
        client.execute(&ep, PROBE_BASIC).unwrap();
    }
    let log = sim.request_log();
    assert_eq!(log.len(), 4);
    for pair in log.windows(2) {
        // The client's clock starts after it has read the response, which is
        // after the server finished writing it.
        assert!(pair[1].received.duration_since(pair[0].finished) >= delay);
    }
    let tsv = sim.request_log_tsv();
    assert!(tsv.starts_with("timestamp_ms\ttemplate_id\tparams\n"));
    assert_eq!(tsv.lines().count(), 5);
}

#[test]
fn port_in_use_is_reported() {
    let sim = serve(FixtureStore::new(), FaultScript::new(), 0).unwrap();
    match serve(FixtureStore::new(), FaultScript::new(), sim.port()) {
        Err(SimulatorError::PortInUse(p)) => assert_eq!(p, sim.port()),
        Err(other) => panic!("unexpected error {other}"),
        Ok(_) => panic!("second bind succeeded"),
    }
}

#[test]
fn long_queries_go_through_post() {
    let sim = serve(small_store(), FaultScript::new(), 0).unwrap();
    let long_graph = format!("http://ex.org/{}", "x".repeat(2100));
    let r = fast_client()
        .execute_template(
            &endpoint(&sim.url()),
            TemplateId::Sq2,
            &TemplateParams::graph(long_graph),
            SamplingOptions::default(),
        )
        .unwrap();
    assert!(r.is_empty());
    assert_eq!(sim.request_log()[0].template_id, "SQ2");
}
