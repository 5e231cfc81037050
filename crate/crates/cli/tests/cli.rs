use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Duration;

use lodprof_cli::start_simulator;
use lodprof_core::simulator::SimulatorHandle;

fn cloud(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/cloud")
        .join(file)
}

fn simulator(file: &str, faults: &[String]) -> SimulatorHandle {
    start_simulator(&cloud(file), 0, faults, Duration::ZERO, 42).unwrap()
}

fn lodprof(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lodprof"))
        .current_dir(dir)
        .env_remove("LODPROF_OUTPUT_DIR")
        .env_remove("LODPROF_SEED")
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, endpoints: &[(&str, String)]) {
    let mut text = String::from("seed = 42\nretry_base_ms = 10\nretry_cap_ms = 20\n");
    for (id, url) in endpoints {
        text.push_str(&format!(
            "[[endpoint]]\nid = \"{id}\"\nurl = \"{url}\"\ntimeout_secs = 5\nmax_retries = 0\npoliteness_ms = 0\n"
        ));
    }
    std::fs::write(dir.join("lodprof.toml"), text).unwrap();
}

/// The last stderr line; warnings may precede it.
fn stderr(o: &Output) -> String {
    let text = String::from_utf8_lossy(&o.stderr);
    text.lines().last().unwrap_or_default().to_string()
}

#[test]
fn probe_writes_capabilities() {
    let sim = simulator("mold.nq", &[]);
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), &[("mold", sim.url())]);
    let o = lodprof(dir.path(), &["probe"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let tsv = std::fs::read_to_string(dir.path().join("lodprof-out/capabilities.tsv")).unwrap();
    let row: Vec<&str> = tsv.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row[0], "mold");
    assert_eq!(&row[2..], ["true", "true", "true", "true", ""]);
}

#[test]
fn restricted_endpoint_probes_as_restricted() {
    let sim = simulator("mold.nq", &["any=reject:GROUP BY".into()]);
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), &[("mold", sim.url())]);
    assert!(lodprof(dir.path(), &["probe"]).status.success());
    let tsv = std::fs::read_to_string(dir.path().join("lodprof-out/capabilities.tsv")).unwrap();
    let row: Vec<&str> = tsv.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row[3], "false");
}

#[test]
fn bad_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("lodprof.toml"), "sample_n = 0\n").unwrap();
    let o = lodprof(dir.path(), &["probe"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error\tconfig\t"), "{}", stderr(&o));

    let o = lodprof(dir.path(), &["-c", "missing.toml", "merge"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error\tconfig\t"));
}

#[test]
fn unreachable_endpoints_fail_in_sparql() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), &[("gone", "http://127.0.0.1:9/sparql".into())]);
    let o = lodprof(dir.path(), &["probe"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error\tsparql\t"), "{}", stderr(&o));
}

#[test]
fn stages_chain_through_the_output_directory() {
    let sim = simulator("ebi.nq", &[]);
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), &[("ebi", sim.url())]);
    let out = dir.path().join("elsewhere");
    let out_arg = out.to_str().unwrap();
    for stage in ["extract", "merge", "reuse", "report"] {
        let o = lodprof(dir.path(), &["--output-dir", out_arg, stage]);
        assert!(o.status.success(), "{stage}: {}", stderr(&o));
    }
    for artifact in [
        "fragments/ebi.json",
        "schema_graph.json",
        "stats.tsv",
        "reuse_summary.tsv",
        "report.txt",
    ] {
        assert!(out.join(artifact).is_file(), "{artifact}");
    }
    assert!(!dir.path().join("lodprof-out").exists());

    // No embeddings configured.
    let o = lodprof(dir.path(), &["--output-dir", out_arg, "communities"]);
    assert!(
        stderr(&o).starts_with("error\tsimilarity\t"),
        "{}",
        stderr(&o)
    );
}
