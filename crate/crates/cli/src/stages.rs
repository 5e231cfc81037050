//! Pipeline stages. Each stage reads its inputs from the output directory
//! and overwrites its own artifacts there, so any stage can be re-run alone.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};

use lodprof_core::extract::{extract_all, ExtractOptions, SchemaFragment};
use lodprof_core::reuse::{
    build_link_network, build_reuse_network, schema_elements, source_statistics,
    source_statistics_tsv, ReuseSummary,
};
use lodprof_core::schema::{merge as merge_fragments, GraphRules, LslodSchemaGraph};
use lodprof_core::similarity::{
    build_similarity_network, community_report, load_embeddings, louvain_with_restarts,
    CommunityAssignment, CommunityReport, SimilarityNetwork,
};
use lodprof_core::sparql::{CapabilityProfile, SamplingOptions, SparqlClient};
use lodprof_core::tsv;
use lodprof_core::uri::{
    detect_semantic_mismatch_with_threshold, detect_uri_variants, extract_label, mismatch_tsv,
    variant_groups_tsv, LabelEndpoint, LabeledUri, OriginCatalog,
};

use crate::config::RunConfig;
use crate::error::{CliError, ModuleResult};

pub const CAPABILITIES: &str = "capabilities.tsv";
pub const FRAGMENTS_DIR: &str = "fragments";
pub const EXTRACT_STATUS: &str = "extract_status.tsv";
pub const SCHEMA_GRAPH: &str = "schema_graph.json";
pub const SCHEMA_GRAPHML: &str = "schema_graph.graphml";
pub const STATS: &str = "stats.tsv";
pub const CLASSES: &str = "classes.tsv";
pub const OBJECT_PROPERTIES: &str = "object_properties.tsv";
pub const DATA_PROPERTIES: &str = "data_properties.tsv";
pub const DATATYPES: &str = "datatypes.tsv";
pub const REUSE_SUMMARY: &str = "reuse_summary.tsv";
pub const REUSE_COMPONENTS: &str = "reuse_components.tsv";
pub const SOURCE_STATISTICS: &str = "source_statistics.tsv";
pub const LINK_GRAPHML: &str = "link_network.graphml";
pub const LINK_TSV: &str = "link_network.tsv";
pub const VARIANT_GROUPS: &str = "variant_groups.tsv";
pub const MISMATCH: &str = "mismatch.tsv";
pub const LABELS: &str = "labels.tsv";
pub const SIMILARITY_GRAPHML: &str = "similarity.graphml";
pub const COMMUNITIES_GRAPHML: &str = "communities.graphml";
pub const COMMUNITIES: &str = "communities.tsv";
pub const COMMUNITY_MEMBERS: &str = "community_members.tsv";
pub const MODULARITY: &str = "modularity.tsv";
pub const REPORT: &str = "report.txt";

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let io = |e: std::io::Error| CliError::new("io", format!("{}: {e}", path.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn out(config: &RunConfig, name: &str) -> PathBuf {
    config.output_dir.join(name)
}

fn client(config: &RunConfig) -> SparqlClient {
    SparqlClient::with_retry_policy(config.retry)
}

pub fn fragment_path(config: &RunConfig, endpoint_id: &str) -> PathBuf {
    config
        .output_dir
        .join(FRAGMENTS_DIR)
        .join(format!("{endpoint_id}.json"))
}

pub fn load_catalog(config: &RunConfig) -> Result<OriginCatalog, CliError> {
    match &config.catalog {
        Some(path) => OriginCatalog::load(path).module("uri"),
        None => Ok(OriginCatalog::starter()),
    }
}

pub fn load_graph(config: &RunConfig) -> Result<LslodSchemaGraph, CliError> {
    LslodSchemaGraph::from_json(&read(&out(config, SCHEMA_GRAPH))?).module("schema")
}

/// Probes every endpoint and writes one capability row per endpoint.
/// Fails only when no endpoint could be probed.
pub fn probe(config: &RunConfig) -> Result<BTreeMap<String, CapabilityProfile>, CliError> {
    config.ensure_output_dir()?;
    let client = client(config);
    let mut profiles = BTreeMap::new();
    let mut rows = Vec::new();
    for ep in &config.endpoints {
        match client.detect_capabilities(ep) {
            Ok(p) => {
                rows.push(vec![
                    ep.id.clone(),
                    p.version.to_string(),
                    p.supports_named_graphs.to_string(),
                    p.supports_group_by.to_string(),
                    p.supports_bind.to_string(),
                    p.supports_order_by_rand.to_string(),
                    String::new(),
                ]);
                profiles.insert(ep.id.clone(), p);
            }
            Err(e) => {
                log::warn!("{}: probe failed: {e}", ep.id);
                let mut row = vec![ep.id.clone()];
                row.extend(std::iter::repeat_n(String::new(), 5));
                row.push(e.to_string());
                rows.push(row);
            }
        }
    }
    write_atomic(
        &out(config, CAPABILITIES),
        &tsv::render(
            &[
                "endpoint",
                "version",
                "named_graphs",
                "group_by",
                "bind",
                "order_by_rand",
                "error",
            ],
            rows,
        ),
    )?;
    if profiles.is_empty() && !config.endpoints.is_empty() {
        return Err(CliError::new(
            "sparql",
            "no endpoint answered the capability probes",
        ));
    }
    Ok(profiles)
}

/// Extracts all endpoints into `fragments/<endpoint>.json`. Profiles from
/// an earlier probe are reused; other endpoints are probed on the way.
pub fn extract(
    config: &RunConfig,
    profiles: Option<&BTreeMap<String, CapabilityProfile>>,
) -> Result<usize, CliError> {
    config.ensure_output_dir()?;
    let endpoints: Vec<_> = config
        .endpoints
        .iter()
        .map(|ep| match profiles.and_then(|p| p.get(&ep.id)) {
            Some(p) => ep.clone().with_capability(*p),
            None => ep.clone(),
        })
        .collect();
    let options = ExtractOptions {
        sampling: SamplingOptions {
            sample_n: config.sample_n,
            seed: config.seed,
        },
        class_cap: config.class_cap,
        ..ExtractOptions::default()
    };
    let outcomes = extract_all(&client(config), &endpoints, &options, config.workers);

    let mut rows = Vec::new();
    let mut graphs = 0;
    for (id, outcome) in &outcomes {
        match outcome {
            Ok(fragments) => {
                let json = serde_json::to_string_pretty(fragments).module("extract")?;
                write_atomic(&fragment_path(config, id), &(json + "\n"))?;
                let issues: usize = fragments.values().map(|f| f.issues.len()).sum();
                rows.push(vec![
                    id.clone(),
                    "ok".into(),
                    fragments.len().to_string(),
                    issues.to_string(),
                    String::new(),
                ]);
                graphs += fragments.len();
            }
            Err(e) => {
                log::warn!("{id}: {e}");
                rows.push(vec![
                    id.clone(),
                    "error".into(),
                    "0".into(),
                    "0".into(),
                    e.to_string(),
                ]);
            }
        }
    }
    write_atomic(
        &out(config, EXTRACT_STATUS),
        &tsv::render(&["endpoint", "status", "graphs", "issues", "error"], rows),
    )?;
    if outcomes.values().all(Result::is_err) && !outcomes.is_empty() {
        return Err(CliError::new("extract", "no endpoint could be extracted"));
    }
    Ok(graphs)
}

/// Fragments of every configured endpoint that has been extracted, each
/// tagged with its normalized source id.
pub fn load_fragments(config: &RunConfig) -> Result<Vec<(String, SchemaFragment)>, CliError> {
    let rules = match &config.graph_rules {
        Some(path) => GraphRules::load(path).module("schema")?,
        None => GraphRules::new(),
    };
    let mut tagged = Vec::new();
    for ep in &config.endpoints {
        let path = fragment_path(config, &ep.id);
        if !path.exists() {
            log::warn!("{}: no fragments at {}", ep.id, path.display());
            continue;
        }
        let fragments: BTreeMap<String, SchemaFragment> =
            serde_json::from_str(&read(&path)?).module("extract")?;
        for fragment in fragments.into_values() {
            tagged.push((rules.normalize(&fragment.graph_uri), fragment));
        }
    }
    Ok(tagged)
}

pub fn merge(config: &RunConfig) -> Result<LslodSchemaGraph, CliError> {
    config.ensure_output_dir()?;
    let tagged = load_fragments(config)?;
    if tagged.is_empty() {
        return Err(CliError::new(
            "schema",
            "no fragments found; run extract first",
        ));
    }
    let graph = merge_fragments(tagged.iter().map(|(s, f)| (s.as_str(), f)));
    write_atomic(&out(config, SCHEMA_GRAPH), &(graph.to_json() + "\n"))?;
    write_atomic(&out(config, SCHEMA_GRAPHML), &graph.to_graphml())?;
    write_atomic(&out(config, STATS), &graph.stats().to_tsv())?;
    write_atomic(&out(config, CLASSES), &graph.classes_tsv())?;
    write_atomic(
        &out(config, OBJECT_PROPERTIES),
        &graph.object_properties_tsv(),
    )?;
    write_atomic(&out(config, DATA_PROPERTIES), &graph.data_properties_tsv())?;
    write_atomic(&out(config, DATATYPES), &graph.datatypes_tsv())?;
    Ok(graph)
}

pub fn reuse(config: &RunConfig) -> Result<ReuseSummary, CliError> {
    let graph = load_graph(config)?;
    let catalog = load_catalog(config)?;
    let groups = detect_uri_variants(graph.nodes.keys().map(|k| k.uri.as_str()), &catalog);
    let network = build_reuse_network(&graph, &catalog, &groups);
    let summary = network.summary().module("reuse")?;
    write_atomic(&out(config, REUSE_SUMMARY), &summary.to_tsv())?;
    write_atomic(&out(config, REUSE_COMPONENTS), &network.components_tsv())?;
    let stats = source_statistics(&graph, &catalog);
    write_atomic(
        &out(config, SOURCE_STATISTICS),
        &source_statistics_tsv(&stats),
    )?;
    let links = build_link_network(&graph, &catalog);
    write_atomic(&out(config, LINK_GRAPHML), &links.to_graphml())?;
    write_atomic(&out(config, LINK_TSV), &links.to_tsv())?;
    write_atomic(&out(config, VARIANT_GROUPS), &variant_groups_tsv(&groups))?;
    let mismatch =
        detect_semantic_mismatch_with_threshold(&graph, &catalog, config.mismatch_threshold);
    write_atomic(&out(config, MISMATCH), &mismatch_tsv(&mismatch))?;
    Ok(summary)
}

/// Labels every schema element of every source: catalog annotation, then
/// an `rdfs:label` from one of the source's endpoints (if enabled), then the
/// local name.
pub fn label_elements(
    config: &RunConfig,
    graph: &LslodSchemaGraph,
    catalog: &OriginCatalog,
) -> Vec<LabeledUri> {
    let client = client(config);
    let mut cache: HashMap<(Option<String>, String), LabeledUri> = HashMap::new();
    let mut out = Vec::new();
    for (source, uris) in schema_elements(graph) {
        let endpoint = config
            .label_from_endpoints
            .then(|| graph.sources.get(source))
            .flatten()
            .and_then(|entry| entry.endpoints.iter().find_map(|id| config.endpoint(id)));
        for uri in uris {
            let key = (endpoint.map(|e| e.id.clone()), uri.to_string());
            let labeled = cache.entry(key).or_insert_with(|| {
                let ep = endpoint.map(|endpoint| LabelEndpoint {
                    client: &client,
                    endpoint,
                });
                extract_label(uri, catalog, ep.as_ref())
            });
            out.push(labeled.clone().in_source(source));
        }
    }
    out
}

pub struct Communities {
    pub network: SimilarityNetwork,
    pub assignment: CommunityAssignment,
    pub report: CommunityReport,
}

pub fn communities(config: &RunConfig) -> Result<Communities, CliError> {
    let (Some(vectors), Some(idf)) = (&config.embeddings, &config.idf) else {
        return Err(CliError::new(
            "similarity",
            "the embeddings and idf paths must be configured",
        ));
    };
    let table = load_embeddings(vectors, idf).module("similarity")?;
    let graph = load_graph(config)?;
    let catalog = load_catalog(config)?;
    let labeled = label_elements(config, &graph, &catalog);
    if labeled.is_empty() {
        return Err(CliError::new(
            "similarity",
            "the schema graph has no schema elements",
        ));
    }
    write_atomic(
        &out(config, LABELS),
        &tsv::render(
            &["source", "uri", "label", "method"],
            labeled.iter().map(|l| {
                [
                    l.source_id.clone().unwrap_or_default(),
                    l.uri.clone(),
                    l.label.clone(),
                    l.method.name().to_string(),
                ]
            }),
        ),
    )?;

    let network = build_similarity_network(&labeled, &table, config.similarity_threshold);
    let assignment = louvain_with_restarts(
        network.nodes.len(),
        &network.weighted_edges(),
        config.seed,
        config.louvain_restarts,
    );
    let report = community_report(&assignment, &network, config.community_size_floor);

    write_atomic(&out(config, SIMILARITY_GRAPHML), &network.to_graphml(None))?;
    write_atomic(
        &out(config, COMMUNITIES_GRAPHML),
        &network.to_graphml(Some(&assignment.communities)),
    )?;
    write_atomic(&out(config, COMMUNITIES), &report.to_tsv())?;
    write_atomic(
        &out(config, COMMUNITY_MEMBERS),
        &tsv::render(
            &["community_id", "source", "uri", "label"],
            network
                .nodes
                .iter()
                .zip(&assignment.communities)
                .map(|(n, c)| {
                    [
                        c.to_string(),
                        n.source.clone(),
                        n.uri.clone(),
                        n.label.clone(),
                    ]
                }),
        ),
    )?;
    write_atomic(
        &out(config, MODULARITY),
        &tsv::render(
            &[
                "nodes",
                "edges",
                "threshold",
                "communities",
                "levels",
                "modularity",
            ],
            [[
                network.nodes.len().to_string(),
                network.edges.len().to_string(),
                config.similarity_threshold.to_string(),
                assignment.community_count().to_string(),
                assignment.levels.len().to_string(),
                assignment.modularity.to_string(),
            ]],
        ),
    )?;
    Ok(Communities {
        network,
        assignment,
        report,
    })
}

/// Aligns a TSV document into columns for the text report.
fn table(text: &str, max_rows: usize) -> String {
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.split('\t').collect())
        .collect();
    let shown = &rows[..rows.len().min(max_rows + 1)];
    let columns = shown.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            shown
                .iter()
                .filter_map(|r| r.get(c))
                .map(|f| f.chars().count().min(60))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut s = String::new();
    for row in shown {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, f)| {
                let f: String = f.chars().take(60).collect();
                format!("{f:<w$}", w = widths[c])
            })
            .collect();
        s.push_str("  ");
        s.push_str(line.join("  ").trim_end());
        s.push('\n');
    }
    if rows.len() > shown.len() {
        s.push_str(&format!("  ... {} more rows\n", rows.len() - shown.len()));
    }
    s
}

/// Builds `report.txt` from the artifacts already on disk; missing stages
/// are noted, not re-run.
pub fn report(config: &RunConfig) -> Result<String, CliError> {
    let sections = [
        ("Endpoint capabilities", CAPABILITIES, 50),
        ("Extraction", EXTRACT_STATUS, 50),
        ("Schema elements per source", STATS, 50),
        ("Vocabulary reuse", REUSE_SUMMARY, 5),
        ("Source statistics", SOURCE_STATISTICS, 50),
        ("Links between sources", LINK_TSV, 50),
        ("Identifier variants (intent for reuse)", VARIANT_GROUPS, 30),
        ("Semantic mismatch", MISMATCH, 30),
        ("Similarity network", MODULARITY, 5),
        ("Communities", COMMUNITIES, 30),
    ];
    let mut text = String::from("lodprof report\n==============\n");
    for (title, file, max_rows) in sections {
        text.push_str(&format!("\n{title}\n{}\n", "-".repeat(title.len())));
        let path = out(config, file);
        match std::fs::read_to_string(&path) {
            Ok(body) => text.push_str(&table(&body, max_rows)),
            Err(_) => text.push_str(&format!("  (no {file}; stage not run)\n")),
        }
    }
    write_atomic(&out(config, REPORT), &text)?;
    Ok(text)
}

/// probe, extract, merge, reuse, communities (when embeddings are
/// configured) and report.
pub fn pipeline(config: &RunConfig) -> Result<(), CliError> {
    let profiles = probe(config)?;
    extract(config, Some(&profiles))?;
    merge(config)?;
    reuse(config)?;
    if config.embeddings.is_some() {
        communities(config)?;
    } else {
        log::warn!("no embeddings configured; skipping communities");
    }
    report(config)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/a.tsv");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(
            std::fs::read_dir(dir.path().join("sub")).unwrap().count(),
            1
        );
    }

    #[test]
    fn table_aligns_and_truncates() {
        let t = table("a\tbb\nccc\td\ne\tf\n", 1);
        assert_eq!(t, "  a    bb\n  ccc  d\n  ... 1 more rows\n");
    }
}
