//! `lodprof`: profiles the schemas of linked data SPARQL endpoints and
//! analyses vocabulary reuse and cross-source similarity.

pub mod config;
pub mod error;
pub mod stages;

use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand};
use lodprof_core::simulator::{load_fixture, serve, FaultScript, SimulatorHandle};

pub use config::{Overrides, RunConfig};
pub use error::{CliError, ModuleResult};

#[derive(Debug, Parser)]
#[command(
    name = "lodprof",
    version,
    about = "Schema profiling for linked data endpoints"
)]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(short, long, global = true, default_value = "lodprof.toml")]
    pub config: PathBuf,
    /// Overrides `output_dir` from the configuration.
    #[arg(long, global = true, env = "LODPROF_OUTPUT_DIR")]
    pub output_dir: Option<PathBuf>,
    /// Overrides `seed` from the configuration.
    #[arg(long, global = true, env = "LODPROF_SEED")]
    pub seed: Option<u64>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect endpoint capabilities; writes capabilities.tsv.
    Probe,
    /// Extract schema fragments; writes fragments/<endpoint>.json.
    Extract,
    /// Merge fragments into the schema graph and its statistics.
    Merge,
    /// Reuse statistic, source statistics, links, variants and mismatches.
    Reuse,
    /// Similarity network and its communities.
    Communities {
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Summarize the artifacts on disk into report.txt.
    Report,
    /// All stages in order.
    Pipeline {
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Serve a fixture file as a SPARQL endpoint until interrupted.
    Simulate {
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long, default_value_t = 0)]
        port: u16,
        /// Fault rule `TARGET=BEHAVIOR`, e.g. `SQ2=timeout:2`; repeatable.
        #[arg(long = "fault")]
        faults: Vec<String>,
        #[arg(long, default_value_t = 0)]
        latency_ms: u64,
    },
}

impl Cli {
    fn load_config(&self, threshold: Option<f64>) -> Result<RunConfig, CliError> {
        let overrides = Overrides {
            output_dir: self.output_dir.clone(),
            seed: self.seed,
            similarity_threshold: threshold,
        };
        RunConfig::load(&self.config, &overrides)
    }
}

/// Starts a fixture endpoint on localhost.
pub fn start_simulator(
    fixture: &std::path::Path,
    port: u16,
    faults: &[String],
    latency: Duration,
    seed: u64,
) -> Result<SimulatorHandle, CliError> {
    let store = load_fixture(fixture).module("simulator")?;
    let mut script = FaultScript::new().with_latency(latency).with_seed(seed);
    for spec in faults {
        script
            .rules
            .push(FaultScript::parse_rule(spec).module("simulator")?);
    }
    serve(store, script, port).module("simulator")
}

/// Runs one subcommand; returns the lines to print on success.
pub fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    let done = |name: &str, config: &RunConfig| {
        format!("{name}\t{}", config.output_dir.join(name).display())
    };
    match &cli.command {
        Command::Probe => {
            let config = cli.load_config(None)?;
            let profiles = stages::probe(&config)?;
            Ok(vec![
                done(stages::CAPABILITIES, &config),
                format!("probed\t{}", profiles.len()),
            ])
        }
        Command::Extract => {
            let config = cli.load_config(None)?;
            let graphs = stages::extract(&config, None)?;
            Ok(vec![
                done(stages::EXTRACT_STATUS, &config),
                format!("graphs\t{graphs}"),
            ])
        }
        Command::Merge => {
            let config = cli.load_config(None)?;
            let graph = stages::merge(&config)?;
            Ok(vec![
                done(stages::SCHEMA_GRAPH, &config),
                format!("nodes\t{}", graph.nodes.len()),
            ])
        }
        Command::Reuse => {
            let config = cli.load_config(None)?;
            let summary = stages::reuse(&config)?;
            Ok(vec![
                done(stages::REUSE_SUMMARY, &config),
                format!("reuse_statistic\t{}", summary.statistic),
            ])
        }
        Command::Communities { threshold } => {
            let config = cli.load_config(*threshold)?;
            let c = stages::communities(&config)?;
            Ok(vec![
                done(stages::COMMUNITIES, &config),
                format!("modularity\t{}", c.assignment.modularity),
            ])
        }
        Command::Report => {
            let config = cli.load_config(None)?;
            stages::report(&config)?;
            Ok(vec![done(stages::REPORT, &config)])
        }
        Command::Pipeline { threshold } => {
            let config = cli.load_config(*threshold)?;
            stages::pipeline(&config)?;
            Ok(vec![done(stages::REPORT, &config)])
        }
        Command::Simulate {
            fixture,
            port,
            faults,
            latency_ms,
        } => {
            let handle = start_simulator(
                fixture,
                *port,
                faults,
                Duration::from_millis(*latency_ms),
                cli.seed.unwrap_or(0),
            )?;
            println!("listening\t{}", handle.url());
            handle.wait();
            Ok(Vec::new())
        }
    }
}
