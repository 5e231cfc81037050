//! Schema profiling for SPARQL endpoints: extraction of per-graph schema
//! fragments, a merged schema graph, vocabulary reuse analysis and
//! embedding-based similarity communities.

pub mod extract;
pub mod graphml;
pub mod reuse;
pub mod schema;
pub mod similarity;
pub mod simulator;
pub mod sparql;
pub mod term;
pub mod tsv;
pub mod uri;

pub use term::Term;
