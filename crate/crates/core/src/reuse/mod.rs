//! Vocabulary reuse: the reuse network and its statistic, per-source reuse
//! and linking statistics, and the source link network.

mod links;
mod network;
mod stats;

pub use links::{build_link_network, LinkNetwork};
pub use network::{
    build_reuse_network, reuse_statistic, schema_elements, ReuseEdgeKind, ReuseError, ReuseNetwork,
    ReuseNode, ReuseNodeKind, ReuseSummary,
};
pub use stats::{source_statistics, source_statistics_tsv, NamespaceOwners, SourceStatistics};
