//! Deterministic fixture endpoint. It answers only the probe, template,
//! fallback and label query shapes, by direct evaluation over an in-memory
//! store, and can be scripted to misbehave.

mod eval;
mod faults;
mod server;
mod shapes;
mod store;

use thiserror::Error;

pub use eval::Evaluator;
pub use faults::{Behavior, FaultRule, FaultScript, FaultTarget};
pub use server::{serve, LogEntry, SimulatorHandle};
pub use shapes::{normalize_query, recognize, Shape, ShapeKind};
pub use store::{FixtureStore, Triple};

#[derive(Debug, Error)]
pub enum SimulatorError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("fixture line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error("invalid fault: {0}")]
    InvalidFault(String),
}

/// Loads a fixture file; see [`FixtureStore::parse`] for the format.
pub fn load_fixture(path: impl AsRef<std::path::Path>) -> Result<FixtureStore, SimulatorError> {
    FixtureStore::load(path)
}
