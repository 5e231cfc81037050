use std::fmt;

/// An error tagged with the pipeline module it came from. Printed by the
/// binary as `error<TAB>module<TAB>message`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub module: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(module: &'static str, message: impl Into<String>) -> Self {
        CliError {
            module,
            message: message.into(),
        }
    }

    /// The machine-readable line written to stderr.
    pub fn line(&self) -> String {
        let message = self.message.replace(['\t', '\n'], " ");
        format!("error\t{}\t{message}", self.module)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.module, self.message)
    }
}

impl std::error::Error for CliError {}

pub trait ModuleResult<T> {
    fn module(self, module: &'static str) -> Result<T, CliError>;
}

impl<T, E: fmt::Display> ModuleResult<T> for Result<T, E> {
    fn module(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|e| CliError::new(module, e.to_string()))
    }
}
