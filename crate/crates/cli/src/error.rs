use thiserror::Error;

/// Command failure, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or flags (exit 1).
    #[error("config error: {0}")]
    Config(String),
    /// Unreadable or invalid input data, or an output write failure (exit 2).
    #[error("data error: {0}")]
    Data(String),
    /// The optimizer hit a non-finite cost (exit 3).
    #[error("optimization aborted: {0}")]
    Optimization(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Optimization(_) => 3,
        }
    }
}

impl From<relvis_core::Error> for CliError {
    fn from(e: relvis_core::Error) -> Self {
        match e {
            relvis_core::Error::NonFiniteCost { .. } => CliError::Optimization(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}
