use cantorchain_core::Error as CoreError;
use thiserror::Error;

/// Failures of a command, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("enumeration cap exceeded: {0}")]
    Cap(String),
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Cap(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::OracleMismatch(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let text = e.to_string();
        match e {
            CoreError::CapExceeded { .. } => CliError::Cap(text),
            CoreError::HypothesisFailed(_)
            | CoreError::NotTransitive { .. }
            | CoreError::IncompatibleLevels { .. }
            | CoreError::IncompatibleThread { .. }
            | CoreError::NoRoom { .. } => CliError::Hypothesis(text),
            _ => CliError::Config(text),
        }
    }
}
