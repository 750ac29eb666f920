use spinamp::SpinError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("computation failed: {0}")]
    Computation(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Computation(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    /// Wraps a core error raised while computing `what`.
    pub fn core(what: &str, e: SpinError) -> Self {
        if e.is_computational() {
            CliError::Computation(format!("{what}: {e}"))
        } else {
            CliError::Validation(format!("{what}: {e}"))
        }
    }

    pub fn io(what: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Computation(format!("{}: {e}", what.display()))
    }
}
