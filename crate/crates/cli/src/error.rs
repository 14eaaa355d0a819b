use thiserror::Error;

/// Errors surfaced by the command-line front end, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Core(#[from] qfivol_core::Error),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),
    #[error("strict mode: {0}")]
    Strict(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Argument(_) | CliError::Core(_) => 1,
            CliError::Assertion(_) | CliError::ReplayMismatch(_) => 2,
            CliError::Strict(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
