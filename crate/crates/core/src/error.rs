use thiserror::Error;

/// Errors raised by the PUF model and the generator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("generator starved: {emitted} of {requested} bits after {evaluations} evaluations")]
    Starvation {
        requested: u64,
        emitted: u64,
        evaluations: u64,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed document: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
