use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatError {
    /// The sequence is shorter than the test requires.
    #[error("{test}: needs at least {required} bits, got {actual}")]
    Length {
        test: &'static str,
        required: usize,
        actual: usize,
    },
    #[error("{test}: invalid parameter: {reason}")]
    Parameter { test: &'static str, reason: String },
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, StatError>;

pub(crate) fn require_len(test: &'static str, required: usize, actual: usize) -> Result<()> {
    if actual < required {
        return Err(StatError::Length {
            test,
            required,
            actual,
        });
    }
    Ok(())
}
