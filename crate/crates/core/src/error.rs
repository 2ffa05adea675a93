use thiserror::Error;

/// Errors raised by the library. Everything here is an input problem except
/// [`Error::Invariant`], which signals a numerical contract breach.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("party index {index} out of range for {parties} parties")]
    PartyOutOfRange { index: usize, parties: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("state file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
