use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invariant breach: {0}")]
    Invariant(String),

    #[error(transparent)]
    Core(#[from] mubgme::Error),
}

impl CliError {
    /// 2 for bad input or unusable paths, 3 for numerical contract breaches.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) | CliError::Core(mubgme::Error::Invariant(_)) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
