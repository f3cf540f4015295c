//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigensolver did not converge on a {size}x{size} matrix within {iterations} iterations")]
    EigenConvergence { size: usize, iterations: usize },

    #[error(
        "rank constraint unmet after {adaptations} penalty adaptations: \
         {found} connected components, want {target}"
    )]
    RankConstraint {
        found: usize,
        target: usize,
        adaptations: usize,
    },

    #[error("solver failed at outer iteration {iteration}: {source}")]
    Alternating {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}, line {line}: malformed value {token:?}")]
    Parse {
        path: PathBuf,
        line: usize,
        token: String,
    },

    #[error("view {path} has {found} samples, expected {expected}")]
    ViewSizeMismatch {
        path: PathBuf,
        found: usize,
        expected: usize,
    },

    #[error("manifest {path} is missing required key {key:?}")]
    ManifestKey { path: PathBuf, key: &'static str },

    #[error("dataset has no ground-truth labels")]
    MissingTruth,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
