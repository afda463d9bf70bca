use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by loading, validation and the analytics kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{file}:{line}: malformed row: {reason}")]
    Malformed {
        file: String,
        line: u64,
        reason: String,
    },

    #[error("{file}: duplicate {kind} id `{id}`")]
    DuplicateId {
        file: String,
        kind: &'static str,
        id: String,
    },

    #[error("{file}:{line}: dangling reference to unknown {kind} `{id}`")]
    DanglingReference {
        file: String,
        line: u64,
        kind: &'static str,
        id: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Json(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
