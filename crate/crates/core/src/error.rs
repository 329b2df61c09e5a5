//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema error in {path} at data row {row}, column `{column}`: {message}")]
    Schema {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("unknown group `{0}`")]
    UnknownGroup(String),

    #[error("input length mismatch: {0}")]
    LengthMismatch(String),

    #[error("group `{group}`: {message}")]
    GroupData { group: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("share target {share} is infeasible: {reason}")]
    InfeasibleShare { share: f64, reason: String },

    #[error("internal solver error: {0}")]
    Solver(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// CLI exit code: 1 for input/validation problems, 2 for internal faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Solver(_) => 2,
            _ => 1,
        }
    }
}
