use std::path::PathBuf;

use thiserror::Error;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numeric,
}

#[derive(Error, Debug)]
pub enum Error {
    #[error("unknown wavelet filter '{0}' (known: haar, db4tap, coif24tap)")]
    UnknownFilter(String),

    #[error("filter '{name}' failed its consistency check: {reason}")]
    InvalidFilter { name: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range 0..{bound} for {what}")]
    Index {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error(
        "dimensionality error: p*2^J = {columns} exceeds the sample count n = {rows}; \
         the design matrix B cannot be non-singular"
    )]
    Dimensionality { columns: usize, rows: usize },

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("row {row}, column '{column}': {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("model file: {0}")]
    Schema(String),

    #[error("model file version {found} is not supported (expected {expected})")]
    Version { found: i64, expected: i64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("scenario {scenario}: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UnknownFilter(_) | Error::Config(_) | Error::Io { .. } => ErrorKind::Config,
            Error::Numeric(_) | Error::InvalidFilter { .. } => ErrorKind::Numeric,
            Error::Scenario { source, .. } => source.kind(),
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
