use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by fitting, searching and the command-line layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sample set: {0}")]
    InvalidSamples(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("underdetermined fit for {basis}: {rows} samples for {terms} terms")]
    Underdetermined {
        basis: String,
        rows: usize,
        terms: usize,
    },

    #[error("rank-deficient design matrix for {basis} on {rows} samples (column {column})")]
    RankDeficient {
        basis: String,
        rows: usize,
        column: usize,
    },

    #[error("no candidate in the model family could be fitted: {0}")]
    NoFittableModel(Box<Error>),

    #[error("fit failed for boundary {boundary}: {source}")]
    Boundary {
        boundary: String,
        #[source]
        source: Box<Error>,
    },

    #[error("degree {0} is outside the penalty domain")]
    PenaltyDomain(u32),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("degenerate line: both points are {0:?}")]
    DegenerateLine((f64, f64)),

    #[error("signal-to-noise ratio undefined: {0}")]
    Snr(&'static str),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 usage, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 1,
            Error::InvalidSamples(_)
            | Error::DimensionMismatch { .. }
            | Error::Grid(_)
            | Error::Parse { .. }
            | Error::Io { .. }
            | Error::Json(_)
            | Error::Snr(_)
            | Error::DegenerateLine(_) => 2,
            Error::Underdetermined { .. }
            | Error::RankDeficient { .. }
            | Error::NoFittableModel(_)
            | Error::Boundary { .. }
            | Error::PenaltyDomain(_) => 3,
        }
    }

    /// True for failures that mean "this subset cannot support the model",
    /// as opposed to malformed input.
    pub fn is_fit_failure(&self) -> bool {
        match self {
            Error::Underdetermined { .. } | Error::RankDeficient { .. } => true,
            Error::NoFittableModel(_) => true,
            Error::Boundary { source, .. } => source.is_fit_failure(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
