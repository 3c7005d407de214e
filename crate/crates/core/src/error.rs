use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature order {0} outside 1..=64")]
    InvalidOrder(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("block is numerically rank deficient at column {column}")]
    RankDeficient { column: usize },

    #[error("Gram matrix is not numerically positive definite")]
    IllConditionedGram,

    #[error("Rayleigh-Ritz failed: Gram matrix ill-conditioned even after re-orthonormalization")]
    GramFailure,

    #[error("BiCG breakdown at iteration {iteration}")]
    Breakdown { iteration: usize },

    #[error("quadrature node {0} not inside (0, 1)")]
    InvalidNode(f64),

    #[error("empty interval ({a}, {b})")]
    EmptyInterval { a: f64, b: f64 },

    #[error("circles of radius {r} do not cover ({a}, {b})")]
    CirclesDoNotCover { a: f64, b: f64, r: f64 },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("sweep made no progress below {0}")]
    NonProgress(f64),

    #[error("reference eigenvalue is zero at position {index}; absolute error {abs_error:e}")]
    DivisionByZeroRef { index: usize, abs_error: f64 },

    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidOrder(_)
            | Error::EmptyInterval { .. }
            | Error::CirclesDoNotCover { .. }
            | Error::InvalidNode(_) => 2,
            Error::UnsupportedFormat(_) | Error::Parse { .. } | Error::Io { .. } => 3,
            _ => 4,
        }
    }
}
