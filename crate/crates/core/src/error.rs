use thiserror::Error;

use crate::model::RealizationId;

/// Errors raised by the solver and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("SVD did not converge for realization {0}")]
    SvdNonConvergence(RealizationId),

    #[error("zero-mode overlap: {0}")]
    ZeroModeOverlap(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("no exponential decay in window (slope {0})")]
    NoExponentialDecay(f64),

    #[error("too few points: {0}")]
    InsufficientPoints(String),

    #[error("no crossing found: {0}")]
    NoCrossing(String),

    #[error("empty x-overlap between collapse curves")]
    EmptyOverlap,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("oracle refuses L = {0} (maximum is 12)")]
    OracleTooLarge(usize),

    #[error("{failed} of {total} realizations failed: {breakdown}")]
    TooManyFailures {
        failed: usize,
        total: usize,
        breakdown: String,
    },

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl Error {
    /// Short stable tag used when tallying failures across an ensemble.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "invalid-spec",
            Error::SvdNonConvergence(_) => "svd-non-convergence",
            Error::ZeroModeOverlap(_) => "zero-mode overlap",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::OutOfRange(_) => "out-of-range",
            Error::NotPositiveSemidefinite(_) => "not-psd",
            Error::NoExponentialDecay(_) => "no-exponential-decay",
            Error::InsufficientPoints(_) => "insufficient-points",
            Error::NoCrossing(_) => "no-crossing",
            Error::EmptyOverlap => "empty-overlap",
            Error::NotHermitian(_) => "not-hermitian",
            Error::NonFinite(_) => "non-finite",
            Error::OracleTooLarge(_) => "oracle-too-large",
            Error::TooManyFailures { .. } => "too-many-failures",
            Error::Checkpoint(_) => "checkpoint",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
