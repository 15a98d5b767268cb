use thiserror::Error;

/// Errors produced by the numerics and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("epsilon {0} outside the allowed domain")]
    BadEpsilon(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("no convergence: achieved interval [{lo}, {hi}]")]
    ConvergenceFailure { lo: f64, hi: f64 },

    #[error("state is not full rank (min eigenvalue {min_eigenvalue:.3e})")]
    NotFullRank { min_eigenvalue: f64 },

    #[error("target is free (overlap {overlap}), bound is inapplicable")]
    FreeTarget { overlap: f64 },

    #[error("channel is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("rejection sampling exhausted after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("forbidden-region violation: {sample}")]
    ViolationFound {
        sample: String,
        report: Box<crate::verifier::CampaignReport>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
