use std::path::PathBuf;

use thiserror::Error;

use crate::invariants::CouplingMatrix;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid level {0}: SU(2) level must be a positive integer")]
    InvalidLevel(i64),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    /// A structural invariant failed; `invariant` names it, `residual` is the worst deviation.
    #[error("validation failed for {invariant} (max residual {residual:.3e})")]
    Validation { invariant: String, residual: f64 },

    #[error("non-integral fusion coefficient N[{i}][{j}][{k}] = {value}")]
    NonIntegralFusion {
        i: usize,
        j: usize,
        k: usize,
        value: f64,
    },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("invalid subsystem: {0}")]
    InvalidSubsystem(String),

    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("degenerate statistics: smallest singular value {smallest:.3e} <= threshold {threshold:.3e}")]
    Degenerate { smallest: f64, threshold: f64 },

    /// Search stopped early. `found` holds the (sorted) solutions discovered before stopping.
    #[error("search budget exceeded after {nodes} nodes ({reason}); {} partial solutions", found.len())]
    SearchBudget {
        reason: String,
        nodes: u64,
        found: Vec<CouplingMatrix>,
    },

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn validation(invariant: impl Into<String>, residual: f64) -> Self {
        Error::Validation {
            invariant: invariant.into(),
            residual,
        }
    }

    pub(crate) fn dims(
        context: impl Into<String>,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 1,
            Error::SearchBudget { .. } => 3,
            Error::Consistency(_) => 4,
            _ => 2,
        }
    }

    /// Short machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidLevel(_) => "invalid-level",
            Error::Io { .. } => "io",
            Error::Parse(_) => "parse",
            Error::Validation { .. } => "validation",
            Error::NonIntegralFusion { .. } => "non-integral-fusion",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InvalidSubsystem(_) => "invalid-subsystem",
            Error::Inapplicable(_) => "inapplicable",
            Error::Degenerate { .. } => "degenerate",
            Error::SearchBudget { .. } => "search-budget",
            Error::Consistency(_) => "consistency",
        }
    }
}
