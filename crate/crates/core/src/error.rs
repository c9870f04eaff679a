use thiserror::Error;

use crate::linalg::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("precondition `{check}` violated: measured {measured:e}, allowed {bound:e}")]
    Precondition {
        check: &'static str,
        measured: f64,
        bound: f64,
    },
    #[error("operator is not a member at the requested parameters (gap min eigenvalue {min_eigenvalue:e})")]
    NotMember { min_eigenvalue: f64 },
    #[error("pencil is infeasible: no finite lambda exists")]
    Infeasible,
    #[error("subspace is not invariant: residual {residual:e} exceeds {bound:e}")]
    NotInvariant { residual: f64, bound: f64 },
    #[error("power has numerical rank {rank} < {dim}; range is not dense")]
    RankDeficient { rank: usize, dim: usize },
    #[error("gap matrix forms disagree: relative deviation {deviation:e}")]
    InconsistentGap { deviation: f64 },
    #[error("invalid {field}: {message}")]
    InvalidInput { field: String, message: String },
}

impl Error {
    /// Failures of the numerics themselves rather than of the input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Linalg(e) => e.is_numerical(),
            Error::InconsistentGap { .. } => true,
            _ => false,
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            message: message.into(),
        }
    }
}
