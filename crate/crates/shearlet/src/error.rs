//! Library error type. Every fallible operation returns `Result<_, ShearletError>`.

use thiserror::Error;

/// Errors surfaced by construction, transform, and estimation routines.
#[derive(Debug, Error)]
pub enum ShearletError {
    /// Parameter combination violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Operation requested for the isotropic cube/square region where it is undefined.
    #[error("{0} is undefined for the isotropic low-frequency region")]
    CubeRegion(&'static str),

    /// Field dimensions do not match the system or each other.
    #[error("grid mismatch: expected {expected:?}, got {got:?}")]
    GridMismatch { expected: Vec<usize>, got: Vec<usize> },

    /// Grid too coarse to resolve the requested scale.
    #[error("scale j={j} under-resolved on grid {n}: need at least {needed} samples per axis")]
    UnderResolved { j: u32, n: usize, needed: usize },

    /// Spectral factorization lost too much accuracy to certify the result.
    #[error("spectral factorization ill-conditioned: sup residual {residual:.3e} exceeds {limit:.1e}")]
    IllConditioned { residual: f64, limit: f64 },

    /// Iterative solver failed to reach its tolerance.
    #[error("{method} did not converge: residual {residual:.3e} after {iters} iterations")]
    NoConvergence { method: &'static str, residual: f64, iters: usize },

    /// Coefficient table refers to an index the system does not contain.
    #[error("unknown coefficient index: {0}")]
    UnknownIndex(String),

    /// Operation requires frame bounds certified on the working grid first.
    #[error("frame bounds not certified on this grid; run estimate_frame_bounds first")]
    NotCertified,

    /// Malformed external data (CSV / JSON / raw field import).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ShearletError>;

impl ShearletError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ShearletError::InvalidParam(msg.into())
    }
}
