//! Error type shared by every module.

use thiserror::Error;

/// Failure modes of certification, decoding, and witness construction.
///
/// Numerical routines that iterate report [`Error::NoConvergence`] carrying
/// the best objective value reached, so callers can still inspect a bound.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("component enumeration needs {required} subspaces, cap is {max}")]
    ComponentOverflow { required: u128, max: usize },

    #[error("{op} does not support model kind {kind}")]
    UnsupportedKind { op: &'static str, kind: &'static str },

    #[error("vector {index} has norm {norm:.6e}, expected unit norm")]
    NonUnitVector { index: usize, norm: f64 },

    #[error("matrix is not onto: rank {rank} < {rows} rows")]
    NotOnto { rank: usize, rows: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence after {iterations} iterations, best value {best:.6e}")]
    NoConvergence { iterations: usize, best: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
