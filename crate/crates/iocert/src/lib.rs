//! Certification toolkit for linear inverse problems over unions of subspaces.
//!
//! Given a measurement matrix M and a low-dimensional model Σ (sparse vectors,
//! block-sparse vectors, low-rank matrices, explicit subspace unions, point
//! clouds), this crate computes the quantities that decide whether *any*
//! decoder can be instance optimal on Σ, and ships the decoders that meet
//! those limits:
//!
//! - the optimal ℓ²/ℓ² null-space constant D* of ker M against Σ − Σ, with
//!   the worst correlated pair as a certificate ([`certify`])
//! - restricted isometry constants on Σ and Σ − Σ, frame constants, and the
//!   measurement-count lower bounds they imply ([`certify`])
//! - the measurement-aware norm ‖x‖ + (1/α)‖Mx‖, atomic norms with dual
//!   certificates, and the two-sided decomposition bounds that sandwich them
//!   ([`norms`])
//! - ideal noiseless and robust decoders together with a sampled
//!   instance-optimality harness ([`decode`])
//! - explicit orthonormal families inside matrix models and adversarial
//!   point pairs that defeat every decoder past the certified constant
//!   ([`witness`])
//!
//! Everything is dense, double-precision, and deterministic: fixed inputs and
//! seeds reproduce identical outputs byte for byte through [`jsonio`].

pub mod certify;
pub mod decode;
pub mod error;
pub mod jsonio;
pub mod linalg;
pub mod model;
pub mod norms;
pub mod witness;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
