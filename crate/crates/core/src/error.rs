//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the library.
///
/// Precondition violations on user-supplied data (bad partitions, unsorted
/// spectra, parameters outside their admissible window) are reported as
/// [`Error::InvalidInput`]; resource guards that protect against exponential
/// blow-up are reported as [`Error::DimensionCap`]; iterative numerics that
/// fail to reach their target tolerance are reported as
/// [`Error::NonConvergence`] together with the residual actually achieved.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A requested computation exceeds a hard size guard.
    #[error("dimension cap exceeded: {0}")]
    DimensionCap(String),

    /// A floating-point evaluation left the finite range.
    #[error("non-finite result in {context}; consider the log-domain interface")]
    NonFinite { context: &'static str },

    /// An iterative solver stopped before reaching its tolerance.
    #[error("no convergence in {context}: residual {residual:.3e} after {steps} steps")]
    NonConvergence {
        context: &'static str,
        residual: f64,
        steps: usize,
    },
}
