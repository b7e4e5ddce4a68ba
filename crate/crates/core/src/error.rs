//! Crate-wide error type.

use crate::inference::Arma21Fit;

/// Errors produced by model construction, decimation, and estimation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter violates a precondition (negative amplitude, zero length, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation that requires stationarity was called on a non-stationary model.
    #[error("non-stationary model: {0}")]
    NonStationary(String),

    /// An increment covariance is not positive semidefinite.
    #[error("invalid increment covariance: {0}")]
    InvalidCovariance(String),

    /// The innovations factorization did not converge.
    #[error("numerical factorization failed: {0}")]
    FactorizationFailed(String),

    /// Fixed-point coefficients beyond order 3 are not tabulated for this class.
    #[error("unsupported truncation order {requested} for fixed-point class {class} (max 3)")]
    UnsupportedOrder { class: char, requested: usize },

    /// The sampling interval hits an oscillation node where the AR map is undefined.
    #[error("degenerate sampling interval: {0}")]
    DegenerateSampling(String),

    /// Likelihood maximization failed; carries the best iterate when one exists.
    #[error("estimation failed: {reason}")]
    EstimationFailed {
        reason: String,
        best: Option<Box<Arma21Fit>>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
