use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric failure in {what} (best residual {best_residual:e})")]
    NumericFailure { what: String, best_residual: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("singularity condition failed: {0}")]
    SingularityConditionFailed(String),

    #[error("path passes within {distance:e} of singular point {point} (margin {margin:e})")]
    PathTooCloseToSingularity {
        point: Complex64,
        distance: f64,
        margin: f64,
    },

    #[error("root pairing collision at z = {at} (arc length {arc_length:e})")]
    PairingCollision { at: Complex64, arc_length: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(what: impl Into<String>, best_residual: f64) -> Self {
        Error::NumericFailure {
            what: what.into(),
            best_residual,
        }
    }

    /// True for errors raised by numerical routines (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_))
    }
}
