use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: expected 1, 2 or 3")]
    InvalidDimension(usize),
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported operation for this shape: {0}")]
    UnsupportedShape(&'static str),
    #[error("kernel pair is not admissible: {0}")]
    NotAdmissible(String),
    #[error("non-integrable singularity detected: {0}")]
    NonIntegrable(String),
    #[error("tail behaviour of the integrand is unknown")]
    UnknownTail,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(d))
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
