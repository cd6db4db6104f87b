use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("map is not hyperbolic: a*b = {0} must be positive")]
    NotHyperbolic(i64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("series is unfittable: window [{t_lo}, {t_hi}] holds {points} points, too few for a decay fit")]
    Unfittable { t_lo: usize, t_hi: usize, points: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
