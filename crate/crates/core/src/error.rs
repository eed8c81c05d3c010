use thiserror::Error;

/// Errors raised by the library. Numerical outcomes that are legitimate
/// findings (finite-time blow-up, coefficient overflow) are reported as
/// status values instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("insufficient series order: {0}")]
    InsufficientOrder(String),

    #[error("solution is singular at t = {0}")]
    Singularity(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("t = {t} outside the trajectory range [0, {end}]")]
    Range { t: f64, end: f64 },

    #[error("not a fixed point: residual {0:e} exceeds tolerance")]
    NotAFixedPoint(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
