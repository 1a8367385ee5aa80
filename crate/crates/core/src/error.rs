use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("quadrature did not converge: residual {residual:.3e} above tolerance {tolerance:.3e}")]
    Quadrature { residual: f64, tolerance: f64 },
    #[error("field lives on a different domain")]
    DomainMismatch,
    #[error("support declaration violated: |value| = {value:.3e} at grid index {index} outside the declared support")]
    SupportViolation { index: usize, value: f64 },
    #[error("diffusion reached the box: t^(1/theta) = {scale:.3} exceeds L/8 = {limit:.3}")]
    BoxTooSmall { scale: f64, limit: f64 },
    #[error("maximum located on the box boundary")]
    MaximumOnBoundary,
    #[error("derivative order exceeds the configured cap")]
    DerivativeCap,
    #[error("profile table check failed: relative error {0:.3e}")]
    TableCheck(f64),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
