use thiserror::Error;

/// Errors raised by kernel construction, decomposition and the statistics routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel is not symmetric: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NonSymmetric { residual: f64, tolerance: f64 },

    #[error("unphysical kernel: {invariant} (value {value:.17e})")]
    Unphysical { invariant: String, value: f64 },

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    #[error("insufficient modes: truncation weight {weight:.3e} exceeds bound {bound:.3e}")]
    InsufficientModes { weight: f64, bound: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
