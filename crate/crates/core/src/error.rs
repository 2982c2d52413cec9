//! Crate-wide error type with stable machine-readable codes.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("mixing proportions invalid: {0}")]
    InvalidMixingProportions(String),

    #[error("shape parameters invalid: {0}")]
    InvalidShape(String),

    #[error("rate parameter invalid: {0}")]
    InvalidRate(String),

    #[error("parameter vectors have mismatched lengths: pi has {pi}, alpha has {alpha}")]
    LengthMismatch { pi: usize, alpha: usize },

    #[error("mixture must have at least one component")]
    EmptyComponents,

    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("sample invalid: {0}")]
    InvalidSample(String),

    #[error("composition count {count} exceeds limit {limit} for n={n}, m={m}")]
    CompositionLimit {
        n: usize,
        m: usize,
        count: u128,
        limit: u128,
    },

    #[error("quadrature subdivision limit {limit} exceeded (partial value {value}, error estimate {error})")]
    QuadratureLimit { limit: usize, value: f64, error: f64 },

    #[error("config invalid: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable error code used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidMixingProportions(_) => "invalid_mixing_proportions",
            Error::InvalidShape(_) => "invalid_shape",
            Error::InvalidRate(_) => "invalid_rate",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::EmptyComponents => "empty_components",
            Error::Domain { .. } => "domain_error",
            Error::InvalidSample(_) => "invalid_sample",
            Error::CompositionLimit { .. } => "composition_limit_exceeded",
            Error::QuadratureLimit { .. } => "quadrature_limit_exceeded",
            Error::InvalidConfig(_) => "invalid_config",
        }
    }

    /// Process exit code for the CLI: 2 config/validation errors,
    /// 3 computation limits.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CompositionLimit { .. } | Error::QuadratureLimit { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
