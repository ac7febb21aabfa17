use thiserror::Error;

/// Errors raised by kernel construction, operator evaluation and the bound calculators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("kernel inadmissible: {0}")]
    KernelInadmissible(String),

    #[error("degenerate interval: index set for m={m} on [{a}, {b}] is empty")]
    DegenerateInterval { m: f64, a: f64, b: f64 },

    #[error("bound inapplicable: {0}")]
    BoundInapplicable(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::DegenerateInterval { .. }
            | Error::Domain(_)
            | Error::Config(_) => 2,
            Error::NumericFailure(_) | Error::KernelInadmissible(_) => 3,
            Error::BoundInapplicable(_) => 4,
        }
    }
}
