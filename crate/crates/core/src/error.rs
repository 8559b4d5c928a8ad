use thiserror::Error;

use crate::ensembles::Family;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration budget exceeded: {required} tuples requested, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error(
        "imaginary residual {residual:e} exceeds tolerance {tolerance:e} in {context}; \
         the result of a real matrix computation must be real"
    )]
    ImaginaryResidual {
        context: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error(
        "ensemble `{0}` has no smooth representation u(Z) with bounded u', u''; \
         the L(c1,c2) smoothness class is required"
    )]
    NotSmooth(Family),

    #[error("ensemble `{0}` is not symmetric about zero; symmetric inputs are required")]
    NotSymmetric(Family),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code: 3 for I/O failures, 2 for every validation or refusal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            Error::Csv(e) if e.is_io_error() => 3,
            _ => 2,
        }
    }
}
