use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("invalid parameter `{field}`: {detail}")]
    InvalidParameter { field: &'static str, detail: String },

    #[error("series for {function} did not converge after {terms} terms")]
    NonConvergence { function: &'static str, terms: usize },

    #[error("truncation budget exceeded: {0}")]
    TruncationBudget(String),

    #[error("Fock truncation too small: need n_trunc >= {required}, got {actual}")]
    Truncation { required: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("undefined statistics: {0}")]
    UndefinedStatistics(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        detail: detail.into(),
    }
}
