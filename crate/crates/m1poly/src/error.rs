use thiserror::Error;

/// Errors raised by evaluation, construction and checking routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("overflow at index {index} while computing {what}")]
    Overflow { what: &'static str, index: usize },

    #[error("pole: {0}")]
    Pole(String),

    #[error("series did not converge within {terms} terms")]
    Convergence { terms: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("no truncation condition holds for N = {n}: {detail}")]
    Truncation { n: usize, detail: String },

    #[error("negative weight at index {index}: {value}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("non-positive norm at index {index}: {value}")]
    NonPositiveNorm { index: usize, value: f64 },

    #[error("positivity condition u_{index} > 0 fails: u_{index} = {value}")]
    Positivity { index: usize, value: f64 },

    #[error("negative radicand in {what}: {value}")]
    NegativeRadicand { what: &'static str, value: f64 },

    #[error("index constraint violated: {0}")]
    Constraint(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
