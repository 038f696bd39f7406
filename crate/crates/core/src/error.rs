use thiserror::Error;

/// Errors produced by the statistics and experiment layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative routine failed to converge within its iteration cap.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: u32,
        residual: f64,
    },

    /// A computation requires at least one observed success.
    #[error("no success observed")]
    NoSuccessObserved,

    /// A collection argument was empty where at least one element is required.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// DIMACS CNF input could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
