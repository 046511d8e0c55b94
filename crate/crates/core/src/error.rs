use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("no convergence in {what} after {iterations} iterations")]
    NonConvergence { what: String, iterations: usize },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("truncation tail {tail:e} exceeds tolerance {tol:e}")]
    Truncation { tail: f64, tol: f64 },

    #[error("states built on different structure tables")]
    TableMismatch,

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
}
