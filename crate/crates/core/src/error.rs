use thiserror::Error;

/// Errors raised by the laboratory's operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("random variable z{0} encountered; use the randomized evaluator")]
    RandomVariable(u32),
    #[error("{what} {value} exceeds the configured maximum {max}")]
    Scale { what: &'static str, value: u64, max: u64 },
    #[error("expansion budget of {budget} steps exceeded")]
    Budget { budget: u64 },
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("formula is not Sigma^B_0: {0}")]
    NotSigmaB0(String),
    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    Length { what: String, expected: usize, got: usize },
    #[error("arithmetic overflow while evaluating a term")]
    Overflow,
    #[error("inconsistent set: {0}")]
    Inconsistent(String),
    #[error("randomized circuit is unresolved at assignment {0}")]
    Unresolved(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
