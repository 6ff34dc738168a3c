use thiserror::Error;

use crate::model::Charge;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("level must be at least 1, got {0}")]
    InvalidLevel(u32),

    #[error("charge {charge} is outside 0..={level}")]
    InvalidCharge { charge: u32, level: u32 },

    #[error("no fusion vertex for {a} x {b} -> {c}")]
    NoVertex { a: Charge, b: Charge, c: Charge },

    #[error("consistency check '{check}' failed: residual {residual:e} at indices {indices:?}")]
    Inconsistent {
        check: String,
        residual: f64,
        indices: Vec<u8>,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("invalid fusion path: {0}")]
    InvalidPath(String),

    #[error("operation requires {expected} basis, state is in {found} basis")]
    WrongBasis { expected: String, found: String },

    #[error("state has (numerically) zero norm")]
    DegenerateState,

    #[error("pair ({index}, {}) is not in a definite vacuum channel (vacuum weight {weight})", index + 1)]
    Entanglement { index: usize, weight: f64 },

    #[error("state leaks out of the logical subspace (leaked mass {leaked})")]
    Leakage { leaked: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("scripted driver has no choice for step '{0}'")]
    ScriptExhausted(String),

    #[error("scripted outcome {outcome} is not allowed at step '{step}'")]
    ScriptMismatch { step: String, outcome: Charge },

    #[error("branch enumeration exceeded {0} branches")]
    TooManyBranches(usize),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
