use thiserror::Error;

use crate::presentation::SpecError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),

    #[error("capacity exceeded: {what} needs {needed}, limit is {limit}")]
    CapacityExceeded {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("level overflow: level {level} cannot be shifted inside a depth-{depth} tower")]
    LevelOverflow { level: usize, depth: usize },

    #[error("unknown generator {0}")]
    UnknownGenerator(String),

    #[error("input is not unitary: {0}")]
    NonUnitary(String),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("element does not have order dividing {0}")]
    OrderMismatch(u64),

    #[error("depth budget {budget} exhausted while searching for {what}")]
    DepthBudget { what: String, budget: usize },

    #[error("algebra closure did not stabilize after {0} rounds")]
    NonConvergence(usize),

    #[error("expectation does not have the form a·e4 + b·(1 - e4): deviation {deviation:.3e}")]
    StructureMismatch {
        deviation: f64,
        alpha: f64,
        beta: f64,
        matrix: Vec<Vec<[f64; 2]>>,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Spec(#[from] SpecError),

    #[error("malformed tower file: {0}")]
    MalformedTower(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn capacity(what: impl Into<String>, needed: u128, limit: u128) -> Error {
    Error::CapacityExceeded {
        what: what.into(),
        needed,
        limit,
    }
}
