use thiserror::Error;

/// Errors surfaced by model construction, solvers and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("model is not submodular: edge {edge} has margin {margin}")]
    NotSubmodular { edge: usize, margin: f64 },

    #[error("diversity measure is not concave: first differences increase from index {i} to {j}")]
    NotConcave { i: usize, j: usize },

    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),

    #[error("enumeration budget exceeded: instance needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("operation requires a solved network")]
    NotSolved,

    #[error("node {node} is already fixed to the opposite label")]
    ConflictingFix { node: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable code, used by the CLI for exit statuses.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "E_INVALID_INPUT",
            Error::DimensionMismatch { .. } => "E_DIMENSION",
            Error::NotSubmodular { .. } => "E_NOT_SUBMODULAR",
            Error::NotConcave { .. } => "E_NOT_CONCAVE",
            Error::NonPositiveLambda(_) => "E_BAD_LAMBDA",
            Error::BudgetExceeded { .. } => "E_BUDGET",
            Error::NotSolved => "E_NOT_SOLVED",
            Error::ConflictingFix { .. } => "E_CONFLICTING_FIX",
            Error::Parse { .. } => "E_PARSE",
            Error::Io(_) => "E_IO",
        }
    }
}
