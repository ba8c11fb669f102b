use thiserror::Error;

/// Errors produced by the toolkit's library layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MbanError {
    /// A configuration and a network disagree on the number of automata.
    #[error("dimension mismatch: network has {expected} automata, configuration has {actual}")]
    Dimension { expected: usize, actual: usize },

    /// The density classification task is only defined for odd sizes.
    #[error("size {n} is even: global majority is undefined")]
    EvenSize { n: usize },

    /// A generator or verifier precondition was violated.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The orbit did not close within the caller-supplied step budget.
    #[error("orbit did not close within {max_steps} steps (needs {required})")]
    BudgetExceeded { max_steps: u64, required: u64 },

    /// The request exceeds a hard size budget of the relevant operation.
    #[error("{what} refused for n={n}: supported only up to n={max} ({detail})")]
    TooLarge {
        what: &'static str,
        n: usize,
        max: usize,
        detail: String,
    },

    /// A graph or configuration file could not be parsed.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// Reading or writing a checkpoint/graph file failed.
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, MbanError>;
