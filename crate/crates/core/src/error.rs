use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("no subset-sum solution for l={l:?}, p={p}")]
    EmptySolutionSet { l: Vec<u64>, p: u64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("rotation spec is not unitary (max |R\u{2020}R - I| = {max_dev:.3e})")]
    NonUnitaryRotation { max_dev: f64 },

    #[error("coset state oracle exhausted after {consumed} states")]
    OracleExhausted { consumed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
