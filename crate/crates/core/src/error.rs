use thiserror::Error;

/// Errors raised by constructors, validators and numeric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid subsystem index {index} (operator has {count} subsystems)")]
    InvalidSubsystem { index: usize, count: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("trace is {0}, expected 1")]
    NotUnitTrace(f64),
    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("dimension budget exceeded: need {needed}, limit {limit}")]
    Budget { needed: u128, limit: u128 },
    #[error("twisting is not controlled in the key basis: {0}")]
    NotControlled(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
