use thiserror::Error;

/// Errors raised by the engine.
///
/// Variants marked as theory violations indicate that an assertion the
/// mathematics guarantees has failed; callers surface them with a distinct
/// exit status.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by a non-unit: {0}")]
    NonUnit(String),

    #[error("2 is not invertible in the coefficient ring")]
    TwoNotInvertible,

    #[error("datum mismatch: {0}")]
    DatumMismatch(String),

    #[error("invalid Cartan datum: {0}")]
    InvalidDatum(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("element lies outside the enumerated region (length bound {0})")]
    OutsideRegion(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("morphism has no generator decomposition")]
    NoGeneratorWord,

    #[error("affine datum requires an explicit top element or length bound")]
    MissingTop,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dependency cycle detected in cache for key {0}")]
    Cycle(String),

    #[error("theory violation: {0}")]
    TheoryViolation(String),
}

impl Error {
    pub fn is_theory_violation(&self) -> bool {
        matches!(self, Error::TheoryViolation(_) | Error::Cycle(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
