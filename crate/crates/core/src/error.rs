use thiserror::Error;

use crate::semiring::SemiringId;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("semiring mismatch: {left} vs {right}")]
    SemiringMismatch { left: SemiringId, right: SemiringId },
    #[error("no multiplicative inverse: {0}")]
    NoInverse(String),
    #[error("marginal mismatch: {0}")]
    MarginalMismatch(String),
    #[error("object mismatch: expected {expected}, found {found}")]
    ObjectMismatch { expected: String, found: String },
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("not summable: {0}")]
    NotSummable(String),
    #[error("non-integral coefficient: {0}")]
    NonIntegral(String),
    #[error("invalid morphism: {0}")]
    Invalid(String),
    #[error("bound violation: {0}")]
    BoundViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("type error: {0}")]
    Type(String),
}

pub type Result<T> = std::result::Result<T, Error>;
