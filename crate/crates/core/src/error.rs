use thiserror::Error;

use crate::foundation::{MonadTag, Rational};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid label {0:?}: labels are non-empty tokens without whitespace or any of `:|;{{}}#=>`")]
    InvalidLabel(String),

    #[error("duplicate label {0:?} in finite set")]
    DuplicateLabel(String),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("monad tag mismatch: expected {expected}, found {found}")]
    TagMismatch { expected: MonadTag, found: MonadTag },

    #[error("weights must sum to exactly 1, got {sum}")]
    NotNormalized { sum: Rational },

    #[error("negative weight {weight} on element {element}")]
    NegativeWeight { element: usize, weight: Rational },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("composition error: {0}")]
    Composition(String),

    #[error("enumeration budget exceeded: {candidates} candidates > budget {budget}")]
    BudgetExceeded { candidates: u128, budget: u64 },

    #[error("process is not adapted: step {level} takes different values on block {block:?}")]
    NotAdapted { level: usize, block: Vec<usize> },

    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),

    #[error("map is not measure-preserving: {0}")]
    NotMeasurePreserving(String),

    #[error("map does not preserve the filtration: {0}")]
    NotFiltrationPreserving(String),

    #[error("canonicalization error: null point {0} has an empty fiber")]
    EmptyNullFiber(usize),

    #[error("gluing failed: process {process} step {level} differs on the positive-mass pair ({left}, {right})")]
    NotInvariant {
        process: &'static str,
        level: usize,
        left: usize,
        right: usize,
    },
}
