//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GivensError {
    #[error("matrix dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("invalid initial permutation: {0}")]
    InvalidPermutation(String),

    #[error("restriction bound m = {m} must satisfy 1 <= m <= n = {n}")]
    InvalidRestriction { m: usize, n: usize },

    #[error("parameter vector has length {got} but the schedule has {expected} active pairs")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{what} index {index} out of range for dimension {bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("rotation indices must differ, got i = j = {0}")]
    DegeneratePair(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("pair ({i},{j}) is not active in this schedule")]
    InactivePair { i: usize, j: usize },
}

pub type Result<T> = std::result::Result<T, GivensError>;
