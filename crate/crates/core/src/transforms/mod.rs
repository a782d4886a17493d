//! Explicit predictor constructions: extension to unbounded words, reduction of
//! `n`-valued prediction to two-valued and `(n-1)`-valued prediction, prediction
//! of words constant on a set, and predictors read off slalom block systems.

mod reductions;
mod slalom;

pub use reductions::{
    clamp_word, combine_predictors, extend_predictor_to_omega, indicator_split, predictor_from_unsplit_set,
};
pub use slalom::{
    block_range, block_start, find_merge_point, linear_merge_point, linear_predictor_from_slalom,
    predictor_from_slalom, LinearSlalomSystem, SlalomBlockSystem,
};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::predict::PredictError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("word of length {word} is longer than the bound word of length {bounds}")]
    LengthMismatch { word: usize, bounds: usize },
    #[error("predictor space does not match the bound word")]
    SpecMismatch,
    #[error("reduced predictor index {index} has no matching position among {available} indicator indices")]
    EnumerationMismatch { index: usize, available: usize },
    #[error("entry {value} at position {position} is not below {bound}")]
    ValueOutOfRange { position: usize, value: u64, bound: u64 },
    #[error("index set has {0} elements, at least 2 are needed")]
    SetTooSmall(usize),
    #[error("index set is not strictly increasing")]
    NotIncreasing,
    #[error("block {block} has {count} options, at most {block} are allowed")]
    TooManyOptions { block: usize, count: usize },
    #[error("block {block} must carry no options")]
    DegenerateBlock { block: usize },
    #[error("option {option} of block {block} has length {len}, expected {expected}")]
    OptionLength { block: usize, option: usize, len: usize, expected: usize },
    #[error("option {option} of block {block} leaves the space")]
    OptionOutsideSpace { block: usize, option: usize },
    #[error("space horizon {got} does not match the blocks, expected {expected}")]
    BlockHorizon { expected: usize, got: usize },
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
