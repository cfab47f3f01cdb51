//! Desk-scale contrastive training of a mean-pooled embedding-table encoder.
//!
//! Positive pairs come from single documents (inverse cloze task or two
//! independent crops, optionally with random token deletion). Each query is
//! scored against its own key, the other keys of the batch, and a FIFO queue
//! of keys from earlier batches, under the InfoNCE loss.

mod encoder;
mod loss;
mod pairs;
mod train;

use thiserror::Error;

use crate::dense::DenseError;

pub use encoder::EncoderState;
pub use loss::{info_nce, info_nce_grad, info_nce_grad_with, info_nce_with, InfoNceGrad, ScoreFn};
pub use pairs::{augment, make_crop_pair, make_ict_pair, make_pair, PairConfig, PairMethod};
pub use train::{train, train_step, ContrastiveBatch, NegativeQueue, TrainConfig, TrainOutcome};

/// Default capacity of the cross-batch negative queue.
pub const DEFAULT_QUEUE_CAPACITY: usize = 256;

#[derive(Debug, Error)]
pub enum ContrastiveError {
    #[error("need at least 2 tokens to build a pair, got {0}")]
    TooShort(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),
    #[error("batch provides no negatives for some pair")]
    DegenerateBatch,
    #[error("no trainable documents or vocabulary")]
    EmptyVocabulary,
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Checkpoint(#[from] DenseError),
}

impl ContrastiveError {
    pub fn name(&self) -> &'static str {
        match self {
            ContrastiveError::TooShort(_) => "TooShort",
            ContrastiveError::DimensionMismatch { .. } => "DimensionMismatch",
            ContrastiveError::NonPositiveTemperature(_) => "NonPositiveTemperature",
            ContrastiveError::DegenerateBatch => "DegenerateBatch",
            ContrastiveError::EmptyVocabulary => "EmptyVocabulary",
            ContrastiveError::InvalidConfig(_) => "InvalidConfig",
            ContrastiveError::Checkpoint(e) => e.name(),
        }
    }
}
