//! Crate-wide error type and error categories for exit-code mapping.

use thiserror::Error;

use crate::audio::AudioError;
use crate::features::FeatureError;
use crate::nn::NnError;
use crate::notes::NoteError;
use crate::preprocess::PreprocessError;
use crate::synth::SynthError;
use crate::train::TrainError;

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad invocation or unusable configuration.
    Usage,
    /// Malformed or inconsistent input data.
    Data,
    /// Non-finite values or other numeric failure.
    Numeric,
}

#[derive(Debug, Error)]
pub enum RagaError {
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Note(#[from] NoteError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl RagaError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            RagaError::Audio(_) | RagaError::Preprocess(_) | RagaError::Note(_) | RagaError::Io(_) => {
                ErrorCategory::Data
            }
            RagaError::Feature(e) => e.category(),
            RagaError::Synth(e) => e.category(),
            RagaError::Nn(e) => e.category(),
            RagaError::Train(e) => e.category(),
        }
    }
}
