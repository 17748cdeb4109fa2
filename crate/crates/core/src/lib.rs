//! Carnatic raga classification pipeline.
//!
//! The crate covers the whole path from raw audio to a trained classifier:
//!
//! * [`audio`] — WAV decode/encode, mono mixdown, windowed-sinc resampling
//! * [`preprocess`] — edge trimming and fixed-duration segmentation
//! * [`notes`] — equal-temperament note math, swara ratios, raga scale specs
//! * [`features`] — STFT power spectra and the note-anchored triangular
//!   filter bank that replaces mel bins
//! * [`synth`] — deterministic synthetic raga-clip generator (scales plus
//!   kampita/jaru ornaments) for desk-scale experiments
//! * [`nn`] — dense-tensor neural network core (Conv1D, MaxPool, BatchNorm,
//!   ReLU, LSTM, Dense, Dropout, Softmax) with hand-written reverse-mode
//!   gradients and Adam
//! * [`train`] — manifests, recording-level splits, the training loop with
//!   early stopping, evaluation and prediction

pub mod audio;
pub mod error;
pub mod features;
pub mod nn;
pub mod notes;
pub mod preprocess;
pub mod synth;
pub mod train;

pub use audio::AudioClip;
pub use error::RagaError;
pub use features::{FeatureMatrix, FilterBank, StftConfig};
pub use nn::{Model, ModelConfig, Tensor};
pub use notes::{NoteIndex, RagaLabel, ScaleSpec};
pub use preprocess::SegmentationConfig;
pub use synth::SynthConfig;
pub use train::{Manifest, TrainConfig};
