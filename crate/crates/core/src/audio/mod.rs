//! Canonical mono audio clips and the operations that produce them.

mod resample;
mod wav;

pub use resample::resample;
pub use wav::{decode_wav, decode_wav_stats, encode_wav, DecodeStats};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("malformed WAV: {0}")]
    Format(String),
    #[error("unsupported WAV encoding: {0}")]
    Unsupported(String),
    #[error("sample rate must be positive")]
    ZeroSampleRate,
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
}

/// A mono clip: 32-bit float samples in [-1, 1] at a fixed sample rate.
///
/// Clips are immutable after construction; every operation returns a new one.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f32>,
    sample_rate: u32,
}

impl AudioClip {
    /// Build a clip, hard-clipping samples outside [-1, 1]. Non-finite
    /// samples are rejected.
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self, AudioError> {
        Ok(Self::new_counting_clipped(samples, sample_rate)?.0)
    }

    /// Like [`AudioClip::new`], also reporting how many samples were clipped.
    pub fn new_counting_clipped(
        mut samples: Vec<f32>,
        sample_rate: u32,
    ) -> Result<(Self, usize), AudioError> {
        if sample_rate == 0 {
            return Err(AudioError::ZeroSampleRate);
        }
        let mut clipped = 0usize;
        for (i, s) in samples.iter_mut().enumerate() {
            if !s.is_finite() {
                return Err(AudioError::NonFiniteSample(i));
            }
            if *s > 1.0 {
                *s = 1.0;
                clipped += 1;
            } else if *s < -1.0 {
                *s = -1.0;
                clipped += 1;
            }
        }
        Ok((
            AudioClip {
                samples,
                sample_rate,
            },
            clipped,
        ))
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_clips_out_of_range_samples() {
        let (clip, clipped) =
            AudioClip::new_counting_clipped(vec![0.5, 1.5, -2.0, -0.25], 22050).unwrap();
        assert_eq!(clip.samples(), &[0.5, 1.0, -1.0, -0.25]);
        assert_eq!(clipped, 2);
    }

    #[test]
    fn nan_samples_are_rejected() {
        let err = AudioClip::new(vec![0.0, f32::NAN], 22050).unwrap_err();
        assert!(matches!(err, AudioError::NonFiniteSample(1)));
    }

    #[test]
    fn duration_follows_from_length_and_rate() {
        let clip = AudioClip::new(vec![0.0; 44100], 22050).unwrap();
        assert_eq!(clip.duration_seconds(), 2.0);
    }
}
