//! Clip conditioning: edge trimming and fixed-duration segmentation with
//! silent padding.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio::AudioClip;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("trim fraction {0} invalid: need 0 <= f and 2f < 1")]
    BadTrimFraction(f64),
    #[error("clip degenerate after trim: {0} samples left (need at least 10)")]
    DegenerateClip(usize),
    #[error("clip rate {clip} does not match configured rate {config}")]
    SampleRateMismatch { clip: u32, config: u32 },
}

/// Trimming and segmentation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    /// Fraction removed from each end of a clip; must satisfy `2f < 1`.
    pub trim_fraction: f64,
    pub segment_seconds: f64,
    pub sample_rate: u32,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig {
            trim_fraction: 0.10,
            segment_seconds: 30.0,
            sample_rate: 22050,
        }
    }
}

impl SegmentationConfig {
    /// Segment length in samples, rounded once and reused everywhere.
    pub fn segment_samples(&self) -> usize {
        (self.segment_seconds * f64::from(self.sample_rate)).round() as usize
    }

    fn validate(&self) -> Result<(), PreprocessError> {
        if !(self.trim_fraction >= 0.0 && 2.0 * self.trim_fraction < 1.0) {
            return Err(PreprocessError::BadTrimFraction(self.trim_fraction));
        }
        Ok(())
    }
}

/// Keep the middle `1 - 2 * trim_fraction` of a clip; the leading cut starts
/// at index `floor(len * trim_fraction)`.
pub fn trim(clip: &AudioClip, cfg: &SegmentationConfig) -> Result<AudioClip, PreprocessError> {
    cfg.validate()?;
    let len = clip.len();
    let start = (len as f64 * cfg.trim_fraction).floor() as usize;
    let end = len - start;
    let kept = end - start;
    if kept < 10 {
        return Err(PreprocessError::DegenerateClip(kept));
    }
    let samples = clip.samples()[start..end].to_vec();
    Ok(AudioClip::new(samples, clip.sample_rate()).expect("samples already validated"))
}

/// Split a clip into `ceil(len / segment_samples)` segments of exactly
/// `segment_samples` each, zero-padding the tail of the last one. An empty
/// clip yields an empty list.
pub fn segment(clip: &AudioClip, cfg: &SegmentationConfig) -> Result<Vec<AudioClip>, PreprocessError> {
    cfg.validate()?;
    if clip.sample_rate() != cfg.sample_rate {
        return Err(PreprocessError::SampleRateMismatch {
            clip: clip.sample_rate(),
            config: cfg.sample_rate,
        });
    }
    let seg = cfg.segment_samples();
    let mut out = Vec::new();
    for chunk in clip.samples().chunks(seg) {
        let mut samples = chunk.to_vec();
        samples.resize(seg, 0.0);
        out.push(AudioClip::new(samples, cfg.sample_rate).expect("validated samples"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_clip(len: usize, rate: u32) -> AudioClip {
        let samples = (0..len).map(|i| (i % 997) as f32 / 1000.0).collect();
        AudioClip::new(samples, rate).unwrap()
    }

    fn cfg(trim_fraction: f64, segment_seconds: f64, sample_rate: u32) -> SegmentationConfig {
        SegmentationConfig {
            trim_fraction,
            segment_seconds,
            sample_rate,
        }
    }

    #[test]
    fn ten_percent_trim_keeps_the_middle_eighty() {
        // 100 s at 1 kHz for easy arithmetic.
        let clip = ramp_clip(100_000, 1000);
        let out = trim(&clip, &cfg(0.10, 30.0, 1000)).unwrap();
        assert_eq!(out.len(), 80_000);
        assert_eq!(out.samples()[0], clip.samples()[10_000]);
    }

    #[test]
    fn zero_trim_is_identity() {
        let clip = ramp_clip(1234, 22050);
        assert_eq!(trim(&clip, &cfg(0.0, 30.0, 22050)).unwrap(), clip);
    }

    #[test]
    fn trim_indices_follow_floor_rule() {
        let clip = ramp_clip(1000, 22050);
        let out = trim(&clip, &cfg(0.10, 30.0, 22050)).unwrap();
        assert_eq!(out.len(), 800);
        assert_eq!(out.samples(), &clip.samples()[100..900]);
    }

    #[test]
    fn over_trimmed_clip_is_degenerate() {
        let clip = ramp_clip(11, 22050);
        let err = trim(&clip, &cfg(0.4, 30.0, 22050)).unwrap_err();
        assert_eq!(err, PreprocessError::DegenerateClip(3));
    }

    #[test]
    fn eighty_seconds_make_three_padded_segments() {
        let clip = ramp_clip(80_000, 1000);
        let segs = segment(&clip, &cfg(0.1, 30.0, 1000)).unwrap();
        assert_eq!(segs.len(), 3);
        assert!(segs.iter().all(|s| s.len() == 30_000));
        // Third segment: 20 s of signal, 10 s of zeros.
        assert_eq!(&segs[2].samples()[..20_000], &clip.samples()[60_000..]);
        assert!(segs[2].samples()[20_000..].iter().all(|&s| s == 0.0));
    }

    #[test]
    fn exact_fit_yields_one_unpadded_segment() {
        let clip = ramp_clip(30_000, 1000);
        let segs = segment(&clip, &cfg(0.1, 30.0, 1000)).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0], clip);
    }

    #[test]
    fn empty_clip_yields_no_segments() {
        let clip = AudioClip::new(vec![], 22050).unwrap();
        assert_eq!(segment(&clip, &SegmentationConfig::default()).unwrap(), vec![]);
    }

    #[test]
    fn rate_mismatch_is_rejected() {
        let clip = ramp_clip(100, 44100);
        let err = segment(&clip, &SegmentationConfig::default()).unwrap_err();
        assert_eq!(
            err,
            PreprocessError::SampleRateMismatch {
                clip: 44100,
                config: 22050
            }
        );
    }

    #[test]
    fn thirty_seconds_at_pipeline_rate_is_661500_samples() {
        assert_eq!(SegmentationConfig::default().segment_samples(), 661_500);
    }
}
