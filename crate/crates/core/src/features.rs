//! Feature extraction: STFT power spectra, a note-anchored triangular filter
//! bank, log energies, and the on-disk feature format.
//!
//! Instead of mel-spaced bins, each filter sits on one equal-temperament note:
//! bin `k` peaks at `note_frequency(anchor + k)` and falls to zero at the
//! neighboring notes, so a semitone transposition of the input shifts the
//! feature argmax by exactly one bin.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio::AudioClip;
use crate::error::ErrorCategory;
use crate::notes::{note_frequency, NoteIndex, A4_HZ};

/// Floor added to filter-bank energies before the log.
pub const LOG_EPSILON: f64 = 1e-10;

/// Default bin count: 56 bins anchored at B1. The top bin lands on F#6.
pub const DEFAULT_NUM_BINS: usize = 56;
/// Default anchor note (B1).
pub const DEFAULT_ANCHOR_MIDI: i32 = 35;

const FEATURE_MAGIC: &[u8; 4] = b"RGFB";
const FEATURE_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("invalid STFT config: {0}")]
    BadConfig(String),
    #[error("clip of {len} samples is shorter than one frame ({frame})")]
    TooShort { len: usize, frame: usize },
    #[error("clip rate {clip} does not match STFT config rate {config}")]
    RateMismatch { clip: u32, config: u32 },
    #[error("filter bin {bin} ({note}) has no spectrum bin inside its support; increase frame_size")]
    Resolution { bin: usize, note: String },
    #[error("filter bin {bin} needs {freq:.1} Hz, beyond Nyquist {nyquist:.1} Hz")]
    Nyquist { bin: usize, freq: f64, nyquist: f64 },
    #[error("spectrum has {got} frequency bins, filter bank expects {want}")]
    ShapeMismatch { got: usize, want: usize },
    #[error("anchor note out of grid: {0}")]
    BadAnchor(String),
    #[error("feature file: {0}")]
    FileFormat(String),
}

impl FeatureError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            FeatureError::BadConfig(_) | FeatureError::Resolution { .. } | FeatureError::Nyquist { .. } | FeatureError::BadAnchor(_) => ErrorCategory::Usage,
            _ => ErrorCategory::Data,
        }
    }
}

/// Short-time Fourier transform parameters (Hann window).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StftConfig {
    pub frame_size: usize,
    pub hop_size: usize,
    pub sample_rate: u32,
}

impl Default for StftConfig {
    fn default() -> Self {
        StftConfig {
            frame_size: 2048,
            hop_size: 512,
            sample_rate: 22050,
        }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        if !self.frame_size.is_power_of_two() || self.frame_size == 0 {
            return Err(FeatureError::BadConfig(format!(
                "frame_size {} must be a power of two",
                self.frame_size
            )));
        }
        if self.hop_size == 0 || self.hop_size > self.frame_size {
            return Err(FeatureError::BadConfig(format!(
                "hop_size {} must be in 1..=frame_size",
                self.hop_size
            )));
        }
        if self.sample_rate == 0 {
            return Err(FeatureError::BadConfig("sample_rate must be positive".into()));
        }
        Ok(())
    }

    /// Number of non-redundant spectrum bins, `frame_size/2 + 1`.
    pub fn spectrum_bins(&self) -> usize {
        self.frame_size / 2 + 1
    }

    /// Center frequency of spectrum bin `i` in Hz.
    pub fn bin_frequency(&self, i: usize) -> f64 {
        i as f64 * f64::from(self.sample_rate) / self.frame_size as f64
    }

    pub fn nyquist(&self) -> f64 {
        f64::from(self.sample_rate) / 2.0
    }

    /// Frame count for a clip of `len` samples.
    pub fn frame_count(&self, len: usize) -> usize {
        if len < self.frame_size {
            0
        } else {
            (len - self.frame_size) / self.hop_size + 1
        }
    }
}

/// Power spectrogram: `frames` rows of `bins` non-negative values.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    pub frames: usize,
    pub bins: usize,
    data: Vec<f64>,
}

impl PowerSpectrum {
    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.bins..(t + 1) * self.bins]
    }
}

/// Hann-windowed STFT power: frame `t` covers samples
/// `[t*hop, t*hop + frame)`, power is `|DFT|^2` over the first
/// `frame/2 + 1` bins.
pub fn stft_power(clip: &AudioClip, cfg: &StftConfig) -> Result<PowerSpectrum, FeatureError> {
    cfg.validate()?;
    if clip.sample_rate() != cfg.sample_rate {
        return Err(FeatureError::RateMismatch {
            clip: clip.sample_rate(),
            config: cfg.sample_rate,
        });
    }
    if clip.len() < cfg.frame_size {
        return Err(FeatureError::TooShort {
            len: clip.len(),
            frame: cfg.frame_size,
        });
    }
    let n = cfg.frame_size;
    let frames = cfg.frame_count(clip.len());
    let bins = cfg.spectrum_bins();

    // Periodic Hann window.
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect();

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let mut data = Vec::with_capacity(frames * bins);
    let samples = clip.samples();
    for t in 0..frames {
        let start = t * cfg.hop_size;
        for i in 0..n {
            buf[i] = Complex::new(f64::from(samples[start + i]) * window[i], 0.0);
        }
        fft.process(&mut buf);
        data.extend(buf[..bins].iter().map(|c| c.norm_sqr()));
    }
    Ok(PowerSpectrum { frames, bins, data })
}

/// Triangular filter bank anchored on the note grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    /// Dense weights, `num_bins` rows by `spectrum_bins` columns.
    weights: Vec<f64>,
    /// Half-open `[start, end)` span of nonzero columns per row.
    spans: Vec<(usize, usize)>,
    pub center_freqs: Vec<f64>,
    pub num_bins: usize,
    pub anchor: NoteIndex,
    cols: usize,
    stft: StftConfig,
    tuning_a4: f64,
}

impl FilterBank {
    pub fn weight(&self, bin: usize, col: usize) -> f64 {
        self.weights[bin * self.cols + col]
    }

    pub fn row(&self, bin: usize) -> &[f64] {
        &self.weights[bin * self.cols..(bin + 1) * self.cols]
    }

    pub fn spectrum_bins(&self) -> usize {
        self.cols
    }

    pub fn stft_config(&self) -> &StftConfig {
        &self.stft
    }

    /// Stable 64-bit hash of every parameter that shapes feature values.
    /// Written into feature files so mismatched features cannot be mixed.
    pub fn config_hash(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write(b"raga-features-v1");
        h.write_u64(self.stft.frame_size as u64);
        h.write_u64(self.stft.hop_size as u64);
        h.write_u64(u64::from(self.stft.sample_rate));
        h.write_u64(self.num_bins as u64);
        h.write_u64(self.anchor.midi() as u64);
        h.write_u64(self.tuning_a4.to_bits());
        h.write_u64(LOG_EPSILON.to_bits());
        h.finish()
    }
}

/// Build a triangular filter bank: bin `k` peaks (weight 1.0) at the spectrum
/// bin nearest `note_frequency(anchor + k)` and falls linearly to zero at the
/// two neighboring note frequencies.
pub fn build_filterbank(
    num_bins: usize,
    anchor: NoteIndex,
    cfg: &StftConfig,
) -> Result<FilterBank, FeatureError> {
    build_filterbank_tuned(num_bins, anchor, cfg, A4_HZ)
}

/// [`build_filterbank`] with an explicit A4 tuning.
pub fn build_filterbank_tuned(
    num_bins: usize,
    anchor: NoteIndex,
    cfg: &StftConfig,
    tuning_a4: f64,
) -> Result<FilterBank, FeatureError> {
    cfg.validate()?;
    if num_bins == 0 {
        return Err(FeatureError::BadConfig("num_bins must be positive".into()));
    }
    let note = |offset: i32| -> Result<f64, FeatureError> {
        anchor
            .offset(offset)
            .map(|n| note_frequency(n, tuning_a4))
            .map_err(|e| FeatureError::BadAnchor(e.to_string()))
    };

    let cols = cfg.spectrum_bins();
    let nyquist = cfg.nyquist();
    let mut weights = vec![0.0f64; num_bins * cols];
    let mut spans = Vec::with_capacity(num_bins);
    let mut center_freqs = Vec::with_capacity(num_bins);

    for k in 0..num_bins {
        let left = note(k as i32 - 1)?;
        let center = note(k as i32)?;
        let right = note(k as i32 + 1)?;
        if right >= nyquist {
            return Err(FeatureError::Nyquist {
                bin: k,
                freq: right,
                nyquist,
            });
        }
        // Spectrum bins strictly inside the open support (left, right).
        let first = (left / cfg.bin_frequency(1)).floor() as usize + 1;
        let mut support = Vec::new();
        for i in first..cols {
            let f = cfg.bin_frequency(i);
            if f >= right {
                break;
            }
            if f > left {
                support.push(i);
            }
        }
        let note_name = anchor.offset(k as i32).map(|n| n.to_string()).unwrap_or_default();
        if support.is_empty() {
            return Err(FeatureError::Resolution { bin: k, note: note_name });
        }
        // Apex: the support bin nearest the center note, ties toward lower.
        let apex = *support
            .iter()
            .min_by(|&&a, &&b| {
                let da = (cfg.bin_frequency(a) - center).abs();
                let db = (cfg.bin_frequency(b) - center).abs();
                da.partial_cmp(&db).unwrap().then(a.cmp(&b))
            })
            .expect("support is nonempty");
        let f_apex = cfg.bin_frequency(apex);
        for &i in &support {
            let f = cfg.bin_frequency(i);
            let w = if f <= f_apex {
                (f - left) / (f_apex - left)
            } else {
                (right - f) / (right - f_apex)
            };
            weights[k * cols + i] = w;
        }
        spans.push((support[0], support[support.len() - 1] + 1));
        center_freqs.push(center);
    }

    Ok(FilterBank {
        weights,
        spans,
        center_freqs,
        num_bins,
        anchor,
        cols,
        stft: *cfg,
        tuning_a4,
    })
}

/// Log filter-bank energies: `frames` rows of `num_bins` values, each
/// `ln(energy + LOG_EPSILON)`. Stored as f32; the on-disk format round-trips
/// bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub num_frames: usize,
    pub num_bins: usize,
    pub config_hash: u64,
    /// Identifier of the source clip; informational, not serialized.
    pub clip_id: String,
    values: Vec<f32>,
}

impl FeatureMatrix {
    pub fn from_values(
        num_frames: usize,
        num_bins: usize,
        config_hash: u64,
        values: Vec<f32>,
    ) -> Result<FeatureMatrix, FeatureError> {
        if values.len() != num_frames * num_bins {
            return Err(FeatureError::ShapeMismatch {
                got: values.len(),
                want: num_frames * num_bins,
            });
        }
        Ok(FeatureMatrix {
            num_frames,
            num_bins,
            config_hash,
            clip_id: String::new(),
            values,
        })
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn row(&self, t: usize) -> &[f32] {
        &self.values[t * self.num_bins..(t + 1) * self.num_bins]
    }

    /// Index of the largest value in frame `t` (lowest index on ties).
    pub fn argmax_row(&self, t: usize) -> usize {
        let row = self.row(t);
        let mut best = 0;
        for (i, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = i;
            }
        }
        best
    }

    pub fn with_clip_id(mut self, id: &str) -> Self {
        self.clip_id = id.to_string();
        self
    }
}

/// Weight the power spectrum through the filter bank and apply the log.
pub fn apply_filterbank(power: &PowerSpectrum, fb: &FilterBank) -> Result<FeatureMatrix, FeatureError> {
    if power.bins != fb.cols {
        return Err(FeatureError::ShapeMismatch {
            got: power.bins,
            want: fb.cols,
        });
    }
    let mut values = Vec::with_capacity(power.frames * fb.num_bins);
    for t in 0..power.frames {
        let row = power.row(t);
        for k in 0..fb.num_bins {
            let (start, end) = fb.spans[k];
            let w = &fb.row(k)[start..end];
            let energy: f64 = row[start..end].iter().zip(w).map(|(p, w)| p * w).sum();
            values.push((energy + LOG_EPSILON).ln() as f32);
        }
    }
    Ok(FeatureMatrix {
        num_frames: power.frames,
        num_bins: fb.num_bins,
        config_hash: fb.config_hash(),
        clip_id: String::new(),
        values,
    })
}

/// Full pipeline for one clip: STFT power, filter bank, log.
pub fn extract_features(
    clip: &AudioClip,
    cfg: &StftConfig,
    fb: &FilterBank,
) -> Result<FeatureMatrix, FeatureError> {
    if fb.stft != *cfg {
        return Err(FeatureError::BadConfig(
            "filter bank was built for a different STFT config".into(),
        ));
    }
    let power = stft_power(clip, cfg)?;
    apply_filterbank(&power, fb)
}

/// Serialize a feature matrix: magic `RGFB`, version, frame and bin counts,
/// config hash, then row-major f32 little-endian values.
pub fn write_features(fm: &FeatureMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 4 * fm.values.len());
    out.extend_from_slice(FEATURE_MAGIC);
    out.extend_from_slice(&FEATURE_VERSION.to_le_bytes());
    out.extend_from_slice(&(fm.num_frames as u32).to_le_bytes());
    out.extend_from_slice(&(fm.num_bins as u32).to_le_bytes());
    out.extend_from_slice(&fm.config_hash.to_le_bytes());
    for v in &fm.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Inverse of [`write_features`].
pub fn read_features(bytes: &[u8]) -> Result<FeatureMatrix, FeatureError> {
    let fail = |msg: &str| FeatureError::FileFormat(msg.to_string());
    if bytes.len() < 20 {
        return Err(fail("file shorter than header"));
    }
    if &bytes[0..4] != FEATURE_MAGIC {
        return Err(fail("bad magic"));
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != FEATURE_VERSION {
        return Err(FeatureError::FileFormat(format!("unsupported version {version}")));
    }
    let num_frames = u32_at(8) as usize;
    let num_bins = u32_at(12) as usize;
    let config_hash = u64::from_le_bytes(bytes[16..24].try_into().map_err(|_| fail("file shorter than header"))?);
    let want = 24 + 4 * num_frames * num_bins;
    if bytes.len() != want {
        return Err(FeatureError::FileFormat(format!(
            "expected {want} bytes, got {}",
            bytes.len()
        )));
    }
    let values = bytes[24..]
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    Ok(FeatureMatrix {
        num_frames,
        num_bins,
        config_hash,
        clip_id: String::new(),
        values,
    })
}

/// FNV-1a, 64-bit. Stable across platforms and releases, unlike the
/// standard library's hasher.
struct Fnv64(u64);

impl Fnv64 {
    fn new() -> Self {
        Fnv64(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    fn finish(&self) -> u64 {
        self.0
    }
}
