//! Synthetic raga clips: scales rendered as sine sweeps with optional
//! kampita (oscillation) or jaru (glide) ornaments, at any tonic, fully
//! determined by a seed.

use std::io;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::audio::{encode_wav, AudioClip};
use crate::error::ErrorCategory;
use crate::notes::ScaleSpec;
use crate::train::manifest::{Manifest, ManifestRow};

/// Peak amplitude of the rendered tones; leaves headroom for noise.
const TONE_AMP: f64 = 0.8;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("scale pitch {pitch:.1} Hz exceeds the filter range limit {limit:.1} Hz")]
    PitchOutOfRange { pitch: f64, limit: f64 },
    #[error("synthesis needs at least one scale and one shruti")]
    EmptyInput,
    #[error("writing dataset: {0}")]
    Io(#[from] io::Error),
}

impl SynthError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            SynthError::Io(_) => ErrorCategory::Data,
            _ => ErrorCategory::Usage,
        }
    }
}

/// Pitch ornament applied to every rendered swara.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Gamaka {
    #[default]
    None,
    /// Sinusoidal oscillation touching the notes one semitone above and below.
    Kampita,
    /// Glide from two semitones above or below into the true pitch over the
    /// first 30% of the note; direction drawn per note.
    Jaru,
}

impl Gamaka {
    pub fn parse(s: &str) -> Option<Gamaka> {
        match s {
            "none" => Some(Gamaka::None),
            "kampita" => Some(Gamaka::Kampita),
            "jaru" => Some(Gamaka::Jaru),
            _ => None,
        }
    }
}

impl std::fmt::Display for Gamaka {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Gamaka::None => "none",
            Gamaka::Kampita => "kampita",
            Gamaka::Jaru => "jaru",
        })
    }
}

/// Generator parameters. The seed fully determines the output.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// The shruti: frequency of Sa in Hz.
    pub tonic_hz: f64,
    pub note_seconds: f64,
    /// When set, `note_seconds` is derived per scale so every clip lasts
    /// this long regardless of how many swaras the scale has.
    pub clip_seconds: Option<f64>,
    pub gamaka: Gamaka,
    /// Noise floor in dB relative to the tone amplitude.
    pub noise_db: f64,
    pub seed: u64,
    pub sample_rate: u32,
    /// Highest admissible pitch; defaults to the upper shoulder of the
    /// default filter bank (one semitone above its top center).
    pub max_pitch_hz: f64,
    pub kampita_rate_hz: f64,
    /// How many pseudo-recordings each class's clips are grouped into.
    pub recordings_per_class: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            tonic_hz: 130.81,
            note_seconds: 0.5,
            clip_seconds: None,
            gamaka: Gamaka::None,
            noise_db: -60.0,
            seed: 0,
            sample_rate: 22050,
            max_pitch_hz: 1567.98,
            kampita_rate_hz: 6.0,
            recordings_per_class: 10,
        }
    }
}

/// Pitch trajectory in Hz per sample for one swara of nominal length `len`.
/// `jaru_from_below` is only read in jaru mode.
pub fn gamaka_trajectory(
    base_hz: f64,
    mode: Gamaka,
    len: usize,
    sample_rate: u32,
    kampita_rate_hz: f64,
    jaru_from_below: bool,
) -> Vec<f64> {
    match mode {
        Gamaka::None => vec![base_hz; len],
        Gamaka::Kampita => (0..len)
            .map(|t| {
                let phase = 2.0 * std::f64::consts::PI * kampita_rate_hz * t as f64
                    / f64::from(sample_rate);
                base_hz * (phase.sin() / 12.0).exp2()
            })
            .collect(),
        Gamaka::Jaru => {
            let glide = ((len as f64) * 0.3).round() as usize;
            let start_semitones = if jaru_from_below { -2.0 } else { 2.0 };
            (0..len)
                .map(|t| {
                    if t < glide {
                        let remaining = 1.0 - t as f64 / glide as f64;
                        base_hz * (start_semitones * remaining / 12.0).exp2()
                    } else {
                        base_hz
                    }
                })
                .collect()
        }
    }
}

/// Trajectory for a swara given as a ratio to the tonic; the jaru direction
/// is drawn from the config seed.
pub fn synth_gamaka(base_ratio: f64, mode: Gamaka, cfg: &SynthConfig) -> Vec<f64> {
    let len = (cfg.note_seconds * f64::from(cfg.sample_rate)).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    gamaka_trajectory(
        cfg.tonic_hz * base_ratio,
        mode,
        len,
        cfg.sample_rate,
        cfg.kampita_rate_hz,
        rng.random(),
    )
}

/// Highest pitch the configured gamaka can reach from a base pitch.
fn gamaka_headroom(mode: Gamaka) -> f64 {
    match mode {
        Gamaka::None => 1.0,
        Gamaka::Kampita => (1.0f64 / 12.0).exp2(),
        Gamaka::Jaru => (2.0f64 / 12.0).exp2(),
    }
}

/// Render a scale: arohanam then avarohanam, one sine per swara with 10 ms
/// raised-cosine cross-fades at the note boundaries, plus a white-noise
/// floor. Deterministic in the seed.
pub fn synth_scale_clip(scale: &ScaleSpec, cfg: &SynthConfig) -> Result<AudioClip, SynthError> {
    let degrees = scale.sung_degrees();
    let note_seconds = match cfg.clip_seconds {
        Some(total) => total / degrees.len() as f64,
        None => cfg.note_seconds,
    };
    let sr = f64::from(cfg.sample_rate);
    let total_len = (degrees.len() as f64 * note_seconds * sr).round() as usize;

    let headroom = gamaka_headroom(cfg.gamaka);
    for d in &degrees {
        let top = cfg.tonic_hz * d.ratio() * headroom;
        if top > cfg.max_pitch_hz {
            return Err(SynthError::PitchOutOfRange {
                pitch: top,
                limit: cfg.max_pitch_hz,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let jaru_dirs: Vec<bool> = (0..degrees.len()).map(|_| rng.random()).collect();

    // 5 ms each side of a boundary: 10 ms of overlap per cross-fade.
    let half = (0.005 * sr).round() as usize;
    let ramp = |u: f64| 0.5 * (1.0 - (std::f64::consts::PI * u.clamp(0.0, 1.0)).cos());

    let mut mix = vec![0.0f64; total_len];
    for (i, degree) in degrees.iter().enumerate() {
        let start = (i as f64 * note_seconds * sr).round() as usize;
        let end = ((i + 1) as f64 * note_seconds * sr).round() as usize;
        let nominal = end - start;
        let traj = gamaka_trajectory(
            cfg.tonic_hz * degree.ratio(),
            cfg.gamaka,
            nominal,
            cfg.sample_rate,
            cfg.kampita_rate_hz,
            jaru_dirs[i],
        );
        let span_start = start.saturating_sub(half);
        let span_end = (end + half).min(total_len);
        let mut phase = 0.0f64;
        for t in span_start..span_end {
            let f = traj[(t.max(start) - start).min(nominal.saturating_sub(1))];
            let gain_in = ramp((t as f64 - (start as f64 - half as f64)) / (2.0 * half as f64));
            let gain_out = 1.0 - ramp((t as f64 - (end as f64 - half as f64)) / (2.0 * half as f64));
            mix[t] += TONE_AMP * phase.sin() * gain_in.min(gain_out);
            phase += 2.0 * std::f64::consts::PI * f / sr;
        }
    }

    let sigma = TONE_AMP * 10f64.powf(cfg.noise_db / 20.0);
    let noise = Normal::new(0.0, sigma).expect("valid sigma");
    let samples: Vec<f32> = mix
        .into_iter()
        .map(|s| (s + noise.sample(&mut rng)) as f32)
        .collect();
    Ok(AudioClip::new(samples, cfg.sample_rate).expect("finite samples"))
}

/// Generate `per_class` clips for every scale, cycling tonics through
/// `shruti_set` per pseudo-recording, and write WAVs plus `manifest.csv`
/// under `out_dir`. Clip seeds derive as `seed + class * per_class + i`.
pub fn synth_dataset(
    scales: &[ScaleSpec],
    per_class: usize,
    shruti_set: &[f64],
    cfg: &SynthConfig,
    out_dir: &Path,
) -> Result<Manifest, SynthError> {
    if scales.is_empty() || shruti_set.is_empty() || per_class == 0 {
        return Err(SynthError::EmptyInput);
    }
    let recordings = cfg.recordings_per_class.clamp(1, per_class);
    let mut rows = Vec::with_capacity(scales.len() * per_class);
    for (class, scale) in scales.iter().enumerate() {
        let dir = out_dir.join(&scale.name);
        std::fs::create_dir_all(&dir)?;
        for i in 0..per_class {
            let recording = i % recordings;
            let tonic = shruti_set[recording % shruti_set.len()];
            let clip_cfg = SynthConfig {
                tonic_hz: tonic,
                seed: cfg.seed + (class * per_class + i) as u64,
                ..cfg.clone()
            };
            let clip = synth_scale_clip(scale, &clip_cfg)?;
            let path = dir.join(format!("{}_{:03}.wav", scale.name, i));
            std::fs::write(&path, encode_wav(&clip))?;
            rows.push(ManifestRow {
                path: path.to_string_lossy().into_owned(),
                raga: scale.name.clone(),
                recording_id: format!("{}-r{:02}", scale.name, recording),
                tonic_hz: Some(tonic),
            });
        }
    }
    let manifest = Manifest::from_rows(rows);
    std::fs::write(out_dir.join("manifest.csv"), manifest.to_csv())?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notes::parse_scale_specs;

    fn mohanam() -> ScaleSpec {
        parse_scale_specs("mohanam,S R2 G3 P D2 S';S' D2 P G3 R2 S")
            .unwrap()
            .remove(0)
    }

    #[test]
    fn constant_trajectory_without_gamaka() {
        let traj = gamaka_trajectory(220.0, Gamaka::None, 100, 22050, 6.0, false);
        assert!(traj.iter().all(|&f| f == 220.0));
    }

    #[test]
    fn kampita_extremes_touch_the_adjacent_semitones() {
        // At 24 kHz a 6 Hz oscillation peaks exactly on sample 1000.
        let base = 220.0;
        let traj = gamaka_trajectory(base, Gamaka::Kampita, 4001, 24000, 6.0, false);
        let up = base * (1.0f64 / 12.0).exp2();
        let down = base * (-1.0f64 / 12.0).exp2();
        assert_eq!(traj[1000], up);
        assert_eq!(traj[3000], down);
        assert!(traj.iter().all(|&f| f >= down && f <= up));
    }

    #[test]
    fn jaru_reaches_the_target_at_thirty_percent() {
        let base = 330.0;
        for from_below in [true, false] {
            let traj = gamaka_trajectory(base, Gamaka::Jaru, 1000, 22050, 6.0, from_below);
            let glide = 300;
            // Within one cent at the end of the glide, and exact after.
            let cents = 1200.0 * (traj[glide] / base).log2().abs();
            assert!(cents < 1.0, "cents = {cents}");
            assert!(traj[glide..].iter().all(|&f| f == base));
            let start_cents = 1200.0 * (traj[0] / base).log2();
            assert!((start_cents.abs() - 200.0).abs() < 1e-9);
            assert_eq!(start_cents < 0.0, from_below);
        }
    }

    #[test]
    fn scale_clip_duration_is_exact() {
        let cfg = SynthConfig {
            note_seconds: 0.25,
            ..SynthConfig::default()
        };
        let clip = synth_scale_clip(&mohanam(), &cfg).unwrap();
        // 12 sung degrees at 0.25 s each.
        assert_eq!(clip.len(), (12.0 * 0.25 * 22050.0) as usize);
    }

    #[test]
    fn clip_seconds_overrides_note_seconds() {
        let cfg = SynthConfig {
            clip_seconds: Some(5.0),
            ..SynthConfig::default()
        };
        let clip = synth_scale_clip(&mohanam(), &cfg).unwrap();
        assert_eq!(clip.len(), 5 * 22050);
    }

    #[test]
    fn same_seed_renders_bit_identical_clips() {
        let cfg = SynthConfig {
            gamaka: Gamaka::Jaru,
            seed: 7,
            ..SynthConfig::default()
        };
        let a = synth_scale_clip(&mohanam(), &cfg).unwrap();
        let b = synth_scale_clip(&mohanam(), &cfg).unwrap();
        assert_eq!(a, b);
        let c = synth_scale_clip(
            &mohanam(),
            &SynthConfig {
                seed: 8,
                ..cfg
            },
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn out_of_range_pitch_is_rejected() {
        let cfg = SynthConfig {
            tonic_hz: 800.0, // upper Sa at 1600 Hz exceeds the default limit
            ..SynthConfig::default()
        };
        let err = synth_scale_clip(&mohanam(), &cfg).unwrap_err();
        assert!(matches!(err, SynthError::PitchOutOfRange { .. }));
    }

    #[test]
    fn kampita_headroom_counts_toward_the_limit() {
        let cfg = SynthConfig {
            tonic_hz: 760.0, // upper Sa 1520 Hz fits, but +1 semitone does not
            gamaka: Gamaka::Kampita,
            ..SynthConfig::default()
        };
        assert!(matches!(
            synth_scale_clip(&mohanam(), &cfg),
            Err(SynthError::PitchOutOfRange { .. })
        ));
        let plain = SynthConfig {
            tonic_hz: 760.0,
            ..SynthConfig::default()
        };
        assert!(synth_scale_clip(&mohanam(), &plain).is_ok());
    }
}
