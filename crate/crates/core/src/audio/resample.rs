//! Rational-rate resampling with a polyphase windowed-sinc filter
//! (Kaiser window, 64 taps per phase).

use super::AudioClip;

const TAPS_PER_PHASE: usize = 64;
const KAISER_BETA: f64 = 8.6;
/// Cutoff as a fraction of the smaller Nyquist; leaves a transition band
/// so tones below 0.45 * min(rates) stay in the passband.
const ROLLOFF: f64 = 0.95;

/// Zeroth-order modified Bessel function of the first kind, by power series.
fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half_sq = (x / 2.0) * (x / 2.0);
    for k in 1..64 {
        term *= half_sq / ((k * k) as f64);
        sum += term;
        if term < sum * 1e-16 {
            break;
        }
    }
    sum
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Prototype lowpass for upsample factor `up`, downsample factor `down`:
/// `TAPS_PER_PHASE * up` taps at gain `up`, cutoff at the smaller Nyquist.
fn design_prototype(up: usize, down: usize) -> Vec<f64> {
    let n = TAPS_PER_PHASE * up;
    let center = (n - 1) as f64 / 2.0;
    // Cutoff in cycles per upsampled sample.
    let fc = ROLLOFF * 0.5 / up.max(down) as f64;
    let denom = bessel_i0(KAISER_BETA);
    (0..n)
        .map(|i| {
            let t = i as f64 - center;
            let win_arg = 1.0 - (t / center).powi(2);
            let window = bessel_i0(KAISER_BETA * win_arg.max(0.0).sqrt()) / denom;
            up as f64 * 2.0 * fc * sinc(2.0 * fc * t) * window
        })
        .collect()
}

/// Resample a clip to `target_rate`. A clip already at the target rate is
/// returned unchanged; otherwise the output has `round(len * target/source)`
/// samples, band-limited interpolated.
pub fn resample(clip: &AudioClip, target_rate: u32) -> AudioClip {
    assert!(target_rate > 0, "target rate must be positive");
    let source_rate = clip.sample_rate();
    if source_rate == target_rate {
        return clip.clone();
    }
    let g = gcd(source_rate, target_rate);
    let up = (target_rate / g) as usize;
    let down = (source_rate / g) as usize;

    let h = design_prototype(up, down);
    let n = h.len();
    let center = (n - 1) / 2;

    let x = clip.samples();
    let out_len = (x.len() as f64 * f64::from(target_rate) / f64::from(source_rate)).round() as usize;
    let mut out = Vec::with_capacity(out_len);
    for m in 0..out_len {
        // Position on the upsampled grid, shifted by the filter group delay.
        let pos = m * down + center;
        let j_hi = (pos / up).min(x.len().saturating_sub(1));
        let j_lo = (pos.saturating_sub(n - 1) + up - 1) / up;
        let mut acc = 0.0f64;
        for j in j_lo..=j_hi {
            acc += f64::from(x[j]) * h[pos - j * up];
        }
        out.push(acc.clamp(-1.0, 1.0) as f32);
    }
    AudioClip::new(out, target_rate).expect("resampler output is clamped and finite")
}
