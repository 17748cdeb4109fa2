//! Equal-temperament note math and raga scale specifications.
//!
//! The pipeline works on a 12-tone equal-temperament grid tuned to A4 = 440 Hz.
//! Swaras are named scale degrees on that grid; enharmonic pairs (R2=G1,
//! R3=G2, D2=N1, D3=N2) share one frequency and differ only in name.

use std::fmt;

use thiserror::Error;

/// Default tuning reference: A4 in Hz.
pub const A4_HZ: f64 = 440.0;
/// MIDI number of A4 under the convention used throughout (C4 = 60).
pub const A4_MIDI: i32 = 69;

#[derive(Debug, Error, PartialEq)]
pub enum NoteError {
    #[error("unknown swara name `{0}`")]
    UnknownSwara(String),
    #[error("midi number {0} outside 0..=127")]
    MidiOutOfRange(i32),
    #[error("invalid scale `{name}`: {reason}")]
    InvalidScale { name: String, reason: String },
    #[error("malformed scale file at line {line}: {reason}")]
    ScaleFile { line: usize, reason: String },
}

/// A note on the equal-temperament grid, identified by MIDI number
/// (`12 * octave + pitch class + 12`, A4 = 69).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NoteIndex(u8);

impl NoteIndex {
    pub fn new(midi: i32) -> Result<Self, NoteError> {
        if !(0..=127).contains(&midi) {
            return Err(NoteError::MidiOutOfRange(midi));
        }
        Ok(NoteIndex(midi as u8))
    }

    pub fn midi(self) -> i32 {
        i32::from(self.0)
    }

    /// Note shifted by `semitones`, failing when the result leaves the grid.
    pub fn offset(self, semitones: i32) -> Result<Self, NoteError> {
        NoteIndex::new(self.midi() + semitones)
    }

    /// Frequency in Hz at the given A4 tuning. Octaves are applied as exact
    /// powers of two, so `frequency(n + 12) == 2 * frequency(n)` holds to
    /// full float precision.
    pub fn frequency_at(self, tuning_a4: f64) -> f64 {
        let d = self.midi() - A4_MIDI;
        let octave = d.div_euclid(12);
        let pitch_class = d.rem_euclid(12);
        tuning_a4 * (pitch_class as f64 / 12.0).exp2() * 2f64.powi(octave)
    }

    /// Frequency in Hz at A4 = 440.
    pub fn frequency(self) -> f64 {
        self.frequency_at(A4_HZ)
    }
}

impl fmt::Display for NoteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 12] = [
            "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
        ];
        let pc = (self.0 % 12) as usize;
        let octave = i32::from(self.0 / 12) - 1;
        write!(f, "{}{}", NAMES[pc], octave)
    }
}

/// Frequency of a note at the given tuning: `tuning_a4 * 2^((midi - 69)/12)`.
pub fn note_frequency(note: NoteIndex, tuning_a4: f64) -> f64 {
    note.frequency_at(tuning_a4)
}

/// The sixteen swara names of the 12-tone grid, enharmonic overlaps included.
pub const SWARA_NAMES: [&str; 16] = [
    "S", "R1", "R2", "G1", "R3", "G2", "G3", "M1", "M2", "P", "D1", "D2", "N1", "D3", "N2", "N3",
];

/// Semitone offset from Sa for each entry of [`SWARA_NAMES`].
const SWARA_SEMITONES: [u8; 16] = [0, 1, 2, 2, 3, 3, 4, 5, 6, 7, 8, 9, 9, 10, 10, 11];

/// Semitone offset from Sa for a swara name, enharmonic pairs mapping to the
/// same offset. Case-sensitive.
pub fn swara_semitone(swara: &str) -> Result<u8, NoteError> {
    SWARA_NAMES
        .iter()
        .position(|&n| n == swara)
        .map(|i| SWARA_SEMITONES[i])
        .ok_or_else(|| NoteError::UnknownSwara(swara.to_string()))
}

/// Frequency ratio of a swara to Sa: `2^(k/12)` for its semitone offset `k`.
pub fn swara_ratio(swara: &str) -> Result<f64, NoteError> {
    Ok((f64::from(swara_semitone(swara)?) / 12.0).exp2())
}

/// Result of snapping a frequency to the note grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestNote {
    pub note: NoteIndex,
    /// Signed offset in cents from the returned note. Ties at the halfway
    /// point break toward the lower note, so the offset lies in (-50, +50].
    pub cents: f64,
}

/// Nearest grid note to `freq` at the given tuning, with the signed cent
/// offset. Frequencies beyond the grid clamp to its ends.
pub fn nearest_note(freq: f64, tuning_a4: f64) -> NearestNote {
    assert!(freq > 0.0, "nearest_note requires a positive frequency");
    let exact = A4_MIDI as f64 + 12.0 * (freq / tuning_a4).log2();
    // Halfway ties round down: midi = ceil(exact - 1/2).
    let midi = (exact - 0.5).ceil().clamp(0.0, 127.0) as i32;
    let note = NoteIndex::new(midi).expect("clamped to grid");
    let cents = 1200.0 * (freq / note.frequency_at(tuning_a4)).log2();
    NearestNote { note, cents }
}

/// One degree of a scale: a swara name plus how many octaves above the tonic
/// register it sits (the closing upper Sa is `S` with `octaves_up = 1`,
/// written `S'`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleDegree {
    pub swara: String,
    pub octaves_up: u8,
}

impl ScaleDegree {
    pub fn parse(token: &str) -> Result<Self, NoteError> {
        let ticks = token.chars().rev().take_while(|&c| c == '\'').count();
        let name = &token[..token.len() - ticks];
        swara_semitone(name)?;
        Ok(ScaleDegree {
            swara: name.to_string(),
            octaves_up: ticks as u8,
        })
    }

    /// Semitone offset from the tonic, octave marks included.
    pub fn semitones(&self) -> u8 {
        swara_semitone(&self.swara).expect("validated at construction") + 12 * self.octaves_up
    }

    /// Frequency ratio to the tonic.
    pub fn ratio(&self) -> f64 {
        (f64::from(self.semitones()) / 12.0).exp2()
    }
}

impl fmt::Display for ScaleDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.swara)?;
        for _ in 0..self.octaves_up {
            write!(f, "'")?;
        }
        Ok(())
    }
}

/// A raga's ascending and descending scale as swara degrees, the closing
/// upper Sa included explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleSpec {
    pub name: String,
    pub arohanam: Vec<ScaleDegree>,
    pub avarohanam: Vec<ScaleDegree>,
    /// Twisted progressions skip the per-step monotonicity check. They are
    /// stored as-is; nothing downstream assigns them special behavior.
    pub twisted: bool,
}

impl ScaleSpec {
    /// Build a straight (monotone) scale, validating structure.
    pub fn new(
        name: &str,
        arohanam: Vec<ScaleDegree>,
        avarohanam: Vec<ScaleDegree>,
    ) -> Result<Self, NoteError> {
        Self::build(name, arohanam, avarohanam, false)
    }

    /// Build a twisted scale: monotonicity is not enforced, everything else is.
    pub fn new_twisted(
        name: &str,
        arohanam: Vec<ScaleDegree>,
        avarohanam: Vec<ScaleDegree>,
    ) -> Result<Self, NoteError> {
        Self::build(name, arohanam, avarohanam, true)
    }

    fn build(
        name: &str,
        arohanam: Vec<ScaleDegree>,
        avarohanam: Vec<ScaleDegree>,
        twisted: bool,
    ) -> Result<Self, NoteError> {
        let err = |reason: &str| NoteError::InvalidScale {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        for (dir, list) in [("arohanam", &arohanam), ("avarohanam", &avarohanam)] {
            if !(4..=8).contains(&list.len()) {
                return Err(err(&format!("{dir} must have 4..=8 degrees, got {}", list.len())));
            }
        }
        if arohanam.first().map(ScaleDegree::semitones) != Some(0)
            || arohanam.last().map(ScaleDegree::semitones) != Some(12)
        {
            return Err(err("arohanam must run from S to S'"));
        }
        if avarohanam.first().map(ScaleDegree::semitones) != Some(12)
            || avarohanam.last().map(ScaleDegree::semitones) != Some(0)
        {
            return Err(err("avarohanam must run from S' to S"));
        }
        if !twisted {
            if !arohanam.windows(2).all(|w| w[0].semitones() < w[1].semitones()) {
                return Err(err("arohanam ratios must strictly increase"));
            }
            if !avarohanam.windows(2).all(|w| w[0].semitones() > w[1].semitones()) {
                return Err(err("avarohanam ratios must strictly decrease"));
            }
        }
        Ok(ScaleSpec {
            name: name.to_string(),
            arohanam,
            avarohanam,
            twisted,
        })
    }

    /// Ratios of the ascending scale, 1.0 through 2.0.
    pub fn arohanam_ratios(&self) -> Vec<f64> {
        self.arohanam.iter().map(ScaleDegree::ratio).collect()
    }

    /// Ratios of the descending scale, 2.0 through 1.0.
    pub fn avarohanam_ratios(&self) -> Vec<f64> {
        self.avarohanam.iter().map(ScaleDegree::ratio).collect()
    }

    /// Degrees of arohanam followed by avarohanam, the order a scale is sung.
    pub fn sung_degrees(&self) -> Vec<&ScaleDegree> {
        self.arohanam.iter().chain(self.avarohanam.iter()).collect()
    }
}

/// A dense class id paired with the raga name it stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RagaLabel {
    pub id: usize,
    pub name: String,
}

/// Parse a scale-spec file: one record per line,
/// `name,arohanam;avarohanam` with swara names space-separated.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_scale_specs(text: &str) -> Result<Vec<ScaleSpec>, NoteError> {
    let mut specs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let file_err = |reason: String| NoteError::ScaleFile {
            line: lineno,
            reason,
        };
        let (name, scales) = line
            .split_once(',')
            .ok_or_else(|| file_err("expected `name,arohanam;avarohanam`".to_string()))?;
        let (aro, ava) = scales
            .split_once(';')
            .ok_or_else(|| file_err("expected `;` between arohanam and avarohanam".to_string()))?;
        let parse_side = |side: &str| -> Result<Vec<ScaleDegree>, NoteError> {
            side.split_whitespace().map(ScaleDegree::parse).collect()
        };
        let spec = ScaleSpec::new(name.trim(), parse_side(aro)?, parse_side(ava)?)
            .map_err(|e| file_err(e.to_string()))?;
        specs.push(spec);
    }
    Ok(specs)
}

/// Render scale specs in the file format accepted by [`parse_scale_specs`].
pub fn format_scale_specs(specs: &[ScaleSpec]) -> String {
    let mut out = String::new();
    for spec in specs {
        let side = |degrees: &[ScaleDegree]| {
            degrees
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!(
            "{},{};{}\n",
            spec.name,
            side(&spec.arohanam),
            side(&spec.avarohanam)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(tokens: &str) -> Vec<ScaleDegree> {
        tokens
            .split_whitespace()
            .map(|t| ScaleDegree::parse(t).unwrap())
            .collect()
    }

    #[test]
    fn c3_frequency_matches_tonic_table() {
        let c3 = NoteIndex::new(48).unwrap();
        assert!((note_frequency(c3, A4_HZ) - 130.81).abs() < 0.01);
    }

    #[test]
    fn a4_is_exactly_the_tuning_reference() {
        let a4 = NoteIndex::new(69).unwrap();
        assert_eq!(note_frequency(a4, A4_HZ), 440.0);
    }

    #[test]
    fn semitone_ratio_is_uniform() {
        for midi in 0..127 {
            let lo = NoteIndex::new(midi).unwrap();
            let hi = NoteIndex::new(midi + 1).unwrap();
            let ratio = hi.frequency() / lo.frequency();
            assert!((ratio - 1.0595).abs() < 0.0001, "midi {midi}: {ratio}");
        }
    }

    #[test]
    fn octave_law_is_exact() {
        for midi in 0..116 {
            let n = NoteIndex::new(midi).unwrap();
            let up = NoteIndex::new(midi + 12).unwrap();
            assert_eq!(up.frequency(), 2.0 * n.frequency(), "midi {midi}");
        }
    }

    #[test]
    fn swara_ratios_match_the_semitone_grid() {
        // P sits seven semitones up: 2^(7/12) = 1.4983..
        let p = swara_ratio("P").unwrap();
        assert!((p - 1.4984).abs() < 0.0001);
        assert_eq!(swara_ratio("S").unwrap(), 1.0);
        for (i, name) in SWARA_NAMES.iter().enumerate() {
            let expect = (f64::from(SWARA_SEMITONES[i]) / 12.0).exp2();
            assert_eq!(swara_ratio(name).unwrap(), expect);
        }
    }

    #[test]
    fn enharmonic_pairs_share_a_ratio() {
        for (a, b) in [("R2", "G1"), ("R3", "G2"), ("D2", "N1"), ("D3", "N2")] {
            assert_eq!(swara_ratio(a).unwrap(), swara_ratio(b).unwrap());
        }
    }

    #[test]
    fn unknown_swara_is_a_lookup_error() {
        assert_eq!(
            swara_ratio("Q2"),
            Err(NoteError::UnknownSwara("Q2".to_string()))
        );
    }

    #[test]
    fn nearest_note_recovers_table_tonic() {
        let hit = nearest_note(130.81, A4_HZ);
        assert_eq!(hit.note.midi(), 48);
        assert!(hit.cents.abs() < 0.05);
    }

    #[test]
    fn nearest_note_offset_at_446_hz() {
        // 1200*log2(446/440) = 23.448..
        let hit = nearest_note(446.0, A4_HZ);
        assert_eq!(hit.note.midi(), 69);
        assert!((hit.cents - 23.448).abs() < 0.01);
    }

    #[test]
    fn halfway_ties_break_toward_the_lower_note() {
        let a4 = NoteIndex::new(69).unwrap();
        let halfway = a4.frequency() * (0.5f64 / 12.0).exp2();
        let hit = nearest_note(halfway, A4_HZ);
        assert_eq!(hit.note.midi(), 69);
        assert!((hit.cents - 50.0).abs() < 1e-9);
    }

    #[test]
    fn note_names_render() {
        assert_eq!(NoteIndex::new(35).unwrap().to_string(), "B1");
        assert_eq!(NoteIndex::new(69).unwrap().to_string(), "A4");
        assert_eq!(NoteIndex::new(88).unwrap().to_string(), "E6");
    }

    #[test]
    fn straight_scale_validates() {
        let spec = ScaleSpec::new(
            "mohanam",
            degrees("S R2 G3 P D2 S'"),
            degrees("S' D2 P G3 R2 S"),
        )
        .unwrap();
        assert_eq!(spec.arohanam_ratios().len(), 6);
        assert_eq!(spec.arohanam_ratios()[5], 2.0);
        assert_eq!(spec.avarohanam_ratios()[0], 2.0);
    }

    #[test]
    fn non_monotone_scale_is_rejected() {
        let err = ScaleSpec::new(
            "bad",
            degrees("S G3 R2 P S'"),
            degrees("S' P G3 R2 S"),
        )
        .unwrap_err();
        assert!(matches!(err, NoteError::InvalidScale { .. }));
    }

    #[test]
    fn twisted_flag_admits_zigzag_arohanam() {
        let spec = ScaleSpec::new_twisted(
            "kathanakuthuhalam",
            degrees("S R2 M1 D2 N3 G3 P S'"),
            degrees("S' N3 D2 P M1 G3 R2 S"),
        )
        .unwrap();
        assert!(spec.twisted);
    }

    #[test]
    fn scale_file_round_trips() {
        let text = "# comment\nmohanam,S R2 G3 P D2 S';S' D2 P G3 R2 S\n\
                    hindolam,S G2 M1 D1 N2 S';S' N2 D1 M1 G2 S\n";
        let specs = parse_scale_specs(text).unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[1].name, "hindolam");
        let reparsed = parse_scale_specs(&format_scale_specs(&specs)).unwrap();
        assert_eq!(reparsed, specs);
    }

    #[test]
    fn scale_file_errors_carry_line_numbers() {
        let err = parse_scale_specs("mohanam,S R2 G3 P D2 S'\n").unwrap_err();
        assert_eq!(
            err,
            NoteError::ScaleFile {
                line: 1,
                reason: "expected `;` between arohanam and avarohanam".to_string()
            }
        );
    }
}
