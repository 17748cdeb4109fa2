//! Dataset manifests: delimiter-separated rows of
//! `path,raga,recording_id,tonic_hz` plus the dense label map derived from
//! the raga names.

use std::path::Path;

use super::TrainError;
use crate::notes::RagaLabel;

pub const MANIFEST_HEADER: &str = "path,raga,recording_id,tonic_hz";

/// One clip: where it lives, what raga it is, and which source recording it
/// was cut from.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub path: String,
    pub raga: String,
    pub recording_id: String,
    pub tonic_hz: Option<f64>,
}

/// All rows plus the label map (raga names sorted, ids dense).
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    rows: Vec<ManifestRow>,
    labels: Vec<String>,
}

impl Manifest {
    pub fn from_rows(rows: Vec<ManifestRow>) -> Manifest {
        let mut labels: Vec<String> = rows.iter().map(|r| r.raga.clone()).collect();
        labels.sort();
        labels.dedup();
        Manifest { rows, labels }
    }

    pub fn rows(&self) -> &[ManifestRow] {
        &self.rows
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn label_id(&self, raga: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(raga)).ok()
    }

    pub fn label_of(&self, id: usize) -> RagaLabel {
        RagaLabel {
            id,
            name: self.labels[id].clone(),
        }
    }

    /// Sub-manifest with the given row indices (label map recomputed).
    pub fn select(&self, indices: &[usize]) -> Manifest {
        Manifest::from_rows(indices.iter().map(|&i| self.rows[i].clone()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(MANIFEST_HEADER);
        out.push('\n');
        for row in &self.rows {
            let tonic = row.tonic_hz.map(|t| t.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.path, row.raga, row.recording_id, tonic
            ));
        }
        out
    }

    /// Parse manifest text. Fields must not contain commas; `tonic_hz` may
    /// be empty.
    pub fn parse_csv(text: &str) -> Result<Manifest, TrainError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == MANIFEST_HEADER => {}
            _ => {
                return Err(TrainError::Manifest(format!(
                    "expected header `{MANIFEST_HEADER}`"
                )));
            }
        }
        let mut rows = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(TrainError::Manifest(format!(
                    "line {}: expected 4 fields, got {}",
                    idx + 1,
                    fields.len()
                )));
            }
            let (path, raga, recording_id, tonic) =
                (fields[0].trim(), fields[1].trim(), fields[2].trim(), fields[3].trim());
            if path.is_empty() || raga.is_empty() || recording_id.is_empty() {
                return Err(TrainError::Manifest(format!(
                    "line {}: path, raga and recording_id must be nonempty",
                    idx + 1
                )));
            }
            let tonic_hz = if tonic.is_empty() {
                None
            } else {
                Some(tonic.parse::<f64>().map_err(|_| {
                    TrainError::Manifest(format!("line {}: bad tonic `{tonic}`", idx + 1))
                })?)
            };
            rows.push(ManifestRow {
                path: path.to_string(),
                raga: raga.to_string(),
                recording_id: recording_id.to_string(),
                tonic_hz,
            });
        }
        Ok(Manifest::from_rows(rows))
    }

    /// Load from disk and verify that every referenced clip exists.
    pub fn load(path: &Path) -> Result<Manifest, TrainError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TrainError::Manifest(format!("{}: {e}", path.display())))?;
        let manifest = Manifest::parse_csv(&text)?;
        for row in &manifest.rows {
            if !Path::new(&row.path).exists() {
                return Err(TrainError::MissingClip(row.path.clone()));
            }
        }
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<ManifestRow> {
        vec![
            ManifestRow {
                path: "a/x.wav".into(),
                raga: "mohanam".into(),
                recording_id: "m-r0".into(),
                tonic_hz: Some(130.81),
            },
            ManifestRow {
                path: "a/y.wav".into(),
                raga: "kalyani".into(),
                recording_id: "k-r0".into(),
                tonic_hz: None,
            },
            ManifestRow {
                path: "a/z.wav".into(),
                raga: "mohanam".into(),
                recording_id: "m-r1".into(),
                tonic_hz: Some(261.63),
            },
        ]
    }

    #[test]
    fn label_map_is_dense_and_sorted() {
        let m = Manifest::from_rows(sample_rows());
        assert_eq!(m.labels(), &["kalyani".to_string(), "mohanam".to_string()]);
        assert_eq!(m.label_id("mohanam"), Some(1));
        assert_eq!(m.label_id("kalyani"), Some(0));
        assert_eq!(m.label_id("nonexistent"), None);
        assert_eq!(m.label_of(1).name, "mohanam");
    }

    #[test]
    fn csv_round_trips() {
        let m = Manifest::from_rows(sample_rows());
        let csv = m.to_csv();
        let back = Manifest::parse_csv(&csv).unwrap();
        assert_eq!(back, m);
        assert!(csv.starts_with("path,raga,recording_id,tonic_hz\n"));
    }

    #[test]
    fn bad_header_is_rejected() {
        let err = Manifest::parse_csv("path,label\n").unwrap_err();
        assert!(matches!(err, TrainError::Manifest(_)));
    }

    #[test]
    fn wrong_field_count_names_the_line() {
        let text = format!("{MANIFEST_HEADER}\nx.wav,mohanam\n");
        let err = Manifest::parse_csv(&text).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn missing_tonic_is_allowed() {
        let text = format!("{MANIFEST_HEADER}\nx.wav,mohanam,m-r0,\n");
        let m = Manifest::parse_csv(&text).unwrap();
        assert_eq!(m.rows()[0].tonic_hz, None);
    }
}
