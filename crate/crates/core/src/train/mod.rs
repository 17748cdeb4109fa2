//! Training harness: feature pipelines, recording-level splits, the epoch
//! loop with early stopping and best-weights restoration, evaluation, and
//! prediction.

pub mod manifest;

pub use manifest::{Manifest, ManifestRow, MANIFEST_HEADER};

use std::io;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio::{decode_wav, resample, AudioClip};
use crate::error::ErrorCategory;
use crate::features::{
    build_filterbank, extract_features, read_features, FeatureMatrix, FilterBank, StftConfig,
};
use crate::nn::{argmax_rows, cross_entropy, one_hot, Adam, Model, ModelConfig, NnError, Tensor};
use crate::notes::NoteIndex;
use crate::preprocess::{segment, trim, SegmentationConfig};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("clip file missing: {0}")]
    MissingClip(String),
    #[error("split: {0}")]
    Split(String),
    #[error("config: {0}")]
    Config(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("features for {path}: {reason}")]
    FeatureLoad { path: String, reason: String },
    #[error("epoch {epoch}: {source}")]
    Epoch {
        epoch: usize,
        #[source]
        source: NnError,
    },
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl TrainError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            TrainError::Epoch { source, .. } | TrainError::Nn(source) => source.category(),
            TrainError::Split(_) | TrainError::Config(_) | TrainError::EmptyDataset => {
                ErrorCategory::Usage
            }
            _ => ErrorCategory::Data,
        }
    }
}

/// Everything that turns a WAV into model input: resampling target, trim and
/// segment policy, STFT, and filter-bank geometry. Stored in checkpoints so
/// prediction uses the exact training-time features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePipeline {
    pub stft: StftConfig,
    pub num_bins: usize,
    pub anchor_midi: i32,
    pub segmentation: SegmentationConfig,
}

impl Default for FeaturePipeline {
    fn default() -> Self {
        FeaturePipeline {
            // 4096 rather than the bare STFT default of 2048: the default
            // 56-bin bank needs at least one spectrum bin inside every
            // filter support, and 2048 leaves the C#2 filter empty.
            stft: StftConfig {
                frame_size: 4096,
                hop_size: 512,
                sample_rate: 22050,
            },
            num_bins: crate::features::DEFAULT_NUM_BINS,
            anchor_midi: crate::features::DEFAULT_ANCHOR_MIDI,
            segmentation: SegmentationConfig::default(),
        }
    }
}

impl FeaturePipeline {
    pub fn build_bank(&self) -> Result<FilterBank, TrainError> {
        let anchor = NoteIndex::new(self.anchor_midi)
            .map_err(|e| TrainError::Config(e.to_string()))?;
        build_filterbank(self.num_bins, anchor, &self.stft)
            .map_err(|e| TrainError::Config(e.to_string()))
    }

    /// Condition a raw clip (resample, trim, segment) and extract features
    /// for every segment.
    pub fn features_for_clip(
        &self,
        clip: &AudioClip,
        bank: &FilterBank,
    ) -> Result<Vec<FeatureMatrix>, TrainError> {
        let conditioned = resample(clip, self.segmentation.sample_rate);
        let conditioned = trim(&conditioned, &self.segmentation)
            .map_err(|e| TrainError::Config(e.to_string()))?;
        let segments = segment(&conditioned, &self.segmentation)
            .map_err(|e| TrainError::Config(e.to_string()))?;
        segments
            .iter()
            .map(|s| {
                extract_features(s, &self.stft, bank)
                    .map_err(|e| TrainError::Config(e.to_string()))
            })
            .collect()
    }

    /// Segment-and-extract without trimming, the path used at prediction time.
    pub fn features_for_whole_clip(
        &self,
        clip: &AudioClip,
        bank: &FilterBank,
    ) -> Result<Vec<FeatureMatrix>, TrainError> {
        let notrim = SegmentationConfig {
            trim_fraction: 0.0,
            ..self.segmentation
        };
        let conditioned = resample(clip, notrim.sample_rate);
        let segments =
            segment(&conditioned, &notrim).map_err(|e| TrainError::Config(e.to_string()))?;
        segments
            .iter()
            .map(|s| {
                extract_features(s, &self.stft, bank)
                    .map_err(|e| TrainError::Config(e.to_string()))
            })
            .collect()
    }
}

/// In-memory feature dataset: `n` samples of `frames x bins`, with labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Vec<f32>,
    labels: Vec<usize>,
    pub frames: usize,
    pub bins: usize,
    pub num_classes: usize,
}

impl Dataset {
    /// Assemble a dataset from a flat row-major feature block; mostly for
    /// synthetic fixtures.
    pub fn from_raw(
        features: Vec<f32>,
        labels: Vec<usize>,
        frames: usize,
        bins: usize,
        num_classes: usize,
    ) -> Result<Dataset, TrainError> {
        if features.len() != labels.len() * frames * bins {
            return Err(TrainError::Config(format!(
                "{} feature values for {} samples of {frames}x{bins}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(TrainError::Config(format!(
                "label {bad} outside 0..{num_classes}"
            )));
        }
        Ok(Dataset {
            features,
            labels,
            frames,
            bins,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    fn sample(&self, i: usize) -> &[f32] {
        let stride = self.frames * self.bins;
        &self.features[i * stride..(i + 1) * stride]
    }

    /// Copy the given samples into a batch tensor plus their labels.
    pub fn gather(&self, indices: &[usize]) -> (Tensor, Vec<usize>) {
        let stride = self.frames * self.bins;
        let mut data = Vec::with_capacity(indices.len() * stride);
        for &i in indices {
            data.extend(self.sample(i).iter().map(|&v| f64::from(v)));
        }
        let x = Tensor::from_vec(&[indices.len(), self.frames, self.bins], data)
            .expect("gather shape");
        let y = indices.iter().map(|&i| self.labels[i]).collect();
        (x, y)
    }

    /// Assemble a dataset from per-sample feature matrices.
    pub fn from_features(
        items: Vec<(FeatureMatrix, usize)>,
        num_classes: usize,
    ) -> Result<Dataset, TrainError> {
        let (first, _) = items.first().ok_or(TrainError::EmptyDataset)?;
        let (frames, bins, hash) = (first.num_frames, first.num_bins, first.config_hash);
        let mut features = Vec::with_capacity(items.len() * frames * bins);
        let mut labels = Vec::with_capacity(items.len());
        for (fm, label) in &items {
            if fm.num_frames != frames || fm.num_bins != bins {
                return Err(TrainError::Config(format!(
                    "feature shape {}x{} for `{}` differs from {}x{}",
                    fm.num_frames, fm.num_bins, fm.clip_id, frames, bins
                )));
            }
            if fm.config_hash != hash {
                return Err(TrainError::Config(format!(
                    "feature config hash mismatch for `{}`",
                    fm.clip_id
                )));
            }
            features.extend_from_slice(fm.values());
            labels.push(*label);
        }
        Ok(Dataset {
            features,
            labels,
            frames,
            bins,
            num_classes,
        })
    }
}

/// Load features for the selected manifest rows, labeling each sample by
/// its raga's position in `labels` (pass `manifest.labels()` for training;
/// evaluation passes the label map stored in the checkpoint). Rows pointing
/// at `.rgfb` files are read directly (config hash verified); anything else
/// is decoded as WAV and run through the pipeline, one sample per segment.
pub fn load_dataset(
    manifest: &Manifest,
    indices: &[usize],
    pipeline: &FeaturePipeline,
    labels: &[String],
) -> Result<Dataset, TrainError> {
    let bank = pipeline.build_bank()?;
    let expected_hash = bank.config_hash();
    let mut items = Vec::new();
    for &i in indices {
        let row = &manifest.rows()[i];
        let label = labels
            .iter()
            .position(|l| l == &row.raga)
            .ok_or_else(|| TrainError::Manifest(format!("unknown raga `{}`", row.raga)))?;
        let fail = |reason: String| TrainError::FeatureLoad {
            path: row.path.clone(),
            reason,
        };
        if row.path.ends_with(".rgfb") {
            let bytes = std::fs::read(&row.path).map_err(|e| fail(e.to_string()))?;
            let fm = read_features(&bytes).map_err(|e| fail(e.to_string()))?;
            if fm.config_hash != expected_hash {
                return Err(fail("feature file was built with a different config".into()));
            }
            items.push((fm.with_clip_id(&row.path), label));
        } else {
            let bytes = std::fs::read(&row.path).map_err(|e| fail(e.to_string()))?;
            let clip = decode_wav(&bytes).map_err(|e| fail(e.to_string()))?;
            for fm in pipeline.features_for_clip(&clip, &bank)? {
                items.push((fm.with_clip_id(&row.path), label));
            }
        }
    }
    Dataset::from_features(items, labels.len())
}

/// Training-loop parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub patience: usize,
    /// Validation loss must drop by more than this to count as improvement.
    pub min_delta: f64,
    pub split_fraction: f64,
    pub learning_rate: f64,
    pub seed: u64,
    /// Split individual clips instead of whole recordings. Leaks segments of
    /// one recording across the split; kept for replicating setups that
    /// split 30 s windows directly.
    pub clip_level_split: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 300,
            batch_size: 256,
            patience: 100,
            min_delta: 1e-6,
            split_fraction: 0.80,
            learning_rate: 0.001,
            seed: 0,
            clip_level_split: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(TrainError::Config(format!(
                "split fraction {} outside (0, 1)",
                self.split_fraction
            )));
        }
        if self.patience > self.epochs {
            return Err(TrainError::Config(format!(
                "patience {} exceeds epoch limit {}",
                self.patience, self.epochs
            )));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(TrainError::Config("epochs and batch_size must be positive".into()));
        }
        Ok(())
    }
}

/// Per-epoch metrics, one row of the metrics CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: f64,
    pub val_acc: f64,
    pub seconds: f64,
}

pub const METRICS_HEADER: &str = "epoch,train_loss,train_acc,val_loss,val_acc,seconds";

/// Render epoch records as the metrics CSV.
pub fn metrics_to_csv(records: &[EpochRecord]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.epoch, r.train_loss, r.train_acc, r.val_loss, r.val_acc, r.seconds
        ));
    }
    out
}

/// Early-stopping state machine over a monitored loss.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    pub patience: usize,
    pub min_delta: f64,
    pub best_epoch: usize,
    pub best_loss: f64,
}

impl EarlyStopping {
    pub fn new(patience: usize, min_delta: f64) -> Self {
        EarlyStopping {
            patience,
            min_delta,
            best_epoch: 0,
            best_loss: f64::INFINITY,
        }
    }

    /// Record one epoch's loss; returns true when it improved on the best by
    /// more than `min_delta`.
    pub fn observe(&mut self, epoch: usize, loss: f64) -> bool {
        if self.best_loss - loss > self.min_delta {
            self.best_loss = loss;
            self.best_epoch = epoch;
            true
        } else {
            false
        }
    }

    /// Stop once `patience` epochs have elapsed since the best epoch:
    /// exactly at `best_epoch + patience`.
    pub fn should_stop(&self, epoch: usize) -> bool {
        epoch >= self.best_epoch + self.patience
    }
}

/// Split manifest rows into train and validation index sets. The default
/// granularity is the recording: all clips of one recording land on one
/// side. Per class, `round(fraction * recordings)` recordings (at least one,
/// never all) go to the train side.
pub fn split_dataset(
    manifest: &Manifest,
    cfg: &TrainConfig,
) -> Result<(Vec<usize>, Vec<usize>), TrainError> {
    cfg.validate()?;
    if manifest.rows().is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut train = Vec::new();
    let mut val = Vec::new();
    for class in manifest.labels() {
        // Group this class's rows by the split unit, first-appearance order.
        let mut units: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, row) in manifest.rows().iter().enumerate() {
            if &row.raga != class {
                continue;
            }
            let key = if cfg.clip_level_split {
                format!("clip-{i}")
            } else {
                row.recording_id.clone()
            };
            match units.iter_mut().find(|(k, _)| *k == key) {
                Some((_, rows)) => rows.push(i),
                None => units.push((key, vec![i])),
            }
        }
        if units.len() < 2 {
            return Err(TrainError::Split(format!(
                "class `{class}` has {} recording(s); recording-level splitting needs at least 2 \
                 (use clip-level splitting to override)",
                units.len()
            )));
        }
        units.shuffle(&mut rng);
        let n_train = ((units.len() as f64 * cfg.split_fraction).round() as usize)
            .clamp(1, units.len() - 1);
        for (u, (_, rows)) in units.into_iter().enumerate() {
            if u < n_train {
                train.extend(rows);
            } else {
                val.extend(rows);
            }
        }
    }
    train.sort_unstable();
    val.sort_unstable();
    Ok((train, val))
}

/// Loss, accuracy, and a confusion matrix over a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub loss: f64,
    pub accuracy: f64,
    /// `confusion[true * num_classes + predicted]`, counts.
    pub confusion: Vec<usize>,
    pub num_classes: usize,
}

impl EvalReport {
    /// Confusion matrix with every row scaled to sum to one (empty rows stay
    /// zero).
    pub fn row_normalized(&self) -> Vec<f64> {
        let c = self.num_classes;
        let mut out = vec![0.0; c * c];
        for t in 0..c {
            let total: usize = self.confusion[t * c..(t + 1) * c].iter().sum();
            if total > 0 {
                for p in 0..c {
                    out[t * c + p] = self.confusion[t * c + p] as f64 / total as f64;
                }
            }
        }
        out
    }
}

/// Deterministic inference-mode evaluation, batched in dataset order.
pub fn evaluate(model: &mut Model, data: &Dataset, batch_size: usize) -> Result<EvalReport, TrainError> {
    if data.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let c = data.num_classes;
    let mut loss_sum = 0.0f64;
    let mut correct = 0usize;
    let mut confusion = vec![0usize; c * c];
    let indices: Vec<usize> = (0..data.len()).collect();
    for chunk in indices.chunks(batch_size.max(1)) {
        let (x, y) = data.gather(chunk);
        let probs = model.forward(&x, false)?;
        let (loss, _) = cross_entropy(&probs, &one_hot(&y, c))?;
        loss_sum += loss * chunk.len() as f64;
        for (pred, &truth) in argmax_rows(&probs)?.iter().zip(&y) {
            if *pred == truth {
                correct += 1;
            }
            confusion[truth * c + pred] += 1;
        }
    }
    Ok(EvalReport {
        loss: loss_sum / data.len() as f64,
        accuracy: correct as f64 / data.len() as f64,
        confusion,
        num_classes: c,
    })
}

/// Output of a training run.
pub struct TrainOutcome {
    pub model: Model,
    pub records: Vec<EpochRecord>,
}

/// Core training loop over prepared datasets. Runs at most `cfg.epochs`
/// epochs, stops `cfg.patience` epochs after the best validation loss, and
/// restores the best-epoch weights (BatchNorm statistics included) before
/// returning. `timer` supplies monotonic seconds for the wall-clock column.
pub fn train_on_datasets(
    train: &Dataset,
    val: &Dataset,
    model_cfg: ModelConfig,
    cfg: &TrainConfig,
    timer: &mut dyn FnMut() -> f64,
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(TrainError::Config("empty train or validation split".into()));
    }
    let mut model = Model::new(model_cfg)?;
    let mut adam = Adam::new(cfg.learning_rate);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut stopper = EarlyStopping::new(cfg.patience, cfg.min_delta);
    let mut best_state = model.snapshot_state();
    let mut records = Vec::new();

    let classes = train.num_classes;
    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 1..=cfg.epochs {
        let t0 = timer();
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0f64;
        let mut correct = 0usize;
        let at_epoch = |source: NnError| TrainError::Epoch { epoch, source };
        for chunk in order.chunks(cfg.batch_size) {
            let (x, y) = train.gather(chunk);
            let probs = model.forward(&x, true).map_err(at_epoch)?;
            let (loss, grad) = cross_entropy(&probs, &one_hot(&y, classes)).map_err(at_epoch)?;
            model.zero_grads();
            model.backward_fused(&grad).map_err(at_epoch)?;
            adam.step(&mut model);
            loss_sum += loss * chunk.len() as f64;
            for (pred, &truth) in argmax_rows(&probs).map_err(at_epoch)?.iter().zip(&y) {
                if *pred == truth {
                    correct += 1;
                }
            }
        }
        let report = evaluate(&mut model, val, cfg.batch_size)?;
        if stopper.observe(epoch, report.loss) {
            best_state = model.snapshot_state();
        }
        records.push(EpochRecord {
            epoch,
            train_loss: loss_sum / train.len() as f64,
            train_acc: correct as f64 / train.len() as f64,
            val_loss: report.loss,
            val_acc: report.accuracy,
            seconds: timer() - t0,
        });
        if stopper.should_stop(epoch) {
            break;
        }
    }
    model.restore_state(&best_state)?;
    Ok(TrainOutcome { model, records })
}

/// Manifest-level entry point: split, load features, and train. The model
/// config is built once the input geometry (frames, bins, classes) is known.
pub fn train_model(
    manifest: &Manifest,
    pipeline: &FeaturePipeline,
    build_model: impl FnOnce(usize, usize, usize) -> ModelConfig,
    cfg: &TrainConfig,
    timer: &mut dyn FnMut() -> f64,
) -> Result<(TrainOutcome, Vec<usize>, Vec<usize>), TrainError> {
    let (train_idx, val_idx) = split_dataset(manifest, cfg)?;
    let train_set = load_dataset(manifest, &train_idx, pipeline, manifest.labels())?;
    let val_set = load_dataset(manifest, &val_idx, pipeline, manifest.labels())?;
    let model_cfg = build_model(train_set.frames, train_set.bins, train_set.num_classes);
    let outcome = train_on_datasets(&train_set, &val_set, model_cfg, cfg, timer)?;
    Ok((outcome, train_idx, val_idx))
}

/// Classify one clip: per-segment probabilities averaged, ranked descending.
pub fn predict(
    model: &mut Model,
    labels: &[String],
    clip: &AudioClip,
    pipeline: &FeaturePipeline,
) -> Result<Vec<(String, f64)>, TrainError> {
    let bank = pipeline.build_bank()?;
    let mats = pipeline.features_for_whole_clip(clip, &bank)?;
    if mats.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let classes = labels.len();
    let frames = mats[0].num_frames;
    let bins = mats[0].num_bins;
    let mut data = Vec::with_capacity(mats.len() * frames * bins);
    for m in &mats {
        data.extend(m.values().iter().map(|&v| f64::from(v)));
    }
    let x = Tensor::from_vec(&[mats.len(), frames, bins], data)
        .map_err(TrainError::Nn)?;
    let probs = model.forward(&x, false)?;
    let mut mean = vec![0.0f64; classes];
    for s in 0..mats.len() {
        for c in 0..classes {
            mean[c] += probs.data()[s * classes + c];
        }
    }
    for m in &mut mean {
        *m /= mats.len() as f64;
    }
    let mut ranked: Vec<(String, f64)> = labels.iter().cloned().zip(mean).collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    Ok(ranked)
}

/// Label map plus feature pipeline, embedded in checkpoints so `eval` and
/// `predict` reconstruct the training-time setup exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub labels: Vec<String>,
    pub pipeline: FeaturePipeline,
}

impl CheckpointMeta {
    pub fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self.clone()).expect("meta serializes")
    }

    pub fn from_table(table: &toml::Table) -> Result<Self, TrainError> {
        table
            .clone()
            .try_into()
            .map_err(|e| TrainError::Manifest(format!("checkpoint metadata: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest_with(recordings_per_class: usize, clips_per_recording: usize) -> Manifest {
        let mut rows = Vec::new();
        for class in ["kalyani", "mohanam"] {
            for r in 0..recordings_per_class {
                for c in 0..clips_per_recording {
                    rows.push(ManifestRow {
                        path: format!("{class}/{r}/{c}.wav"),
                        raga: class.to_string(),
                        recording_id: format!("{class}-r{r}"),
                        tonic_hz: None,
                    });
                }
            }
        }
        Manifest::from_rows(rows)
    }

    #[test]
    fn recording_split_is_eight_two_for_ten_recordings() {
        let manifest = manifest_with(10, 3);
        let cfg = TrainConfig::default();
        let (train, val) = split_dataset(&manifest, &cfg).unwrap();
        assert_eq!(train.len(), 2 * 8 * 3);
        assert_eq!(val.len(), 2 * 2 * 3);
    }

    #[test]
    fn split_is_deterministic_in_the_seed() {
        let manifest = manifest_with(5, 2);
        let cfg = TrainConfig::default();
        assert_eq!(
            split_dataset(&manifest, &cfg).unwrap(),
            split_dataset(&manifest, &cfg).unwrap()
        );
    }

    #[test]
    fn no_recording_id_crosses_the_split() {
        let manifest = manifest_with(7, 4);
        let cfg = TrainConfig {
            seed: 3,
            ..TrainConfig::default()
        };
        let (train, val) = split_dataset(&manifest, &cfg).unwrap();
        let ids = |idx: &[usize]| -> std::collections::BTreeSet<String> {
            idx.iter()
                .map(|&i| manifest.rows()[i].recording_id.clone())
                .collect()
        };
        assert!(ids(&train).is_disjoint(&ids(&val)));
        assert_eq!(train.len() + val.len(), manifest.rows().len());
    }

    #[test]
    fn single_recording_class_suggests_clip_level() {
        let manifest = manifest_with(1, 6);
        let err = split_dataset(&manifest, &TrainConfig::default()).unwrap_err();
        assert!(err.to_string().contains("clip-level"), "{err}");
        let cfg = TrainConfig {
            clip_level_split: true,
            ..TrainConfig::default()
        };
        let (train, val) = split_dataset(&manifest, &cfg).unwrap();
        assert_eq!(train.len(), 10);
        assert_eq!(val.len(), 2);
    }

    #[test]
    fn early_stopping_stops_exactly_patience_after_best() {
        let mut es = EarlyStopping::new(5, 1e-6);
        // Losses improve through epoch 3, then flat-line.
        let losses = [1.0, 0.8, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5];
        let mut stopped_at = None;
        for (i, &loss) in losses.iter().enumerate() {
            let epoch = i + 1;
            es.observe(epoch, loss);
            if es.should_stop(epoch) {
                stopped_at = Some(epoch);
                break;
            }
        }
        assert_eq!(es.best_epoch, 3);
        assert_eq!(stopped_at, Some(8));
    }

    #[test]
    fn improvement_below_min_delta_does_not_reset_patience() {
        let mut es = EarlyStopping::new(3, 1e-6);
        es.observe(1, 1.0);
        assert!(!es.observe(2, 1.0 - 1e-9));
        assert!(!es.observe(3, 1.0 - 1e-7));
        assert!(!es.should_stop(3));
        assert!(es.should_stop(4));
        assert_eq!(es.best_epoch, 1);
    }

    #[test]
    fn late_improvement_restarts_the_clock() {
        let mut es = EarlyStopping::new(4, 1e-6);
        es.observe(1, 1.0);
        es.observe(2, 0.9);
        es.observe(3, 0.95);
        es.observe(4, 0.85);
        assert_eq!(es.best_epoch, 4);
        assert!(!es.should_stop(7));
        assert!(es.should_stop(8));
    }

    #[test]
    fn metrics_csv_has_one_row_per_epoch() {
        let records = vec![
            EpochRecord {
                epoch: 1,
                train_loss: 1.5,
                train_acc: 0.25,
                val_loss: 1.25,
                val_acc: 0.5,
                seconds: 0.0,
            },
            EpochRecord {
                epoch: 2,
                train_loss: 0.75,
                train_acc: 0.5,
                val_loss: 1.0,
                val_acc: 0.5,
                seconds: 0.0,
            },
        ];
        let csv = metrics_to_csv(&records);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], METRICS_HEADER);
        assert_eq!(lines[1], "1,1.5,0.25,1.25,0.5,0");
    }

    #[test]
    fn checkpoint_meta_round_trips_through_toml() {
        let meta = CheckpointMeta {
            labels: vec!["kalyani".into(), "mohanam".into()],
            pipeline: FeaturePipeline::default(),
        };
        let table = meta.to_table();
        assert_eq!(CheckpointMeta::from_table(&table).unwrap(), meta);
    }
}
