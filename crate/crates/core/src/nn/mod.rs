//! Neural network core: the exact layer set of the classifier (Conv1D,
//! MaxPool1D, BatchNorm1D, ReLU, LSTM, Flatten, Dense, Dropout, Softmax)
//! with hand-written reverse-mode gradients, cross-entropy, and Adam.
//!
//! Everything runs in f64; checkpoints store parameters as f32.

pub mod adam;
pub mod checkpoint;
pub mod layers;
pub mod loss;
pub mod lstm;
pub mod tensor;

pub use adam::{adam_update, Adam};
pub use checkpoint::{load_model, save_model};
pub use loss::{argmax_rows, cross_entropy, one_hot};
pub use tensor::Tensor;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ErrorCategory;
use layers::{BatchNorm1D, Conv1D, Dense, Dropout, Flatten, MaxPool1D, Relu, Softmax};
use lstm::Lstm;

/// Keras-style moving-average coefficient for BatchNorm running statistics.
pub const DEFAULT_BN_MOMENTUM: f64 = 0.99;
/// Variance floor. Small enough that normalized activations carry unit
/// variance to within 1e-6 on well-scaled inputs.
pub const DEFAULT_BN_EPSILON: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum NnError {
    #[error("shape mismatch in {layer}: {detail}")]
    Shape { layer: String, detail: String },
    #[error("non-finite values produced by {0}")]
    NonFinite(String),
    #[error("backward without a cached forward pass in {0}")]
    MissingCache(&'static str),
    #[error("invalid model config: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl NnError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            NnError::NonFinite(_) => ErrorCategory::Numeric,
            NnError::Checkpoint(_) => ErrorCategory::Data,
            _ => ErrorCategory::Usage,
        }
    }
}

/// Declarative layer description; the unit of model configuration and
/// checkpoint metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerSpec {
    Conv1D {
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
    },
    MaxPool1D {
        pool: usize,
    },
    BatchNorm1D {
        channels: usize,
        momentum: f64,
        epsilon: f64,
    },
    Relu,
    Lstm {
        input_size: usize,
        hidden: usize,
    },
    Flatten,
    Dense {
        inputs: usize,
        outputs: usize,
    },
    Dropout {
        rate: f64,
    },
    Softmax,
}

impl LayerSpec {
    pub fn name(&self) -> String {
        match self {
            LayerSpec::Conv1D {
                in_channels,
                out_channels,
                kernel,
            } => format!("conv1d({in_channels}->{out_channels}, k{kernel})"),
            LayerSpec::MaxPool1D { pool } => format!("maxpool1d({pool})"),
            LayerSpec::BatchNorm1D { channels, .. } => format!("batchnorm1d({channels})"),
            LayerSpec::Relu => "relu".to_string(),
            LayerSpec::Lstm { input_size, hidden } => format!("lstm({input_size}->{hidden})"),
            LayerSpec::Flatten => "flatten".to_string(),
            LayerSpec::Dense { inputs, outputs } => format!("dense({inputs}->{outputs})"),
            LayerSpec::Dropout { rate } => format!("dropout({rate})"),
            LayerSpec::Softmax => "softmax".to_string(),
        }
    }

    /// Trainable parameter count.
    pub fn parameter_count(&self) -> usize {
        match self {
            LayerSpec::Conv1D {
                in_channels,
                out_channels,
                kernel,
            } => (kernel * in_channels + 1) * out_channels,
            LayerSpec::BatchNorm1D { channels, .. } => 2 * channels,
            LayerSpec::Lstm { input_size, hidden } => 4 * (hidden * (input_size + hidden) + hidden),
            LayerSpec::Dense { inputs, outputs } => (inputs + 1) * outputs,
            _ => 0,
        }
    }

    /// Output shape (batch dimension excluded) for a given input shape.
    fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>, NnError> {
        let bad = |detail: String| NnError::Config(format!("{}: {detail}", self.name()));
        match self {
            LayerSpec::Conv1D {
                in_channels,
                out_channels,
                kernel,
            } => match input {
                [t, c] if c == in_channels && *t >= *kernel => Ok(vec![t - kernel + 1, *out_channels]),
                _ => Err(bad(format!("cannot take input {input:?}"))),
            },
            LayerSpec::MaxPool1D { pool } => match input {
                [t, c] if t / pool >= 1 => Ok(vec![t / pool, *c]),
                _ => Err(bad(format!("cannot take input {input:?}"))),
            },
            LayerSpec::BatchNorm1D { channels, .. } => match input {
                [t, c] if c == channels => Ok(vec![*t, *c]),
                _ => Err(bad(format!("cannot take input {input:?}"))),
            },
            LayerSpec::Relu | LayerSpec::Dropout { .. } => Ok(input.to_vec()),
            LayerSpec::Lstm { input_size, hidden } => match input {
                [t, c] if c == input_size => Ok(vec![*t, *hidden]),
                _ => Err(bad(format!("cannot take input {input:?}"))),
            },
            LayerSpec::Flatten => match input {
                [t, c] => Ok(vec![t * c]),
                _ => Err(bad(format!("cannot take input {input:?}"))),
            },
            LayerSpec::Dense { inputs, outputs } => match input {
                [w] if w == inputs => Ok(vec![*outputs]),
                _ => Err(bad(format!("cannot take input {input:?}"))),
            },
            LayerSpec::Softmax => match input {
                [w] => Ok(vec![*w]),
                _ => Err(bad(format!("cannot take input {input:?}"))),
            },
        }
    }
}

/// Full model description: ordered layers plus input geometry and the seed
/// that determines initialization and dropout streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub layers: Vec<LayerSpec>,
    pub num_classes: usize,
    pub input_frames: usize,
    pub input_bins: usize,
    pub seed: u64,
}

impl ModelConfig {
    /// Check that adjacent layer shapes compose, dropout rates are valid,
    /// and the stack ends in a softmax over `num_classes`.
    pub fn validate(&self) -> Result<(), NnError> {
        if self.layers.is_empty() {
            return Err(NnError::Config("no layers".to_string()));
        }
        for spec in &self.layers {
            if let LayerSpec::Dropout { rate } = spec {
                if !(0.0..1.0).contains(rate) {
                    return Err(NnError::Config(format!("dropout rate {rate} outside [0, 1)")));
                }
            }
        }
        let mut shape = vec![self.input_frames, self.input_bins];
        for spec in &self.layers {
            shape = spec.output_shape(&shape)?;
        }
        if !matches!(self.layers.last(), Some(LayerSpec::Softmax)) {
            return Err(NnError::Config("final layer must be softmax".to_string()));
        }
        if shape != vec![self.num_classes] {
            return Err(NnError::Config(format!(
                "stack produces {shape:?}, expected [{}]",
                self.num_classes
            )));
        }
        Ok(())
    }

    /// Total trainable parameters plus a per-layer table.
    pub fn parameter_table(&self) -> (usize, Vec<(String, usize)>) {
        let rows: Vec<(String, usize)> = self
            .layers
            .iter()
            .map(|l| (l.name(), l.parameter_count()))
            .collect();
        (rows.iter().map(|r| r.1).sum(), rows)
    }

    /// The published architecture: Conv1D(64, k3), MaxPool, BatchNorm, ReLU,
    /// LSTM(512) returning the full sequence, Flatten, Dense 512 and 256 with
    /// dropout 0.5, Dense over the classes, softmax.
    pub fn paper_preset(input_frames: usize, input_bins: usize, num_classes: usize, seed: u64) -> ModelConfig {
        let pooled = (input_frames - 2) / 2;
        ModelConfig {
            layers: vec![
                LayerSpec::Conv1D {
                    in_channels: input_bins,
                    out_channels: 64,
                    kernel: 3,
                },
                LayerSpec::MaxPool1D { pool: 2 },
                LayerSpec::BatchNorm1D {
                    channels: 64,
                    momentum: DEFAULT_BN_MOMENTUM,
                    epsilon: DEFAULT_BN_EPSILON,
                },
                LayerSpec::Relu,
                LayerSpec::Lstm {
                    input_size: 64,
                    hidden: 512,
                },
                LayerSpec::Flatten,
                LayerSpec::Dense {
                    inputs: pooled * 512,
                    outputs: 512,
                },
                LayerSpec::Dropout { rate: 0.5 },
                LayerSpec::Dense {
                    inputs: 512,
                    outputs: 256,
                },
                LayerSpec::Dropout { rate: 0.5 },
                LayerSpec::Dense {
                    inputs: 256,
                    outputs: num_classes,
                },
                LayerSpec::Softmax,
            ],
            num_classes,
            input_frames,
            input_bins,
            seed,
        }
    }

    /// Desk-scale variant of the same stack: Conv1D(16, k3) and LSTM(32).
    pub fn tiny_preset(input_frames: usize, input_bins: usize, num_classes: usize, seed: u64) -> ModelConfig {
        let pooled = (input_frames - 2) / 2;
        ModelConfig {
            layers: vec![
                LayerSpec::Conv1D {
                    in_channels: input_bins,
                    out_channels: 16,
                    kernel: 3,
                },
                LayerSpec::MaxPool1D { pool: 2 },
                LayerSpec::BatchNorm1D {
                    channels: 16,
                    momentum: DEFAULT_BN_MOMENTUM,
                    epsilon: DEFAULT_BN_EPSILON,
                },
                LayerSpec::Relu,
                LayerSpec::Lstm {
                    input_size: 16,
                    hidden: 32,
                },
                LayerSpec::Flatten,
                LayerSpec::Dense {
                    inputs: pooled * 32,
                    outputs: 64,
                },
                LayerSpec::Relu,
                LayerSpec::Dense {
                    inputs: 64,
                    outputs: num_classes,
                },
                LayerSpec::Softmax,
            ],
            num_classes,
            input_frames,
            input_bins,
            seed,
        }
    }
}

/// A constructed layer with parameters and caches.
#[derive(Debug, Clone)]
pub enum Layer {
    Conv1D(Conv1D),
    MaxPool1D(MaxPool1D),
    BatchNorm1D(BatchNorm1D),
    Relu(Relu),
    Lstm(Lstm),
    Flatten(Flatten),
    Dense(Dense),
    Dropout(Dropout),
    Softmax(Softmax),
}

impl Layer {
    pub fn from_spec(spec: &LayerSpec, rng: &mut ChaCha8Rng) -> Layer {
        match *spec {
            LayerSpec::Conv1D {
                in_channels,
                out_channels,
                kernel,
            } => Layer::Conv1D(Conv1D::new(in_channels, out_channels, kernel, rng)),
            LayerSpec::MaxPool1D { pool } => Layer::MaxPool1D(MaxPool1D::new(pool)),
            LayerSpec::BatchNorm1D {
                channels,
                momentum,
                epsilon,
            } => Layer::BatchNorm1D(BatchNorm1D::new(channels, momentum, epsilon)),
            LayerSpec::Relu => Layer::Relu(Relu::default()),
            LayerSpec::Lstm { input_size, hidden } => Layer::Lstm(Lstm::new(input_size, hidden, rng)),
            LayerSpec::Flatten => Layer::Flatten(Flatten::default()),
            LayerSpec::Dense { inputs, outputs } => Layer::Dense(Dense::new(inputs, outputs, rng)),
            LayerSpec::Dropout { rate } => Layer::Dropout(Dropout::new(rate)),
            LayerSpec::Softmax => Layer::Softmax(Softmax::default()),
        }
    }

    pub fn forward(&mut self, x: &Tensor, training: bool, rng: &mut ChaCha8Rng) -> Result<Tensor, NnError> {
        match self {
            Layer::Conv1D(l) => l.forward(x, training),
            Layer::MaxPool1D(l) => l.forward(x, training),
            Layer::BatchNorm1D(l) => l.forward(x, training),
            Layer::Relu(l) => Ok(l.forward(x, training)),
            Layer::Lstm(l) => l.forward(x, training),
            Layer::Flatten(l) => l.forward(x, training),
            Layer::Dense(l) => l.forward(x, training),
            Layer::Dropout(l) => Ok(l.forward(x, training, rng)),
            Layer::Softmax(l) => l.forward(x, training),
        }
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor, NnError> {
        match self {
            Layer::Conv1D(l) => l.backward(grad),
            Layer::MaxPool1D(l) => l.backward(grad),
            Layer::BatchNorm1D(l) => l.backward(grad),
            Layer::Relu(l) => l.backward(grad),
            Layer::Lstm(l) => l.backward(grad),
            Layer::Flatten(l) => l.backward(grad),
            Layer::Dense(l) => l.backward(grad),
            Layer::Dropout(l) => l.backward(grad),
            Layer::Softmax(l) => l.backward(grad),
        }
    }

    /// Visit `(parameters, gradients)` pairs in a fixed order.
    pub fn visit_params(&mut self, f: &mut dyn FnMut(&mut [f64], &[f64])) {
        match self {
            Layer::Conv1D(l) => {
                f(&mut l.weights, &l.grad_weights);
                f(&mut l.bias, &l.grad_bias);
            }
            Layer::BatchNorm1D(l) => {
                f(&mut l.gamma, &l.grad_gamma);
                f(&mut l.beta, &l.grad_beta);
            }
            Layer::Lstm(l) => {
                f(&mut l.w, &l.grad_w);
                f(&mut l.u, &l.grad_u);
                f(&mut l.b, &l.grad_b);
            }
            Layer::Dense(l) => {
                f(&mut l.weights, &l.grad_weights);
                f(&mut l.bias, &l.grad_bias);
            }
            _ => {}
        }
    }

    pub fn zero_grads(&mut self) {
        match self {
            Layer::Conv1D(l) => {
                l.grad_weights.iter_mut().for_each(|v| *v = 0.0);
                l.grad_bias.iter_mut().for_each(|v| *v = 0.0);
            }
            Layer::BatchNorm1D(l) => {
                l.grad_gamma.iter_mut().for_each(|v| *v = 0.0);
                l.grad_beta.iter_mut().for_each(|v| *v = 0.0);
            }
            Layer::Lstm(l) => {
                l.grad_w.iter_mut().for_each(|v| *v = 0.0);
                l.grad_u.iter_mut().for_each(|v| *v = 0.0);
                l.grad_b.iter_mut().for_each(|v| *v = 0.0);
            }
            Layer::Dense(l) => {
                l.grad_weights.iter_mut().for_each(|v| *v = 0.0);
                l.grad_bias.iter_mut().for_each(|v| *v = 0.0);
            }
            _ => {}
        }
    }

    /// All state that defines the layer's behavior at inference time:
    /// trainable parameters plus BatchNorm running statistics.
    pub fn state_vectors(&self) -> Vec<Vec<f64>> {
        match self {
            Layer::Conv1D(l) => vec![l.weights.clone(), l.bias.clone()],
            Layer::BatchNorm1D(l) => vec![
                l.gamma.clone(),
                l.beta.clone(),
                l.running_mean.clone(),
                l.running_var.clone(),
            ],
            Layer::Lstm(l) => vec![l.w.clone(), l.u.clone(), l.b.clone()],
            Layer::Dense(l) => vec![l.weights.clone(), l.bias.clone()],
            _ => vec![],
        }
    }

    pub fn load_state(&mut self, state: &[Vec<f64>]) -> Result<(), NnError> {
        let mut slots: Vec<&mut Vec<f64>> = match self {
            Layer::Conv1D(l) => vec![&mut l.weights, &mut l.bias],
            Layer::BatchNorm1D(l) => vec![
                &mut l.gamma,
                &mut l.beta,
                &mut l.running_mean,
                &mut l.running_var,
            ],
            Layer::Lstm(l) => vec![&mut l.w, &mut l.u, &mut l.b],
            Layer::Dense(l) => vec![&mut l.weights, &mut l.bias],
            _ => vec![],
        };
        if slots.len() != state.len() || slots.iter().zip(state).any(|(s, v)| s.len() != v.len()) {
            return Err(NnError::Checkpoint("layer state size mismatch".to_string()));
        }
        for (slot, v) in slots.iter_mut().zip(state) {
            slot.clone_from(v);
        }
        Ok(())
    }
}

/// A model instance: configured layers plus the seeded RNG that drives
/// initialization and dropout masks.
#[derive(Debug, Clone)]
pub struct Model {
    config: ModelConfig,
    layers: Vec<Layer>,
    rng: ChaCha8Rng,
}

impl Model {
    pub fn new(config: ModelConfig) -> Result<Model, NnError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let layers = config
            .layers
            .iter()
            .map(|spec| Layer::from_spec(spec, &mut rng))
            .collect();
        Ok(Model { config, layers, rng })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    /// Run the stack. `training` enables dropout sampling, batch statistics
    /// in BatchNorm, and backward caches. Output rows are probabilities.
    pub fn forward(&mut self, x: &Tensor, training: bool) -> Result<Tensor, NnError> {
        let mut cur = x.clone();
        for (i, layer) in self.layers.iter_mut().enumerate() {
            cur = layer.forward(&cur, training, &mut self.rng)?;
            cur.assert_finite(&format!("layer {i} ({})", self.config.layers[i].name()))?;
        }
        Ok(cur)
    }

    /// Reverse pass from the fused softmax + cross-entropy gradient
    /// (`(p - y)/batch`, a gradient with respect to the softmax *input*).
    /// The trailing softmax layer is skipped accordingly.
    pub fn backward_fused(&mut self, grad_logits: &Tensor) -> Result<(), NnError> {
        debug_assert!(matches!(self.layers.last(), Some(Layer::Softmax(_))));
        let mut grad = grad_logits.clone();
        let n = self.layers.len();
        for layer in self.layers[..n - 1].iter_mut().rev() {
            grad = layer.backward(&grad)?;
        }
        Ok(())
    }

    pub fn zero_grads(&mut self) {
        for layer in &mut self.layers {
            layer.zero_grads();
        }
    }

    pub fn visit_params(&mut self, f: &mut dyn FnMut(&mut [f64], &[f64])) {
        for layer in &mut self.layers {
            layer.visit_params(f);
        }
    }

    /// Trainable parameter total and per-layer table.
    pub fn count_parameters(&self) -> (usize, Vec<(String, usize)>) {
        self.config.parameter_table()
    }

    /// Copy of all inference-relevant state, for best-weights snapshots.
    pub fn snapshot_state(&self) -> Vec<Vec<Vec<f64>>> {
        self.layers.iter().map(Layer::state_vectors).collect()
    }

    pub fn restore_state(&mut self, state: &[Vec<Vec<f64>>]) -> Result<(), NnError> {
        if state.len() != self.layers.len() {
            return Err(NnError::Checkpoint("snapshot layer count mismatch".to_string()));
        }
        for (layer, s) in self.layers.iter_mut().zip(state) {
            layer.load_state(s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(classes: usize) -> ModelConfig {
        ModelConfig::tiny_preset(16, 8, classes, 42)
    }

    #[test]
    fn presets_validate() {
        ModelConfig::tiny_preset(212, 56, 8, 0).validate().unwrap();
        ModelConfig::paper_preset(1288, 56, 172, 0).validate().unwrap();
    }

    #[test]
    fn shape_break_is_reported() {
        let mut cfg = tiny_config(4);
        cfg.layers[4] = LayerSpec::Lstm {
            input_size: 99,
            hidden: 32,
        };
        assert!(matches!(cfg.validate(), Err(NnError::Config(_))));
    }

    #[test]
    fn conv_parameter_count_from_the_architecture() {
        let spec = LayerSpec::Conv1D {
            in_channels: 56,
            out_channels: 64,
            kernel: 3,
        };
        assert_eq!(spec.parameter_count(), 10_816);
    }

    #[test]
    fn batchnorm_has_two_trainable_per_channel() {
        let spec = LayerSpec::BatchNorm1D {
            channels: 64,
            momentum: DEFAULT_BN_MOMENTUM,
            epsilon: DEFAULT_BN_EPSILON,
        };
        assert_eq!(spec.parameter_count(), 128);
    }

    #[test]
    fn dense_512_to_256_counts_131328() {
        let spec = LayerSpec::Dense {
            inputs: 512,
            outputs: 256,
        };
        assert_eq!(spec.parameter_count(), 131_328);
    }

    #[test]
    fn zeroed_final_dense_gives_uniform_probabilities() {
        let classes = 10;
        let mut model = Model::new(tiny_config(classes)).unwrap();
        if let Some(Layer::Dense(d)) = model.layers_mut().iter_mut().rev().find(|l| matches!(l, Layer::Dense(_))) {
            d.weights.iter_mut().for_each(|v| *v = 0.0);
            d.bias.iter_mut().for_each(|v| *v = 0.0);
        }
        let x = Tensor::from_vec(&[3, 16, 8], (0..3 * 16 * 8).map(|i| (i % 7) as f64 * 0.1).collect()).unwrap();
        let probs = model.forward(&x, false).unwrap();
        for &p in probs.data() {
            assert!((p - 1.0 / classes as f64).abs() < 1e-12);
        }
        for b in 0..3 {
            let sum: f64 = probs.data()[b * classes..(b + 1) * classes].iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_kernel_conv_crops_one_frame_each_side() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut conv = Conv1D::new(1, 1, 3, &mut rng);
        conv.weights.copy_from_slice(&[0.0, 1.0, 0.0]);
        conv.bias[0] = 0.0;
        let x = Tensor::from_vec(&[1, 6, 1], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let y = conv.forward(&x, false).unwrap();
        assert_eq!(y.shape(), &[1, 4, 1]);
        assert_eq!(y.data(), &[2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn non_finite_intermediate_names_the_layer() {
        let mut model = Model::new(tiny_config(4)).unwrap();
        if let Layer::Conv1D(c) = &mut model.layers_mut()[0] {
            c.weights[0] = f64::INFINITY;
        }
        let x = Tensor::from_vec(&[1, 16, 8], vec![0.5; 128]).unwrap();
        let err = model.forward(&x, false).unwrap_err();
        match err {
            NnError::NonFinite(name) => assert!(name.contains("conv1d"), "{name}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn backward_without_forward_is_a_state_error() {
        let mut model = Model::new(tiny_config(4)).unwrap();
        let grad = Tensor::zeros(&[1, 4]);
        assert!(matches!(
            model.backward_fused(&grad),
            Err(NnError::MissingCache(_))
        ));
    }

    #[test]
    fn zero_upstream_gradient_zeroes_all_parameter_gradients() {
        let mut model = Model::new(tiny_config(4)).unwrap();
        let x = Tensor::from_vec(&[2, 16, 8], vec![0.3; 2 * 16 * 8]).unwrap();
        model.forward(&x, true).unwrap();
        model.zero_grads();
        model.backward_fused(&Tensor::zeros(&[2, 4])).unwrap();
        model.visit_params(&mut |_p, g| {
            assert!(g.iter().all(|&v| v == 0.0));
        });
    }

    #[test]
    fn snapshot_and_restore_round_trip() {
        let mut model = Model::new(tiny_config(4)).unwrap();
        let snap = model.snapshot_state();
        let x = Tensor::from_vec(&[2, 16, 8], vec![0.3; 2 * 16 * 8]).unwrap();
        let before = model.forward(&x, false).unwrap();
        // Perturb and restore.
        model.visit_params(&mut |p, _| p.iter_mut().for_each(|v| *v += 0.1));
        let after = model.forward(&x, false).unwrap();
        assert_ne!(before.data(), after.data());
        model.restore_state(&snap).unwrap();
        let restored = model.forward(&x, false).unwrap();
        assert_eq!(before.data(), restored.data());
    }
}
