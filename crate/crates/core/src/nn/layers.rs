//! Feed-forward layers: Conv1D, MaxPool1D, BatchNorm1D, ReLU, Flatten,
//! Dense, Dropout, Softmax. Each owns its parameters, gradients, and the
//! forward cache its backward pass needs.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::tensor::Tensor;
use super::NnError;

pub(super) fn glorot_uniform(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize, n: usize) -> Vec<f64> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..n).map(|_| rng.random_range(-limit..limit)).collect()
}

fn missing_cache(layer: &'static str) -> NnError {
    NnError::MissingCache(layer)
}

/// 1-D convolution over time, stride 1, no padding:
/// `[B, T, in] -> [B, T-k+1, out]`.
#[derive(Debug, Clone)]
pub struct Conv1D {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: usize,
    /// `[out, in, k]` row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub grad_weights: Vec<f64>,
    pub grad_bias: Vec<f64>,
    cache: Option<Tensor>,
}

impl Conv1D {
    pub fn new(in_channels: usize, out_channels: usize, kernel: usize, rng: &mut ChaCha8Rng) -> Self {
        let n = out_channels * in_channels * kernel;
        Conv1D {
            in_channels,
            out_channels,
            kernel,
            weights: glorot_uniform(rng, in_channels * kernel, out_channels, n),
            bias: vec![0.0; out_channels],
            grad_weights: vec![0.0; n],
            grad_bias: vec![0.0; out_channels],
            cache: None,
        }
    }

    pub fn forward(&mut self, x: &Tensor, training: bool) -> Result<Tensor, NnError> {
        let (batch, time, chans) = x.dims3("conv1d")?;
        if chans != self.in_channels {
            return Err(NnError::Shape {
                layer: "conv1d".to_string(),
                detail: format!("input has {chans} channels, layer expects {}", self.in_channels),
            });
        }
        if time < self.kernel {
            return Err(NnError::Shape {
                layer: "conv1d".to_string(),
                detail: format!("{time} timesteps shorter than kernel {}", self.kernel),
            });
        }
        let out_t = time - self.kernel + 1;
        // Weights re-laid as [out][j][in] so the inner product over input
        // channels walks both operands contiguously.
        let k = self.kernel;
        let cin = self.in_channels;
        let mut wt = vec![0.0f64; self.weights.len()];
        for o in 0..self.out_channels {
            for i in 0..cin {
                for j in 0..k {
                    wt[o * k * cin + j * cin + i] = self.weights[o * cin * k + i * k + j];
                }
            }
        }
        let xd = x.data();
        let mut y = Tensor::zeros(&[batch, out_t, self.out_channels]);
        let yd = y.data_mut();
        for b in 0..batch {
            for t in 0..out_t {
                let x_base = (b * time + t) * cin;
                let y_base = (b * out_t + t) * self.out_channels;
                for o in 0..self.out_channels {
                    let mut acc = self.bias[o];
                    let w_base = o * k * cin;
                    for j in 0..k {
                        let xr = &xd[x_base + j * cin..x_base + (j + 1) * cin];
                        let wr = &wt[w_base + j * cin..w_base + (j + 1) * cin];
                        acc += xr.iter().zip(wr).map(|(a, b)| a * b).sum::<f64>();
                    }
                    yd[y_base + o] = acc;
                }
            }
        }
        if training {
            self.cache = Some(x.clone());
        }
        Ok(y)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor, NnError> {
        let x = self.cache.take().ok_or_else(|| missing_cache("conv1d"))?;
        let (batch, time, cin) = x.dims3("conv1d")?;
        let (gb, out_t, cout) = grad.dims3("conv1d")?;
        debug_assert_eq!(gb, batch);
        debug_assert_eq!(out_t, time - self.kernel + 1);
        debug_assert_eq!(cout, self.out_channels);
        let k = self.kernel;
        let xd = x.data();
        let gd = grad.data();
        let mut dx = Tensor::zeros(&[batch, time, cin]);
        let dxd = dx.data_mut();
        for b in 0..batch {
            for t in 0..out_t {
                let y_base = (b * out_t + t) * cout;
                let x_base = (b * time + t) * cin;
                for o in 0..cout {
                    let g = gd[y_base + o];
                    if g == 0.0 {
                        continue;
                    }
                    self.grad_bias[o] += g;
                    let w_base = o * cin * k;
                    for i in 0..cin {
                        for j in 0..k {
                            self.grad_weights[w_base + i * k + j] += g * xd[x_base + j * cin + i];
                            dxd[x_base + j * cin + i] += g * self.weights[w_base + i * k + j];
                        }
                    }
                }
            }
        }
        Ok(dx)
    }

    pub fn parameter_count(&self) -> usize {
        (self.kernel * self.in_channels + 1) * self.out_channels
    }
}

/// Max pooling over time: `[B, T, C] -> [B, T/pool, C]`, remainder dropped.
#[derive(Debug, Clone)]
pub struct MaxPool1D {
    pub pool: usize,
    cache: Option<(Vec<usize>, Vec<usize>)>, // (input shape, argmax flat indices)
}

impl MaxPool1D {
    pub fn new(pool: usize) -> Self {
        MaxPool1D { pool, cache: None }
    }

    pub fn forward(&mut self, x: &Tensor, training: bool) -> Result<Tensor, NnError> {
        let (batch, time, chans) = x.dims3("maxpool1d")?;
        let out_t = time / self.pool;
        if out_t == 0 {
            return Err(NnError::Shape {
                layer: "maxpool1d".to_string(),
                detail: format!("{time} timesteps shorter than pool {}", self.pool),
            });
        }
        let xd = x.data();
        let mut y = Tensor::zeros(&[batch, out_t, chans]);
        let yd = y.data_mut();
        let mut argmax = vec![0usize; batch * out_t * chans];
        for b in 0..batch {
            for t in 0..out_t {
                for c in 0..chans {
                    let mut best_idx = (b * time + t * self.pool) * chans + c;
                    let mut best = xd[best_idx];
                    for p in 1..self.pool {
                        let idx = (b * time + t * self.pool + p) * chans + c;
                        // Strict comparison keeps the first index on ties.
                        if xd[idx] > best {
                            best = xd[idx];
                            best_idx = idx;
                        }
                    }
                    let o = (b * out_t + t) * chans + c;
                    yd[o] = best;
                    argmax[o] = best_idx;
                }
            }
        }
        if training {
            self.cache = Some((x.shape().to_vec(), argmax));
        }
        Ok(y)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor, NnError> {
        let (shape, argmax) = self.cache.take().ok_or_else(|| missing_cache("maxpool1d"))?;
        let mut dx = Tensor::zeros(&shape);
        let dxd = dx.data_mut();
        for (o, &src) in argmax.iter().enumerate() {
            dxd[src] += grad.data()[o];
        }
        Ok(dx)
    }
}

/// Batch normalization over the channel axis of `[B, T, C]`: statistics are
/// taken across batch and time per channel.
#[derive(Debug, Clone)]
pub struct BatchNorm1D {
    pub channels: usize,
    pub momentum: f64,
    pub epsilon: f64,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub grad_gamma: Vec<f64>,
    pub grad_beta: Vec<f64>,
    cache: Option<BnCache>,
}

#[derive(Debug, Clone)]
struct BnCache {
    shape: Vec<usize>,
    normalized: Vec<f64>,
    inv_std: Vec<f64>,
}

impl BatchNorm1D {
    pub fn new(channels: usize, momentum: f64, epsilon: f64) -> Self {
        BatchNorm1D {
            channels,
            momentum,
            epsilon,
            gamma: vec![1.0; channels],
            beta: vec![0.0; channels],
            running_mean: vec![0.0; channels],
            running_var: vec![1.0; channels],
            grad_gamma: vec![0.0; channels],
            grad_beta: vec![0.0; channels],
            cache: None,
        }
    }

    pub fn forward(&mut self, x: &Tensor, training: bool) -> Result<Tensor, NnError> {
        let (batch, time, chans) = x.dims3("batchnorm1d")?;
        if chans != self.channels {
            return Err(NnError::Shape {
                layer: "batchnorm1d".to_string(),
                detail: format!("input has {chans} channels, layer expects {}", self.channels),
            });
        }
        let n = batch * time;
        let xd = x.data();
        let mut y = Tensor::zeros(&[batch, time, chans]);
        if training {
            let mut mean = vec![0.0f64; chans];
            for row in 0..n {
                for c in 0..chans {
                    mean[c] += xd[row * chans + c];
                }
            }
            for m in &mut mean {
                *m /= n as f64;
            }
            let mut var = vec![0.0f64; chans];
            for row in 0..n {
                for c in 0..chans {
                    let d = xd[row * chans + c] - mean[c];
                    var[c] += d * d;
                }
            }
            for v in &mut var {
                *v /= n as f64;
            }
            let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / (v + self.epsilon).sqrt()).collect();
            let mut normalized = vec![0.0f64; n * chans];
            let yd = y.data_mut();
            for row in 0..n {
                for c in 0..chans {
                    let idx = row * chans + c;
                    let xn = (xd[idx] - mean[c]) * inv_std[c];
                    normalized[idx] = xn;
                    yd[idx] = self.gamma[c] * xn + self.beta[c];
                }
            }
            for c in 0..chans {
                self.running_mean[c] = self.momentum * self.running_mean[c] + (1.0 - self.momentum) * mean[c];
                self.running_var[c] = self.momentum * self.running_var[c] + (1.0 - self.momentum) * var[c];
            }
            self.cache = Some(BnCache {
                shape: x.shape().to_vec(),
                normalized,
                inv_std,
            });
        } else {
            let yd = y.data_mut();
            for row in 0..n {
                for c in 0..chans {
                    let idx = row * chans + c;
                    let xn = (xd[idx] - self.running_mean[c]) / (self.running_var[c] + self.epsilon).sqrt();
                    yd[idx] = self.gamma[c] * xn + self.beta[c];
                }
            }
        }
        Ok(y)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor, NnError> {
        let cache = self.cache.take().ok_or_else(|| missing_cache("batchnorm1d"))?;
        let chans = self.channels;
        let n = cache.shape[0] * cache.shape[1];
        let gd = grad.data();
        // Sums needed by the full batch-statistics Jacobian.
        let mut sum_dy = vec![0.0f64; chans];
        let mut sum_dy_xn = vec![0.0f64; chans];
        for row in 0..n {
            for c in 0..chans {
                let idx = row * chans + c;
                sum_dy[c] += gd[idx];
                sum_dy_xn[c] += gd[idx] * cache.normalized[idx];
            }
        }
        for c in 0..chans {
            self.grad_gamma[c] += sum_dy_xn[c];
            self.grad_beta[c] += sum_dy[c];
        }
        let mut dx = Tensor::zeros(&cache.shape);
        let dxd = dx.data_mut();
        let nf = n as f64;
        for row in 0..n {
            for c in 0..chans {
                let idx = row * chans + c;
                dxd[idx] = self.gamma[c] * cache.inv_std[c] / nf
                    * (nf * gd[idx] - sum_dy[c] - cache.normalized[idx] * sum_dy_xn[c]);
            }
        }
        Ok(dx)
    }

    pub fn trainable_count(&self) -> usize {
        2 * self.channels
    }
}

#[derive(Debug, Clone, Default)]
pub struct Relu {
    cache: Option<Vec<bool>>,
}

impl Relu {
    pub fn forward(&mut self, x: &Tensor, training: bool) -> Tensor {
        let mut y = x.clone();
        let mask: Vec<bool> = x.data().iter().map(|&v| v > 0.0).collect();
        for (v, &keep) in y.data_mut().iter_mut().zip(&mask) {
            if !keep {
                *v = 0.0;
            }
        }
        if training {
            self.cache = Some(mask);
        }
        y
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor, NnError> {
        let mask = self.cache.take().ok_or_else(|| missing_cache("relu"))?;
        let mut dx = grad.clone();
        for (v, keep) in dx.data_mut().iter_mut().zip(mask) {
            if !keep {
                *v = 0.0;
            }
        }
        Ok(dx)
    }
}

/// `[B, T, C] -> [B, T*C]`.
#[derive(Debug, Clone, Default)]
pub struct Flatten {
    cache: Option<Vec<usize>>,
}

impl Flatten {
    pub fn forward(&mut self, x: &Tensor, training: bool) -> Result<Tensor, NnError> {
        let (batch, time, chans) = x.dims3("flatten")?;
        if training {
            self.cache = Some(x.shape().to_vec());
        }
        Tensor::from_vec(&[batch, time * chans], x.data().to_vec())
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor, NnError> {
        let shape = self.cache.take().ok_or_else(|| missing_cache("flatten"))?;
        Tensor::from_vec(&shape, grad.data().to_vec())
    }
}

/// Fully connected layer `[B, in] -> [B, out]`.
#[derive(Debug, Clone)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    /// `[out, in]` row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub grad_weights: Vec<f64>,
    pub grad_bias: Vec<f64>,
    cache: Option<Tensor>,
}

impl Dense {
    pub fn new(inputs: usize, outputs: usize, rng: &mut ChaCha8Rng) -> Self {
        Dense {
            inputs,
            outputs,
            weights: glorot_uniform(rng, inputs, outputs, inputs * outputs),
            bias: vec![0.0; outputs],
            grad_weights: vec![0.0; inputs * outputs],
            grad_bias: vec![0.0; outputs],
            cache: None,
        }
    }

    pub fn forward(&mut self, x: &Tensor, training: bool) -> Result<Tensor, NnError> {
        let (batch, inputs) = x.dims2("dense")?;
        if inputs != self.inputs {
            return Err(NnError::Shape {
                layer: "dense".to_string(),
                detail: format!("input width {inputs}, layer expects {}", self.inputs),
            });
        }
        let xd = x.data();
        let mut y = Tensor::zeros(&[batch, self.outputs]);
        let yd = y.data_mut();
        for b in 0..batch {
            let xr = &xd[b * self.inputs..(b + 1) * self.inputs];
            for o in 0..self.outputs {
                let wr = &self.weights[o * self.inputs..(o + 1) * self.inputs];
                yd[b * self.outputs + o] =
                    self.bias[o] + xr.iter().zip(wr).map(|(a, w)| a * w).sum::<f64>();
            }
        }
        if training {
            self.cache = Some(x.clone());
        }
        Ok(y)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor, NnError> {
        let x = self.cache.take().ok_or_else(|| missing_cache("dense"))?;
        let (batch, _) = x.dims2("dense")?;
        let gd = grad.data();
        let xd = x.data();
        let mut dx = Tensor::zeros(&[batch, self.inputs]);
        let dxd = dx.data_mut();
        for b in 0..batch {
            let xr = &xd[b * self.inputs..(b + 1) * self.inputs];
            let gr = &gd[b * self.outputs..(b + 1) * self.outputs];
            for (o, &g) in gr.iter().enumerate() {
                self.grad_bias[o] += g;
                let wrow = o * self.inputs;
                for i in 0..self.inputs {
                    self.grad_weights[wrow + i] += g * xr[i];
                    dxd[b * self.inputs + i] += g * self.weights[wrow + i];
                }
            }
        }
        Ok(dx)
    }

    pub fn parameter_count(&self) -> usize {
        (self.inputs + 1) * self.outputs
    }
}

/// Inverted dropout: training scales kept activations by `1/(1-rate)`,
/// inference is exactly the identity.
#[derive(Debug, Clone)]
pub struct Dropout {
    pub rate: f64,
    cache: Option<Vec<f64>>,
}

impl Dropout {
    pub fn new(rate: f64) -> Self {
        assert!((0.0..1.0).contains(&rate), "dropout rate must be in [0, 1)");
        Dropout { rate, cache: None }
    }

    pub fn forward(&mut self, x: &Tensor, training: bool, rng: &mut ChaCha8Rng) -> Tensor {
        if !training || self.rate == 0.0 {
            if training {
                self.cache = Some(vec![1.0; x.len()]);
            }
            return x.clone();
        }
        let keep = 1.0 - self.rate;
        let mask: Vec<f64> = (0..x.len())
            .map(|_| if rng.random::<f64>() < keep { 1.0 / keep } else { 0.0 })
            .collect();
        let mut y = x.clone();
        for (v, m) in y.data_mut().iter_mut().zip(&mask) {
            *v *= m;
        }
        self.cache = Some(mask);
        y
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor, NnError> {
        let mask = self.cache.take().ok_or_else(|| missing_cache("dropout"))?;
        let mut dx = grad.clone();
        for (v, m) in dx.data_mut().iter_mut().zip(mask) {
            *v *= m;
        }
        Ok(dx)
    }
}

/// Row-wise, numerically stabilized softmax over `[B, C]`.
#[derive(Debug, Clone, Default)]
pub struct Softmax {
    cache: Option<Tensor>,
}

impl Softmax {
    pub fn forward(&mut self, x: &Tensor, training: bool) -> Result<Tensor, NnError> {
        let (batch, classes) = x.dims2("softmax")?;
        let mut y = x.clone();
        let yd = y.data_mut();
        for b in 0..batch {
            let row = &mut yd[b * classes..(b + 1) * classes];
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for v in row.iter_mut() {
                *v = (*v - max).exp();
                sum += *v;
            }
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
        if training {
            self.cache = Some(y.clone());
        }
        Ok(y)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor, NnError> {
        let y = self.cache.take().ok_or_else(|| missing_cache("softmax"))?;
        let (batch, classes) = y.dims2("softmax")?;
        let mut dx = Tensor::zeros(&[batch, classes]);
        let yd = y.data();
        let gd = grad.data();
        let dxd = dx.data_mut();
        for b in 0..batch {
            let base = b * classes;
            let dot: f64 = (0..classes).map(|i| gd[base + i] * yd[base + i]).sum();
            for i in 0..classes {
                dxd[base + i] = yd[base + i] * (gd[base + i] - dot);
            }
        }
        Ok(dx)
    }
}
