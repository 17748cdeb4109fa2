//! LSTM layer returning the full hidden sequence, with backpropagation
//! through time.

use rand_chacha::ChaCha8Rng;

use super::layers::glorot_uniform;
use super::tensor::Tensor;
use super::NnError;

/// Gate order in the stacked weight matrices: input, forget, cell, output.
const GATES: usize = 4;

/// `[B, T, in] -> [B, T, hidden]`. Initial hidden and cell states are zero;
/// the forget-gate bias initializes to 1.0.
#[derive(Debug, Clone)]
pub struct Lstm {
    pub input_size: usize,
    pub hidden: usize,
    /// Input weights `[4h, in]`, gates stacked i, f, g, o.
    pub w: Vec<f64>,
    /// Recurrent weights `[4h, h]`.
    pub u: Vec<f64>,
    /// Bias `[4h]`.
    pub b: Vec<f64>,
    pub grad_w: Vec<f64>,
    pub grad_u: Vec<f64>,
    pub grad_b: Vec<f64>,
    cache: Option<LstmCache>,
}

#[derive(Debug, Clone)]
struct LstmCache {
    x: Tensor,
    /// Hidden states `[T+1]` of `B*h`, index 0 is the zero initial state.
    hs: Vec<Vec<f64>>,
    /// Cell states, same layout.
    cs: Vec<Vec<f64>>,
    /// Per-step activated gates, each `[T]` of `B*h`.
    gi: Vec<Vec<f64>>,
    gf: Vec<Vec<f64>>,
    gg: Vec<Vec<f64>>,
    go: Vec<Vec<f64>>,
    tanh_c: Vec<Vec<f64>>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl Lstm {
    pub fn new(input_size: usize, hidden: usize, rng: &mut ChaCha8Rng) -> Self {
        let w = glorot_uniform(rng, input_size, hidden, GATES * hidden * input_size);
        let u = glorot_uniform(rng, hidden, hidden, GATES * hidden * hidden);
        let mut b = vec![0.0; GATES * hidden];
        for v in &mut b[hidden..2 * hidden] {
            *v = 1.0;
        }
        Lstm {
            input_size,
            hidden,
            w,
            u,
            b,
            grad_w: vec![0.0; GATES * hidden * input_size],
            grad_u: vec![0.0; GATES * hidden * hidden],
            grad_b: vec![0.0; GATES * hidden],
            cache: None,
        }
    }

    pub fn forward(&mut self, x: &Tensor, training: bool) -> Result<Tensor, NnError> {
        let (batch, time, inputs) = x.dims3("lstm")?;
        if inputs != self.input_size {
            return Err(NnError::Shape {
                layer: "lstm".to_string(),
                detail: format!("input width {inputs}, layer expects {}", self.input_size),
            });
        }
        let h = self.hidden;
        let xd = x.data();
        let mut hs = vec![vec![0.0f64; batch * h]];
        let mut cs = vec![vec![0.0f64; batch * h]];
        let (mut gi, mut gf, mut gg, mut go, mut tanh_c) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        let mut y = Tensor::zeros(&[batch, time, h]);
        let yd = y.data_mut();

        let mut pre = vec![0.0f64; GATES * h];
        for t in 0..time {
            let h_prev = hs.last().unwrap().clone();
            let c_prev = cs.last().unwrap().clone();
            let mut h_t = vec![0.0f64; batch * h];
            let mut c_t = vec![0.0f64; batch * h];
            let (mut i_t, mut f_t, mut g_t, mut o_t, mut tc_t) = (
                vec![0.0f64; batch * h],
                vec![0.0f64; batch * h],
                vec![0.0f64; batch * h],
                vec![0.0f64; batch * h],
                vec![0.0f64; batch * h],
            );
            for bi in 0..batch {
                let xr = &xd[(bi * time + t) * inputs..(bi * time + t + 1) * inputs];
                let hr = &h_prev[bi * h..(bi + 1) * h];
                for (row, p) in pre.iter_mut().enumerate() {
                    let wr = &self.w[row * inputs..(row + 1) * inputs];
                    let ur = &self.u[row * h..(row + 1) * h];
                    *p = self.b[row]
                        + xr.iter().zip(wr).map(|(a, w)| a * w).sum::<f64>()
                        + hr.iter().zip(ur).map(|(a, u)| a * u).sum::<f64>();
                }
                for j in 0..h {
                    let i_g = sigmoid(pre[j]);
                    let f_g = sigmoid(pre[h + j]);
                    let g_g = pre[2 * h + j].tanh();
                    let o_g = sigmoid(pre[3 * h + j]);
                    let c = f_g * c_prev[bi * h + j] + i_g * g_g;
                    let tc = c.tanh();
                    let hv = o_g * tc;
                    let idx = bi * h + j;
                    i_t[idx] = i_g;
                    f_t[idx] = f_g;
                    g_t[idx] = g_g;
                    o_t[idx] = o_g;
                    c_t[idx] = c;
                    tc_t[idx] = tc;
                    h_t[idx] = hv;
                    yd[(bi * time + t) * h + j] = hv;
                }
            }
            hs.push(h_t);
            cs.push(c_t);
            gi.push(i_t);
            gf.push(f_t);
            gg.push(g_t);
            go.push(o_t);
            tanh_c.push(tc_t);
        }
        if training {
            self.cache = Some(LstmCache {
                x: x.clone(),
                hs,
                cs,
                gi,
                gf,
                gg,
                go,
                tanh_c,
            });
        }
        Ok(y)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor, NnError> {
        let cache = self.cache.take().ok_or(NnError::MissingCache("lstm"))?;
        let (batch, time, inputs) = cache.x.dims3("lstm")?;
        let h = self.hidden;
        let gd = grad.data();
        let xd = cache.x.data();
        let mut dx = Tensor::zeros(&[batch, time, inputs]);
        let dxd = dx.data_mut();
        let mut dh_next = vec![0.0f64; batch * h];
        let mut dc_next = vec![0.0f64; batch * h];
        let mut dgates = vec![0.0f64; GATES * h];
        for t in (0..time).rev() {
            let c_prev = &cache.cs[t];
            let h_prev = &cache.hs[t];
            let mut dh_prev = vec![0.0f64; batch * h];
            let mut dc_prev = vec![0.0f64; batch * h];
            for bi in 0..batch {
                for j in 0..h {
                    let idx = bi * h + j;
                    let dh = gd[(bi * time + t) * h + j] + dh_next[idx];
                    let i_g = cache.gi[t][idx];
                    let f_g = cache.gf[t][idx];
                    let g_g = cache.gg[t][idx];
                    let o_g = cache.go[t][idx];
                    let tc = cache.tanh_c[t][idx];
                    let dtc = dh * o_g * (1.0 - tc * tc) + dc_next[idx];
                    let d_o = dh * tc;
                    let d_i = dtc * g_g;
                    let d_f = dtc * c_prev[idx];
                    let d_g = dtc * i_g;
                    dgates[j] = d_i * i_g * (1.0 - i_g);
                    dgates[h + j] = d_f * f_g * (1.0 - f_g);
                    dgates[2 * h + j] = d_g * (1.0 - g_g * g_g);
                    dgates[3 * h + j] = d_o * o_g * (1.0 - o_g);
                    dc_prev[idx] = dtc * f_g;
                }
                let xr = &xd[(bi * time + t) * inputs..(bi * time + t + 1) * inputs];
                let hr = &h_prev[bi * h..(bi + 1) * h];
                for (row, &dg) in dgates.iter().enumerate() {
                    if dg == 0.0 {
                        continue;
                    }
                    self.grad_b[row] += dg;
                    let wr = row * inputs;
                    for (i, &xv) in xr.iter().enumerate() {
                        self.grad_w[wr + i] += dg * xv;
                        dxd[(bi * time + t) * inputs + i] += dg * self.w[wr + i];
                    }
                    let ur = row * h;
                    for (j2, &hv) in hr.iter().enumerate() {
                        self.grad_u[ur + j2] += dg * hv;
                        dh_prev[bi * h + j2] += dg * self.u[ur + j2];
                    }
                }
            }
            dh_next = dh_prev;
            dc_next = dc_prev;
        }
        Ok(dx)
    }

    /// `4 * (h * (in + h) + h)` trainable parameters.
    pub fn parameter_count(&self) -> usize {
        GATES * (self.hidden * (self.input_size + self.hidden) + self.hidden)
    }
}
