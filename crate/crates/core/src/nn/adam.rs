//! Adam optimizer with bias correction.

use super::Model;

/// In-place Adam update for one parameter tensor. `t` is the 1-based step.
#[allow(clippy::too_many_arguments)]
pub fn adam_update(
    param: &mut [f64],
    grad: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    t: u64,
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
) {
    debug_assert_eq!(param.len(), grad.len());
    let bc1 = 1.0 - beta1.powi(t as i32);
    let bc2 = 1.0 - beta2.powi(t as i32);
    for i in 0..param.len() {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        param[i] -= lr * m_hat / (v_hat.sqrt() + epsilon);
    }
}

/// Optimizer state for a whole model; moment vectors are laid out in the
/// model's parameter visitation order.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub t: u64,
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            t: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    /// One optimization step over every trainable tensor of the model.
    pub fn step(&mut self, model: &mut Model) {
        self.t += 1;
        let t = self.t;
        let (lr, b1, b2, eps) = (self.lr, self.beta1, self.beta2, self.epsilon);
        let (m, v) = (&mut self.m, &mut self.v);
        let mut idx = 0usize;
        model.visit_params(&mut |param: &mut [f64], grad: &[f64]| {
            if m.len() == idx {
                m.push(vec![0.0; param.len()]);
                v.push(vec![0.0; param.len()]);
            }
            adam_update(param, grad, &mut m[idx], &mut v[idx], t, lr, b1, b2, eps);
            idx += 1;
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr_times_sign() {
        let mut p = vec![0.0f64, 10.0];
        let g = vec![3.0f64, -0.25];
        let mut m = vec![0.0; 2];
        let mut v = vec![0.0; 2];
        adam_update(&mut p, &g, &mut m, &mut v, 1, 0.001, 0.9, 0.999, 1e-8);
        // With bias correction, step 1 is lr * g / (|g| + eps') ~ lr * sign(g).
        assert!((p[0] + 0.001).abs() < 1e-9, "p0 = {}", p[0]);
        assert!((p[1] - 10.001).abs() < 1e-9, "p1 = {}", p[1]);
    }

    #[test]
    fn zero_gradient_leaves_params_and_decays_moments() {
        let mut p = vec![1.5f64];
        let mut m = vec![0.4f64];
        let mut v = vec![0.2f64];
        adam_update(&mut p, &[0.0], &mut m, &mut v, 3, 0.01, 0.9, 0.999, 1e-8);
        assert!((m[0] - 0.36).abs() < 1e-15);
        assert!((v[0] - 0.1998).abs() < 1e-15);
        // The first moment is nonzero, so the parameter still moves; with a
        // truly zero optimizer state it would not.
        let mut p2 = vec![1.5f64];
        let mut m2 = vec![0.0f64];
        let mut v2 = vec![0.0f64];
        adam_update(&mut p2, &[0.0], &mut m2, &mut v2, 1, 0.01, 0.9, 0.999, 1e-8);
        assert_eq!(p2[0], 1.5);
    }

    #[test]
    fn two_steps_with_unit_gradient_match_the_hand_trace() {
        // With g = 1 throughout, bias correction cancels exactly:
        // m_hat = v_hat = 1, so theta moves by lr/(1 + eps) each step.
        let mut p = vec![0.0f64];
        let mut m = vec![0.0f64];
        let mut v = vec![0.0f64];
        adam_update(&mut p, &[1.0], &mut m, &mut v, 1, 0.001, 0.9, 0.999, 1e-8);
        assert!((p[0] - (-0.00099999999)).abs() < 1e-12, "{}", p[0]);
        assert!((m[0] - 0.1).abs() < 1e-15);
        assert!((v[0] - 0.001).abs() < 1e-15);
        adam_update(&mut p, &[1.0], &mut m, &mut v, 2, 0.001, 0.9, 0.999, 1e-8);
        assert!((p[0] - (-0.00199999998)).abs() < 1e-12, "{}", p[0]);
        assert!((m[0] - 0.19).abs() < 1e-15);
        assert!((v[0] - 0.001999).abs() < 1e-15);
    }
}
