//! Categorical cross-entropy over softmax probabilities.

use super::tensor::Tensor;
use super::NnError;

/// Floor inside the log; keeps the loss finite if a probability underflows.
pub const CE_EPSILON: f64 = 1e-12;

/// Mean negative log-likelihood plus the gradient of the loss with respect
/// to the softmax *input* (the fused softmax + cross-entropy form
/// `(p - y) / batch`). `labels` is one-hot with the same shape as `probs`.
pub fn cross_entropy(probs: &Tensor, labels: &Tensor) -> Result<(f64, Tensor), NnError> {
    let (batch, classes) = probs.dims2("cross_entropy")?;
    if probs.shape() != labels.shape() {
        return Err(NnError::Shape {
            layer: "cross_entropy".to_string(),
            detail: format!("probs {:?} vs labels {:?}", probs.shape(), labels.shape()),
        });
    }
    let pd = probs.data();
    let ld = labels.data();
    let mut loss = 0.0f64;
    let mut grad = Tensor::zeros(&[batch, classes]);
    let gd = grad.data_mut();
    for b in 0..batch {
        for c in 0..classes {
            let idx = b * classes + c;
            if ld[idx] != 0.0 {
                loss -= ld[idx] * (pd[idx] + CE_EPSILON).ln();
            }
            gd[idx] = (pd[idx] - ld[idx]) / batch as f64;
        }
    }
    Ok((loss / batch as f64, grad))
}

/// One-hot encode labels into `[batch, classes]`.
pub fn one_hot(labels: &[usize], classes: usize) -> Tensor {
    let mut t = Tensor::zeros(&[labels.len(), classes]);
    for (b, &label) in labels.iter().enumerate() {
        debug_assert!(label < classes);
        t.data_mut()[b * classes + label] = 1.0;
    }
    t
}

/// Row argmax, lowest index on ties.
pub fn argmax_rows(probs: &Tensor) -> Result<Vec<usize>, NnError> {
    let (batch, classes) = probs.dims2("argmax")?;
    let pd = probs.data();
    Ok((0..batch)
        .map(|b| {
            let row = &pd[b * classes..(b + 1) * classes];
            let mut best = 0;
            for (i, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = i;
                }
            }
            best
        })
        .collect())
}
