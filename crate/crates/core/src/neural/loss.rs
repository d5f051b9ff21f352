//! Losses and the softmax activation.

/// Numerically stable softmax; invariant to adding a constant to all
/// logits, output sums to one.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Squared error of a scalar prediction.
pub fn loss_mse(pred: f64, target: f64) -> f64 {
    let e = pred - target;
    e * e
}

/// d loss_mse / d pred.
pub fn loss_mse_grad(pred: f64, target: f64) -> f64 {
    2.0 * (pred - target)
}

/// Mean squared error over a prediction vector, with the gradient with
/// respect to the predictions. Used by many-to-many heads.
pub fn loss_mse_vec(pred: &[f64], target: &[f64]) -> (f64, Vec<f64>) {
    debug_assert_eq!(pred.len(), target.len());
    let k = pred.len() as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(pred.len());
    for (p, t) in pred.iter().zip(target) {
        let e = p - t;
        loss += e * e / k;
        grad.push(2.0 * e / k);
    }
    (loss, grad)
}

const XENT_CLAMP: f64 = 1e-12;

/// Categorical cross entropy of a probability vector against a one-hot
/// target, with the target probability clamped at 1e-12.
pub fn loss_xent(probs: &[f64], target: usize) -> f64 {
    -probs[target].max(XENT_CLAMP).ln()
}

/// Gradient of the cross entropy with respect to the softmax logits:
/// probs - onehot(target).
pub fn loss_xent_logit_grad(probs: &[f64], target: usize) -> Vec<f64> {
    let mut grad = probs.to_vec();
    grad[target] -= 1.0;
    grad
}
