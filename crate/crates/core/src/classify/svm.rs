//! Linear support-vector classifier: one-vs-rest weighted hinge loss
//! minimized by full-batch subgradient descent. Probabilities are a
//! softmax over the decision values — a convenience calibration, not a
//! fitted one.

use super::logistic::{canonical_batch, LinearParams};

/// Weighted mean hinge loss of one binary one-vs-rest problem and its
/// subgradient.
fn hinge_subgrad(
    w: &[f64],
    b: f64,
    x: &[Vec<f64>],
    targets: &[f64],
    sample_weights: &[f64],
) -> (f64, Vec<f64>, f64) {
    let d = w.len();
    let total_w: f64 = sample_weights.iter().sum();
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; d];
    let mut grad_b = 0.0;
    for ((row, &t), &wi) in x.iter().zip(targets).zip(sample_weights) {
        let score: f64 = w.iter().zip(row).map(|(wj, xj)| wj * xj).sum::<f64>() + b;
        let margin = t * score;
        if margin < 1.0 {
            loss += wi * (1.0 - margin);
            for (g, xj) in grad_w.iter_mut().zip(row) {
                *g -= wi * t * xj;
            }
            grad_b -= wi * t;
        }
    }
    loss /= total_w;
    for g in grad_w.iter_mut() {
        *g /= total_w;
    }
    grad_b /= total_w;
    (loss, grad_w, grad_b)
}

pub fn fit(
    x: &[Vec<f64>],
    y: &[usize],
    sample_weights: &[f64],
    n_classes: usize,
    seed: u64,
    learning_rate: f64,
    epochs: usize,
) -> LinearParams {
    let (x, y, sample_weights) = canonical_batch(x, y, sample_weights);
    let mut params = LinearParams::seeded_init(x[0].len(), n_classes, seed);
    for k in 0..n_classes {
        let targets: Vec<f64> = y.iter().map(|&yi| if yi == k { 1.0 } else { -1.0 }).collect();
        for _ in 0..epochs {
            let (_, grad_w, grad_b) =
                hinge_subgrad(&params.weights[k], params.bias[k], &x, &targets, &sample_weights);
            for (w, g) in params.weights[k].iter_mut().zip(&grad_w) {
                *w -= learning_rate * g;
            }
            params.bias[k] -= learning_rate * grad_b;
        }
    }
    params
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::logistic::predict_proba;

    fn blobs() -> (Vec<Vec<f64>>, Vec<usize>, Vec<f64>) {
        let x = vec![
            vec![0.0, 0.0],
            vec![0.3, -0.2],
            vec![-0.2, 0.3],
            vec![4.0, 4.0],
            vec![4.3, 3.8],
            vec![3.8, 4.2],
            vec![-4.0, 4.0],
            vec![-4.2, 3.9],
            vec![-3.9, 4.3],
        ];
        let y = vec![0, 0, 0, 1, 1, 1, 2, 2, 2];
        (x, y, vec![1.0; 9])
    }

    #[test]
    fn separates_three_blobs() {
        let (x, y, w) = blobs();
        let params = fit(&x, &y, &w, 3, 0, 0.1, 500);
        let probs = predict_proba(&params, &x);
        for (row, &yi) in probs.iter().zip(&y) {
            assert_eq!(crate::classify::argmax(row), yi);
        }
    }

    #[test]
    fn descent_reduces_the_hinge_loss() {
        let (x, y, w) = blobs();
        let targets: Vec<f64> = y.iter().map(|&yi| if yi == 0 { 1.0 } else { -1.0 }).collect();
        let start = LinearParams::seeded_init(2, 3, 3);
        let (initial, _, _) = hinge_subgrad(&start.weights[0], start.bias[0], &x, &targets, &w);
        let params = fit(&x, &y, &w, 3, 3, 0.1, 300);
        let (trained, _, _) =
            hinge_subgrad(&params.weights[0], params.bias[0], &x, &targets, &w);
        assert!(trained < initial, "{trained} < {initial}");
    }

    #[test]
    fn training_is_seeded_and_deterministic() {
        let (x, y, w) = blobs();
        let a = fit(&x, &y, &w, 3, 11, 0.1, 100);
        let b = fit(&x, &y, &w, 3, 11, 0.1, 100);
        assert_eq!(a, b);
    }
}
