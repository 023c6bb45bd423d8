//! Multinomial logistic classifier trained by full-batch gradient descent
//! on the class-weighted cross-entropy, with seeded initialization.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::softmax;

/// A linear score model: `scores = W·x + b`, one row per class. Shared by
/// the logistic classifier (softmax training) and the linear SVM
/// (one-vs-rest hinge training).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    /// K×d weight matrix.
    pub weights: Vec<Vec<f64>>,
    /// K intercepts.
    pub bias: Vec<f64>,
}

impl LinearParams {
    /// Small seeded Gaussian initialization; biases start at zero.
    pub(super) fn seeded_init(d: usize, n_classes: usize, seed: u64) -> LinearParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = (0..n_classes)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        0.01 * z
                    })
                    .collect()
            })
            .collect();
        LinearParams {
            weights,
            bias: vec![0.0; n_classes],
        }
    }

    pub(super) fn scores(&self, row: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| w.iter().zip(row).map(|(wi, xi)| wi * xi).sum::<f64>() + b)
            .collect()
    }
}

/// Copies of the training set in a canonical (lexicographic-row) order, so
/// the batch-gradient accumulation below sums in the same float order no
/// matter how the caller arranged the rows.
pub(super) fn canonical_batch(
    x: &[Vec<f64>],
    y: &[usize],
    sample_weights: &[f64],
) -> (Vec<Vec<f64>>, Vec<usize>, Vec<f64>) {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap().then(y[a].cmp(&y[b])));
    (
        order.iter().map(|&i| x[i].clone()).collect(),
        order.iter().map(|&i| y[i]).collect(),
        order.iter().map(|&i| sample_weights[i]).collect(),
    )
}

/// Weighted mean cross-entropy of the softmax model and its analytic
/// gradient with respect to the weights and biases.
///
/// Exposed so the gradient can be checked against finite differences.
pub fn loss_grad(
    params: &LinearParams,
    x: &[Vec<f64>],
    y: &[usize],
    sample_weights: &[f64],
) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
    let n_classes = params.bias.len();
    let d = params.weights[0].len();
    let total_w: f64 = sample_weights.iter().sum();

    let mut loss = 0.0;
    let mut grad_w = vec![vec![0.0; d]; n_classes];
    let mut grad_b = vec![0.0; n_classes];
    for ((row, &yi), &wi) in x.iter().zip(y).zip(sample_weights) {
        let scores = params.scores(row);
        // log-sum-exp for a numerically stable log-probability
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max
            + scores
                .iter()
                .map(|s| (s - max).exp())
                .sum::<f64>()
                .ln();
        loss -= wi * (scores[yi] - lse);
        for k in 0..n_classes {
            let p = (scores[k] - lse).exp();
            let coef = wi * (p - if k == yi { 1.0 } else { 0.0 });
            for (g, xj) in grad_w[k].iter_mut().zip(row) {
                *g += coef * xj;
            }
            grad_b[k] += coef;
        }
    }
    loss /= total_w;
    for row in grad_w.iter_mut() {
        for g in row.iter_mut() {
            *g /= total_w;
        }
    }
    for g in grad_b.iter_mut() {
        *g /= total_w;
    }
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
    for _ in 0..epochs {
        let (_, grad_w, grad_b) = loss_grad(&params, &x, &y, &sample_weights);
        for (w_row, g_row) in params.weights.iter_mut().zip(&grad_w) {
            for (w, g) in w_row.iter_mut().zip(g_row) {
                *w -= learning_rate * g;
            }
        }
        for (b, g) in params.bias.iter_mut().zip(&grad_b) {
            *b -= learning_rate * g;
        }
    }
    params
}

pub fn predict_proba(params: &LinearParams, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|row| {
            let mut scores = params.scores(row);
            softmax(&mut scores);
            scores
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn toy_problem() -> (Vec<Vec<f64>>, Vec<usize>, Vec<f64>) {
        // two well-separated 2-D blobs and a third offset blob
        let x = vec![
            vec![0.0, 0.1],
            vec![0.2, -0.1],
            vec![-0.1, 0.0],
            vec![3.0, 3.1],
            vec![2.9, 2.8],
            vec![3.2, 3.0],
            vec![-3.0, 3.0],
            vec![-2.8, 3.2],
            vec![-3.1, 2.9],
        ];
        let y = vec![0, 0, 0, 1, 1, 1, 2, 2, 2];
        let w = vec![1.0; 9];
        (x, y, w)
    }

    #[test]
    fn learns_separable_blobs() {
        let (x, y, w) = toy_problem();
        let params = fit(&x, &y, &w, 3, 0, 0.5, 800);
        let probs = predict_proba(&params, &x);
        for (row, &yi) in probs.iter().zip(&y) {
            assert_eq!(super::super::argmax(row), yi);
            assert!(row[yi] > 0.8, "confident on its own blob: {row:?}");
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (x, y, _) = toy_problem();
        let w = vec![0.5, 1.0, 1.5, 0.5, 1.0, 1.5, 0.5, 1.0, 1.5];
        let params = LinearParams::seeded_init(2, 3, 42);
        let (_, grad_w, grad_b) = loss_grad(&params, &x, &y, &w);

        let h = 1e-6;
        let loss_at = |p: &LinearParams| loss_grad(p, &x, &y, &w).0;
        for k in 0..3 {
            for j in 0..2 {
                let mut plus = params.clone();
                plus.weights[k][j] += h;
                let mut minus = params.clone();
                minus.weights[k][j] -= h;
                let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * h);
                assert_relative_eq!(grad_w[k][j], numeric, max_relative = 1e-5, epsilon = 1e-9);
            }
            let mut plus = params.clone();
            plus.bias[k] += h;
            let mut minus = params.clone();
            minus.bias[k] -= h;
            let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * h);
            assert_relative_eq!(grad_b[k], numeric, max_relative = 1e-5, epsilon = 1e-9);
        }
    }

    #[test]
    fn descent_reduces_the_loss() {
        let (x, y, w) = toy_problem();
        let start = LinearParams::seeded_init(2, 3, 7);
        let (initial, _, _) = loss_grad(&start, &x, &y, &w);
        let params = fit(&x, &y, &w, 3, 7, 0.1, 200);
        let (trained, _, _) = loss_grad(&params, &x, &y, &w);
        assert!(trained < initial, "{trained} < {initial}");
    }

    #[test]
    fn initialization_is_seeded() {
        let a = LinearParams::seeded_init(4, 3, 1);
        let b = LinearParams::seeded_init(4, 3, 1);
        let c = LinearParams::seeded_init(4, 3, 2);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
