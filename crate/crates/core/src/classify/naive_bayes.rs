//! Gaussian naive Bayes with per-class feature means/variances and
//! variance smoothing proportional to the largest overall feature variance.

use serde::{Deserialize, Serialize};

use super::softmax;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbParams {
    pub log_priors: Vec<f64>,
    /// K×d per-class feature means.
    pub means: Vec<Vec<f64>>,
    /// K×d per-class feature variances, already smoothed.
    pub variances: Vec<Vec<f64>>,
}

/// Smoothing factor applied to the largest overall feature variance.
pub const VAR_SMOOTHING: f64 = 1e-9;

/// Sums values in ascending order, which makes the statistics exactly
/// independent of the training row order.
fn canonical_sum(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.iter().sum()
}

fn column_stats(values: &mut Vec<f64>) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = canonical_sum(values) / n;
    let mut sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = canonical_sum(&mut sq) / n;
    (mean, var)
}

pub fn fit(x: &[Vec<f64>], y: &[usize], class_weights: &[f64], n_classes: usize) -> GnbParams {
    let d = x[0].len();

    // class weights are constant within a class, so weighted means and
    // variances reduce to the plain per-class statistics; only the priors
    // feel the weighting
    let mut means = vec![vec![0.0; d]; n_classes];
    let mut variances = vec![vec![0.0; d]; n_classes];
    let mut counts = vec![0usize; n_classes];
    for k in 0..n_classes {
        let members: Vec<usize> = (0..x.len()).filter(|&i| y[i] == k).collect();
        counts[k] = members.len();
        for j in 0..d {
            let mut values: Vec<f64> = members.iter().map(|&i| x[i][j]).collect();
            let (mean, var) = column_stats(&mut values);
            means[k][j] = mean;
            variances[k][j] = var;
        }
    }

    let max_overall_var = (0..d)
        .map(|j| {
            let mut values: Vec<f64> = x.iter().map(|row| row[j]).collect();
            column_stats(&mut values).1
        })
        .fold(0.0f64, f64::max);
    let epsilon = (VAR_SMOOTHING * max_overall_var).max(1e-12);
    for row in variances.iter_mut() {
        for v in row.iter_mut() {
            *v += epsilon;
        }
    }

    let total_w: f64 = (0..n_classes).map(|k| class_weights[k] * counts[k] as f64).sum();
    let log_priors = (0..n_classes)
        .map(|k| (class_weights[k] * counts[k] as f64 / total_w).ln())
        .collect();

    GnbParams {
        log_priors,
        means,
        variances,
    }
}

pub fn predict_proba(params: &GnbParams, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    use std::f64::consts::TAU;
    x.iter()
        .map(|row| {
            let mut scores: Vec<f64> = params
                .log_priors
                .iter()
                .zip(&params.means)
                .zip(&params.variances)
                .map(|((lp, means), vars)| {
                    lp + row
                        .iter()
                        .zip(means)
                        .zip(vars)
                        .map(|((xj, mj), vj)| {
                            -0.5 * (TAU * vj).ln() - (xj - mj) * (xj - mj) / (2.0 * vj)
                        })
                        .sum::<f64>()
                })
                .collect();
            softmax(&mut scores);
            scores
        })
        .collect()
}
