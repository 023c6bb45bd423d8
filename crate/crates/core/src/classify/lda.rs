//! Linear discriminant analysis solved through an eigendecomposition of
//! the pooled within-class scatter (its SVD, since the scatter is symmetric
//! positive semi-definite) — the scatter matrix is whitened, never
//! explicitly inverted.
//!
//! Activity indicator columns always sum to 1, so one-hot encoded matrices
//! carry a structural null direction in the scatter. That direction holds
//! no between-class information (class means obey the same identity) and is
//! dropped from the whitening. A null direction dominated by a *numeric*
//! column, by contrast, means the data itself is degenerate and fitting
//! fails, naming the offending columns.

use serde::{Deserialize, Serialize};

use super::linalg::symmetric_eigen;
use super::softmax;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    /// K×d class means.
    pub class_means: Vec<Vec<f64>>,
    /// K log-priors.
    pub log_priors: Vec<f64>,
    /// r×d whitening transform (r = scatter rank): rows are eigenvectors of
    /// the pooled within-class scatter scaled by 1/√λ, so ‖W(x−μ)‖² is the
    /// Mahalanobis distance in the non-degenerate subspace.
    pub whitening: Vec<Vec<f64>>,
}

/// Indices of class members in a canonical (lexicographic-row) order, so
/// every accumulation below is independent of the training row order.
fn canonical_class_rows(x: &[Vec<f64>], y: &[usize], class: usize) -> Vec<usize> {
    let mut rows: Vec<usize> = (0..x.len()).filter(|&i| y[i] == class).collect();
    rows.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    rows
}

pub fn fit(
    x: &[Vec<f64>],
    y: &[usize],
    class_weights: &[f64],
    n_classes: usize,
    column_names: &[String],
    one_hot_columns: usize,
) -> Result<LdaParams> {
    let d = x[0].len();

    let mut class_means = Vec::with_capacity(n_classes);
    let mut class_sizes = Vec::with_capacity(n_classes);
    for k in 0..n_classes {
        let rows = canonical_class_rows(x, y, k);
        let mut mean = vec![0.0; d];
        for &i in &rows {
            for (m, v) in mean.iter_mut().zip(&x[i]) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= rows.len() as f64;
        }
        class_sizes.push(rows.len());
        class_means.push(mean);
    }

    // pooled within-class scatter, weighted per class
    let total_w: f64 = (0..n_classes)
        .map(|k| class_weights[k] * class_sizes[k] as f64)
        .sum();
    let mut scatter = vec![vec![0.0; d]; d];
    for k in 0..n_classes {
        let w = class_weights[k];
        for &i in &canonical_class_rows(x, y, k) {
            let dev: Vec<f64> = x[i]
                .iter()
                .zip(&class_means[k])
                .map(|(v, m)| v - m)
                .collect();
            for a in 0..d {
                for b in 0..d {
                    scatter[a][b] += w * dev[a] * dev[b];
                }
            }
        }
    }
    for row in scatter.iter_mut() {
        for s in row.iter_mut() {
            *s /= total_w;
        }
    }

    let (eigenvalues, eigenvectors) = symmetric_eigen(&scatter);
    let tol = eigenvalues[0].max(0.0) * 1e-10;
    let mut kept = Vec::new();
    let mut offending: Vec<String> = Vec::new();
    for j in 0..d {
        if eigenvalues[j] > tol {
            kept.push(j);
            continue;
        }
        // name the column that dominates this null direction
        let v = &eigenvectors[j];
        let worst = super::argmax(&v.iter().map(|c| c.abs()).collect::<Vec<_>>());
        if worst >= one_hot_columns {
            offending.push(column_names[worst].clone());
        }
        // null directions inside the one-hot block are the structural
        // dummy-coding dependence and are silently dropped
    }
    if !offending.is_empty() {
        offending.sort();
        offending.dedup();
        return Err(Error::SingularScatter { columns: offending });
    }
    if kept.is_empty() {
        return Err(Error::SingularScatter {
            columns: column_names.to_vec(),
        });
    }

    let whitening: Vec<Vec<f64>> = kept
        .iter()
        .map(|&j| {
            let scale = 1.0 / eigenvalues[j].sqrt();
            eigenvectors[j].iter().map(|v| v * scale).collect()
        })
        .collect();

    let log_priors: Vec<f64> = (0..n_classes)
        .map(|k| (class_weights[k] * class_sizes[k] as f64 / total_w).ln())
        .collect();

    Ok(LdaParams {
        class_means,
        log_priors,
        whitening,
    })
}

pub fn predict_proba(params: &LdaParams, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|row| {
            let mut scores: Vec<f64> = params
                .class_means
                .iter()
                .zip(&params.log_priors)
                .map(|(mean, log_prior)| {
                    let mahalanobis_sq: f64 = params
                        .whitening
                        .iter()
                        .map(|w| {
                            w.iter()
                                .zip(row)
                                .zip(mean)
                                .map(|((wi, xi), mi)| wi * (xi - mi))
                                .sum::<f64>()
                                .powi(2)
                        })
                        .sum();
                    log_prior - 0.5 * mahalanobis_sq
                })
                .collect();
            softmax(&mut scores);
            scores
        })
        .collect()
}
