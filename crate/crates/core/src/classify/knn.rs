//! K-nearest-neighbor classifier with inverse-distance vote weighting and
//! an exact-match rule: zero-distance neighbors take all the probability
//! mass, split equally among themselves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
    /// Training rows, stored in a canonical (lexicographic) order so the
    /// model is identical however the training set was ordered.
    pub train_x: Vec<Vec<f64>>,
    pub train_y: Vec<usize>,
    /// Per-class vote weights (all ones when class weighting is off).
    pub class_weights: Vec<f64>,
}

pub fn fit(
    x: &[Vec<f64>],
    y: &[usize],
    class_weights: &[f64],
    k: usize,
) -> Result<KnnParams> {
    if k > x.len() {
        return Err(Error::InvalidInput(format!(
            "k = {k} exceeds the {} training rows",
            x.len()
        )));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .unwrap()
            .then(y[a].cmp(&y[b]))
    });
    Ok(KnnParams {
        k,
        train_x: order.iter().map(|&i| x[i].clone()).collect(),
        train_y: order.iter().map(|&i| y[i]).collect(),
        class_weights: class_weights.to_vec(),
    })
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn predict_proba(params: &KnnParams, x: &[Vec<f64>], n_classes: usize) -> Vec<Vec<f64>> {
    x.iter()
        .map(|query| {
            // ties in distance resolve to the lower class index, then the
            // canonical row order, so neighbor sets are reproducible
            let mut candidates: Vec<(f64, usize)> = params
                .train_x
                .iter()
                .zip(&params.train_y)
                .map(|(row, &y)| (euclidean(query, row), y))
                .collect();
            candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let neighbors = &candidates[..params.k];

            let mut votes = vec![0.0; n_classes];
            let zero_matches: Vec<usize> = neighbors
                .iter()
                .filter(|(d, _)| *d == 0.0)
                .map(|&(_, y)| y)
                .collect();
            if !zero_matches.is_empty() {
                for &y in &zero_matches {
                    votes[y] += 1.0 / zero_matches.len() as f64;
                }
            } else {
                for &(d, y) in neighbors {
                    votes[y] += params.class_weights[y] / d;
                }
                let total: f64 = votes.iter().sum();
                for v in votes.iter_mut() {
                    *v /= total;
                }
            }
            votes
        })
        .collect()
}
