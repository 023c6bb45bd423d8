//! CART decision trees with weighted Gini impurity, and bootstrap-bagged
//! random forests built from them.
//!
//! Split search is exhaustive over midpoints between consecutive distinct
//! feature values; ties in impurity decrease resolve to the lowest feature
//! index, then the lowest threshold, so trees are fully deterministic.
//! Forest trees get their own seeds derived from the master seed, which
//! makes training results independent of scheduling.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MaxFeatures;
use crate::seed::derive_seed;

/// One node of a flattened tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Class-weight proportions of the training rows in this leaf.
        probs: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub bootstrap: bool,
    pub max_features: MaxFeatures,
}

struct Grower<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    class_weights: &'a [f64],
    n_classes: usize,
    max_depth: Option<usize>,
    min_samples_split: usize,
    /// Features considered per split; when it equals the column count the
    /// RNG is never consulted.
    max_features: usize,
}

impl Grower<'_> {
    fn leaf(&self, rows: &[usize]) -> Node {
        let mut masses = vec![0.0; self.n_classes];
        for &i in rows {
            masses[self.y[i]] += self.class_weights[self.y[i]];
        }
        let total: f64 = masses.iter().sum();
        Node::Leaf {
            probs: masses.iter().map(|m| m / total).collect(),
        }
    }

    fn gini(masses: &[f64], total: f64) -> f64 {
        1.0 - masses.iter().map(|m| (m / total).powi(2)).sum::<f64>()
    }

    /// Best (impurity decrease, feature, threshold) over the candidate
    /// features, or None if no split separates the rows.
    fn best_split(&self, rows: &[usize], features: &[usize]) -> Option<(f64, usize, f64)> {
        let mut parent_masses = vec![0.0; self.n_classes];
        for &i in rows {
            parent_masses[self.y[i]] += self.class_weights[self.y[i]];
        }
        let total: f64 = parent_masses.iter().sum();
        let parent_gini = Self::gini(&parent_masses, total);

        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
        for &f in features {
            sorted.clear();
            sorted.extend(rows.iter().map(|&i| (self.x[i][f], self.y[i])));
            sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

            let mut left_masses = vec![0.0; self.n_classes];
            let mut left_total = 0.0;
            for w in 0..sorted.len() - 1 {
                let (value, class) = sorted[w];
                let weight = self.class_weights[class];
                left_masses[class] += weight;
                left_total += weight;
                let next = sorted[w + 1].0;
                if next == value {
                    continue;
                }
                let mut threshold = (value + next) / 2.0;
                if threshold >= next {
                    // adjacent floats can collapse the midpoint upward
                    threshold = value;
                }
                let right_masses: Vec<f64> = parent_masses
                    .iter()
                    .zip(&left_masses)
                    .map(|(p, l)| p - l)
                    .collect();
                let right_total = total - left_total;
                let weighted = (left_total * Self::gini(&left_masses, left_total)
                    + right_total * Self::gini(&right_masses, right_total))
                    / total;
                let gain = parent_gini - weighted;
                // strictly-greater keeps the first candidate on ties, and
                // features/thresholds are visited in ascending order
                if best.is_none_or(|(g, _, _)| gain > g + 1e-12) {
                    best = Some((gain, f, threshold));
                }
            }
        }
        // Gini decrease is never negative, and zero-gain splits are kept:
        // an impure node splits whenever any boundary exists (mixed-label
        // duplicate rows are the only unsplittable case)
        best
    }

    fn grow(
        &self,
        nodes: &mut Vec<Node>,
        rows: Vec<usize>,
        depth: usize,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        let d = self.x[0].len();
        let first_class = self.y[rows[0]];
        let pure = rows.iter().all(|&i| self.y[i] == first_class);
        let depth_reached = self.max_depth.is_some_and(|m| depth >= m);
        if pure || rows.len() < self.min_samples_split || depth_reached {
            nodes.push(self.leaf(&rows));
            return nodes.len() - 1;
        }

        let features: Vec<usize> = if self.max_features >= d {
            (0..d).collect()
        } else {
            let mut pool: Vec<usize> = (0..d).collect();
            let (chosen, _) = pool.partial_shuffle(rng, self.max_features);
            let mut chosen = chosen.to_vec();
            chosen.sort_unstable();
            chosen
        };

        let Some((_, feature, threshold)) = self.best_split(&rows, &features) else {
            nodes.push(self.leaf(&rows));
            return nodes.len() - 1;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.into_iter().partition(|&i| self.x[i][feature] <= threshold);
        debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());

        let slot = nodes.len();
        nodes.push(Node::Leaf { probs: Vec::new() }); // placeholder
        let left = self.grow(nodes, left_rows, depth + 1, rng);
        let right = self.grow(nodes, right_rows, depth + 1, rng);
        nodes[slot] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        slot
    }

    fn build(&self, rows: Vec<usize>, rng: &mut ChaCha8Rng) -> Tree {
        let mut nodes = Vec::new();
        self.grow(&mut nodes, rows, 0, rng);
        Tree { nodes }
    }
}

/// Grows a single CART tree on all rows with every feature in play.
pub fn fit_tree(
    x: &[Vec<f64>],
    y: &[usize],
    class_weights: &[f64],
    n_classes: usize,
    max_depth: Option<usize>,
    min_samples_split: usize,
) -> Tree {
    let grower = Grower {
        x,
        y,
        class_weights,
        n_classes,
        max_depth,
        min_samples_split,
        max_features: x[0].len(),
    };
    // with all features in play the RNG is never drawn from
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    grower.build((0..x.len()).collect(), &mut rng)
}

/// Grows a bagged forest; per-tree seeds come from the master seed, so the
/// result does not depend on how the parallel training is scheduled.
pub fn fit_forest(
    x: &[Vec<f64>],
    y: &[usize],
    class_weights: &[f64],
    n_classes: usize,
    params: ForestParams,
    seed: u64,
) -> Vec<Tree> {
    let d = x[0].len();
    let max_features = match params.max_features {
        MaxFeatures::Sqrt => (d as f64).sqrt().ceil() as usize,
        MaxFeatures::All => d,
        MaxFeatures::Fixed(m) => m.min(d),
    };
    let grower = Grower {
        x,
        y,
        class_weights,
        n_classes,
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        max_features,
    };
    (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t as u64));
            let rows: Vec<usize> = if params.bootstrap {
                (0..x.len()).map(|_| rng.random_range(0..x.len())).collect()
            } else {
                (0..x.len()).collect()
            };
            grower.build(rows, &mut rng)
        })
        .collect()
}

/// Class probabilities at the leaf a row lands in.
pub fn tree_proba(tree: &Tree, row: &[f64]) -> Vec<f64> {
    let mut node = 0;
    loop {
        match &tree.nodes[node] {
            Node::Leaf { probs } => return probs.clone(),
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                node = if row[*feature] <= *threshold {
                    *left
                } else {
                    *right
                };
            }
        }
    }
}

/// Mean of the per-tree probability rows.
pub fn forest_proba(trees: &[Tree], row: &[f64], n_classes: usize) -> Vec<f64> {
    let mut acc = vec![0.0; n_classes];
    for tree in trees {
        for (a, p) in acc.iter_mut().zip(tree_proba(tree, row)) {
            *a += p;
        }
    }
    for a in acc.iter_mut() {
        *a /= trees.len() as f64;
    }
    acc
}
