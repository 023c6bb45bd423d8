//! Seven small classifiers behind one fit/predict/predict-probabilities
//! interface.
//!
//! Everything is implemented here directly — no external learning
//! libraries — so that the exact algorithmic choices (class weighting,
//! tie-breaking, seeding) are pinned down and reproducible. All methods
//! share the same [`ClassifierSpec`] shell: a master seed, an
//! inverse-frequency class-weighting switch, and method-specific
//! hyperparameters. Trained models serialize to a versioned JSON document
//! and predict identically after a round-trip.

pub mod knn;
pub mod lda;
pub mod linalg;
pub mod logistic;
pub mod naive_bayes;
pub mod svm;
pub mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{FeatureMatrix, LoadClass};
use crate::error::{Error, Result};

/// Version stamp of the persisted model document.
pub const FORMAT_VERSION: u32 = 1;

/// The classifier roster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Logistic,
    Lda,
    Knn,
    DecisionTree,
    RandomForest,
    GaussianNb,
    LinearSvm,
}

impl MethodKind {
    pub const ALL: [MethodKind; 7] = [
        MethodKind::Logistic,
        MethodKind::Lda,
        MethodKind::Knn,
        MethodKind::DecisionTree,
        MethodKind::RandomForest,
        MethodKind::GaussianNb,
        MethodKind::LinearSvm,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MethodKind::Logistic => "logistic",
            MethodKind::Lda => "lda",
            MethodKind::Knn => "knn",
            MethodKind::DecisionTree => "decision_tree",
            MethodKind::RandomForest => "random_forest",
            MethodKind::GaussianNb => "gaussian_nb",
            MethodKind::LinearSvm => "linear_svm",
        }
    }

    /// Short label for report tables.
    pub fn abbrev(self) -> &'static str {
        match self {
            MethodKind::Logistic => "LR",
            MethodKind::Lda => "LDA",
            MethodKind::Knn => "KNN",
            MethodKind::DecisionTree => "DT",
            MethodKind::RandomForest => "RF",
            MethodKind::GaussianNb => "NB",
            MethodKind::LinearSvm => "SVM",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        // "gnb" is common shorthand alongside the table abbreviation "nb"
        if s.eq_ignore_ascii_case("gnb") {
            return Ok(MethodKind::GaussianNb);
        }
        MethodKind::ALL
            .into_iter()
            .find(|m| m.id() == s || m.abbrev().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown method {s:?}; expected one of {}",
                    MethodKind::ALL.map(|m| m.id()).join(", ")
                ))
            })
    }
}

/// How many candidate features a forest considers per split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// ⌈√d⌉ features, the forest default.
    Sqrt,
    /// Every feature — with one tree and no bootstrap this reproduces the
    /// plain decision tree exactly.
    All,
    Fixed(usize),
}

/// Method choice plus its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum MethodSpec {
    Logistic {
        learning_rate: f64,
        epochs: usize,
    },
    Lda,
    Knn {
        k: usize,
    },
    DecisionTree {
        max_depth: Option<usize>,
        min_samples_split: usize,
    },
    RandomForest {
        n_trees: usize,
        max_depth: Option<usize>,
        min_samples_split: usize,
        bootstrap: bool,
        max_features: MaxFeatures,
    },
    GaussianNb,
    LinearSvm {
        learning_rate: f64,
        epochs: usize,
    },
}

impl MethodSpec {
    pub fn kind(&self) -> MethodKind {
        match self {
            MethodSpec::Logistic { .. } => MethodKind::Logistic,
            MethodSpec::Lda => MethodKind::Lda,
            MethodSpec::Knn { .. } => MethodKind::Knn,
            MethodSpec::DecisionTree { .. } => MethodKind::DecisionTree,
            MethodSpec::RandomForest { .. } => MethodKind::RandomForest,
            MethodSpec::GaussianNb => MethodKind::GaussianNb,
            MethodSpec::LinearSvm { .. } => MethodKind::LinearSvm,
        }
    }
}

/// Full training recipe: method, seed, and the class-weighting switch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub seed: u64,
    pub use_class_weights: bool,
    pub method: MethodSpec,
}

impl ClassifierSpec {
    /// Conventional defaults per method. Inverse-frequency class weighting
    /// is on for the logistic, tree, and forest classifiers and off
    /// elsewhere.
    pub fn defaults(kind: MethodKind, seed: u64) -> ClassifierSpec {
        let method = match kind {
            MethodKind::Logistic => MethodSpec::Logistic {
                learning_rate: 0.1,
                epochs: 500,
            },
            MethodKind::Lda => MethodSpec::Lda,
            MethodKind::Knn => MethodSpec::Knn { k: 5 },
            MethodKind::DecisionTree => MethodSpec::DecisionTree {
                max_depth: None,
                min_samples_split: 2,
            },
            MethodKind::RandomForest => MethodSpec::RandomForest {
                n_trees: 100,
                max_depth: None,
                min_samples_split: 2,
                bootstrap: true,
                max_features: MaxFeatures::Sqrt,
            },
            MethodKind::GaussianNb => MethodSpec::GaussianNb,
            MethodKind::LinearSvm => MethodSpec::LinearSvm {
                learning_rate: 0.1,
                epochs: 500,
            },
        };
        let use_class_weights = matches!(
            kind,
            MethodKind::Logistic | MethodKind::DecisionTree | MethodKind::RandomForest
        );
        ClassifierSpec {
            seed,
            use_class_weights,
            method,
        }
    }

    pub fn kind(&self) -> MethodKind {
        self.method.kind()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        let check_rate = |rate: f64, epochs: usize| -> Result<()> {
            if !rate.is_finite() || rate <= 0.0 {
                return bad(format!("learning rate must be positive, got {rate}"));
            }
            if epochs == 0 {
                return bad("epoch count must be at least 1".into());
            }
            Ok(())
        };
        match &self.method {
            MethodSpec::Logistic {
                learning_rate,
                epochs,
            }
            | MethodSpec::LinearSvm {
                learning_rate,
                epochs,
            } => check_rate(*learning_rate, *epochs),
            MethodSpec::Lda | MethodSpec::GaussianNb => Ok(()),
            MethodSpec::Knn { k } => {
                if *k == 0 {
                    return bad("k must be at least 1".into());
                }
                Ok(())
            }
            MethodSpec::DecisionTree {
                max_depth,
                min_samples_split,
            } => check_tree(*max_depth, *min_samples_split),
            MethodSpec::RandomForest {
                n_trees,
                max_depth,
                min_samples_split,
                max_features,
                ..
            } => {
                if *n_trees == 0 {
                    return bad("a forest needs at least 1 tree".into());
                }
                if let MaxFeatures::Fixed(0) = max_features {
                    return bad("per-split feature count must be at least 1".into());
                }
                check_tree(*max_depth, *min_samples_split)
            }
        }
    }
}

fn check_tree(max_depth: Option<usize>, min_samples_split: usize) -> Result<()> {
    if let Some(0) = max_depth {
        return Err(Error::InvalidInput(
            "max depth must be at least 1 (or unlimited)".into(),
        ));
    }
    if min_samples_split < 2 {
        return Err(Error::InvalidInput(
            "min samples to split must be at least 2".into(),
        ));
    }
    Ok(())
}

/// Inverse-frequency class weights: w_c = N / (K · N_c) over the K classes
/// actually present, so the weighted sample count still sums to N.
pub fn class_weights(labels: &[LoadClass]) -> Result<BTreeMap<LoadClass, f64>> {
    if labels.is_empty() {
        return Err(Error::InvalidInput(
            "cannot compute class weights of an empty label vector".into(),
        ));
    }
    let mut counts: BTreeMap<LoadClass, usize> = BTreeMap::new();
    for &y in labels {
        *counts.entry(y).or_insert(0) += 1;
    }
    let n = labels.len() as f64;
    let k = counts.len() as f64;
    Ok(counts
        .into_iter()
        .map(|(c, n_c)| (c, n / (k * n_c as f64)))
        .collect())
}

/// Learned parameters, method by method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelParams {
    Logistic(logistic::LinearParams),
    Lda(lda::LdaParams),
    Knn(knn::KnnParams),
    DecisionTree(tree::Tree),
    RandomForest(Vec<tree::Tree>),
    GaussianNb(naive_bayes::GnbParams),
    LinearSvm(logistic::LinearParams),
}

/// A fitted classifier: the [`ClassifierSpec`] it was trained with, the
/// training column names (checked at prediction time), the classes seen
/// (ordered Low < Medium < High), and the learned parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ClassifierSpec,
    pub feature_names: Vec<String>,
    pub class_order: Vec<LoadClass>,
    pub params: ModelParams,
}

/// Trains a classifier on an encoded matrix.
pub fn fit(spec: &ClassifierSpec, matrix: &FeatureMatrix) -> Result<TrainedModel> {
    spec.validate()?;
    if matrix.n_rows() == 0 {
        return Err(Error::InvalidInput("cannot fit on an empty matrix".into()));
    }
    let class_order = matrix.present_classes();
    if class_order.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "training data contains {} class(es); need at least 2",
            class_order.len()
        )));
    }
    let y: Vec<usize> = matrix
        .labels
        .iter()
        .map(|c| class_order.iter().position(|o| o == c).unwrap())
        .collect();
    let weight_map = class_weights(&matrix.labels)?;
    // per-class weight vector aligned with class_order (all ones when off)
    let class_w: Vec<f64> = class_order
        .iter()
        .map(|c| {
            if spec.use_class_weights {
                weight_map[c]
            } else {
                1.0
            }
        })
        .collect();
    let sample_w: Vec<f64> = y.iter().map(|&yi| class_w[yi]).collect();
    let x = &matrix.rows;
    let n_classes = class_order.len();

    let params = match &spec.method {
        MethodSpec::Logistic {
            learning_rate,
            epochs,
        } => ModelParams::Logistic(logistic::fit(
            x,
            &y,
            &sample_w,
            n_classes,
            spec.seed,
            *learning_rate,
            *epochs,
        )),
        MethodSpec::Lda => ModelParams::Lda(lda::fit(
            x,
            &y,
            &class_w,
            n_classes,
            &matrix.column_names,
            matrix.one_hot_columns,
        )?),
        MethodSpec::Knn { k } => ModelParams::Knn(knn::fit(x, &y, &class_w, *k)?),
        MethodSpec::DecisionTree {
            max_depth,
            min_samples_split,
        } => ModelParams::DecisionTree(tree::fit_tree(
            x,
            &y,
            &class_w,
            n_classes,
            *max_depth,
            *min_samples_split,
        )),
        MethodSpec::RandomForest {
            n_trees,
            max_depth,
            min_samples_split,
            bootstrap,
            max_features,
        } => ModelParams::RandomForest(tree::fit_forest(
            x,
            &y,
            &class_w,
            n_classes,
            tree::ForestParams {
                n_trees: *n_trees,
                max_depth: *max_depth,
                min_samples_split: *min_samples_split,
                bootstrap: *bootstrap,
                max_features: *max_features,
            },
            spec.seed,
        )),
        MethodSpec::GaussianNb => {
            ModelParams::GaussianNb(naive_bayes::fit(x, &y, &class_w, n_classes))
        }
        MethodSpec::LinearSvm {
            learning_rate,
            epochs,
        } => ModelParams::LinearSvm(svm::fit(
            x,
            &y,
            &sample_w,
            n_classes,
            spec.seed,
            *learning_rate,
            *epochs,
        )),
    };

    Ok(TrainedModel {
        spec: spec.clone(),
        feature_names: matrix.column_names.clone(),
        class_order,
        params,
    })
}

impl TrainedModel {
    fn check_columns(&self, matrix: &FeatureMatrix) -> Result<()> {
        if matrix.column_names != self.feature_names {
            return Err(Error::Schema(format!(
                "feature columns {:?} do not match the training columns {:?}",
                matrix.column_names, self.feature_names
            )));
        }
        Ok(())
    }

    /// Per-row class probabilities, columns aligned with `class_order`.
    pub fn predict_proba(&self, matrix: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        self.check_columns(matrix)?;
        let x = &matrix.rows;
        let k = self.class_order.len();
        let probs = match &self.params {
            ModelParams::Logistic(p) | ModelParams::LinearSvm(p) => logistic::predict_proba(p, x),
            ModelParams::Lda(p) => lda::predict_proba(p, x),
            ModelParams::Knn(p) => knn::predict_proba(p, x, k),
            ModelParams::DecisionTree(t) => x.iter().map(|row| tree::tree_proba(t, row)).collect(),
            ModelParams::RandomForest(trees) => x
                .iter()
                .map(|row| tree::forest_proba(trees, row, k))
                .collect(),
            ModelParams::GaussianNb(p) => naive_bayes::predict_proba(p, x),
        };
        debug_assert!(probs
            .iter()
            .all(|row| (row.iter().sum::<f64>() - 1.0).abs() < 1e-9));
        Ok(probs)
    }

    /// Hard labels: argmax of the probability row, ties to the lowest
    /// class index.
    pub fn predict(&self, matrix: &FeatureMatrix) -> Result<Vec<LoadClass>> {
        Ok(self
            .predict_proba(matrix)?
            .iter()
            .map(|row| self.class_order[argmax(row)])
            .collect())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct Document<'a> {
            format_version: u32,
            #[serde(flatten)]
            model: &'a TrainedModel,
        }
        let file = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(
            file,
            &Document {
                format_version: FORMAT_VERSION,
                model: self,
            },
        )
        .map_err(|e| Error::ModelLoad(format!("cannot serialize model: {e}")))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<TrainedModel> {
        #[derive(Deserialize)]
        struct Document {
            format_version: u32,
            #[serde(flatten)]
            model: TrainedModel,
        }
        let file = BufReader::new(File::open(path)?);
        let doc: Document = serde_json::from_reader(file).map_err(|e| {
            Error::ModelLoad(format!("{}: invalid model document: {e}", path.display()))
        })?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::ModelLoad(format!(
                "{}: unsupported model format version {} (expected {})",
                path.display(),
                doc.format_version,
                FORMAT_VERSION
            )));
        }
        Ok(doc.model)
    }
}

/// Index of the largest entry; the first one wins on ties.
pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// In-place softmax with max subtraction for stability.
pub(crate) fn softmax(scores: &mut [f64]) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        total += *s;
    }
    for s in scores.iter_mut() {
        *s /= total;
    }
}
