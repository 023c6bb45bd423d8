//! Evaluation protocol: stratified k-fold cross-validation, one-vs-rest
//! ROC analysis with micro and macro averaging, confusion matrices,
//! macro precision/recall, and the model × classifier comparison grid.
//!
//! Micro averaging flattens the three one-vs-rest problems into a single
//! binary problem of 3n (score, indicator) pairs; macro averaging is the
//! unweighted mean over classes. AUC is the trapezoidal area under the
//! staircase, which equals the tie-corrected pairwise concordance
//! probability (ties count one half).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{fit, ClassifierSpec, TrainedModel};
use crate::data::{
    encode, standardize, stratified_split_indices, FeatureMatrix, LoadClass, ModelSpec,
    SessionRecord,
};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Cross-validation accuracies of one classifier on one feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub method: String,
    pub fold_accuracies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of the fold accuracies.
    pub std: f64,
}

/// A one-vs-rest ROC staircase.
///
/// `thresholds[i]` is the score cutoff producing the operating point
/// `(fpr[i], tpr[i])` when rows scoring ≥ the cutoff are called positive.
/// The first threshold is a sentinel above every score, so the curve
/// always starts at (0,0); it always ends at (1,1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub fpr: Vec<f64>,
    pub tpr: Vec<f64>,
    pub thresholds: Vec<f64>,
}

/// One-vs-rest AUC summary for the three load classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucReport {
    /// Indexed in Low < Medium < High order.
    pub auc_per_class: Vec<f64>,
    pub auc_micro: f64,
    pub auc_macro: f64,
}

/// Per-class curves plus the flattened micro curve and the AUC summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassRoc {
    /// Indexed in Low < Medium < High order.
    pub per_class: Vec<RocCurve>,
    pub micro: RocCurve,
    pub report: AucReport,
}

/// 3×3 counts; rows are the true class, columns the predicted class,
/// both in Low < Medium < High order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 3]; 3],
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let trace: usize = (0..3).map(|i| self.counts[i][i]).sum();
        trace as f64 / self.total() as f64
    }

    /// True-class supports (row sums).
    pub fn supports(&self) -> [usize; 3] {
        [0, 1, 2].map(|i| self.counts[i].iter().sum())
    }
}

/// Unweighted-mean precision and recall over the three classes. A class
/// with an empty denominator (never predicted, or absent from the truth)
/// contributes 0 to the mean and is listed in the corresponding flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecall {
    /// Indexed in Low < Medium < High order.
    pub precision_per_class: Vec<f64>,
    pub recall_per_class: Vec<f64>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub undefined_precision: Vec<LoadClass>,
    pub undefined_recall: Vec<LoadClass>,
}

/// Assigns each row to one of `k` folds, stratified by class: members of a
/// class are shuffled under a per-class substream of `seed` and dealt out
/// round-robin, so per-fold class counts differ from perfect stratification
/// by at most one.
pub fn stratified_folds(labels: &[LoadClass], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("need k ≥ 2 folds, got {k}")));
    }
    let mut folds = vec![0usize; labels.len()];
    for class in LoadClass::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(Error::Stratification(format!(
                "class {class} has {} member(s); {k}-fold cross-validation needs at least {k}",
                members.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, class.index() as u64));
        members.shuffle(&mut rng);
        for (i, &row) in members.iter().enumerate() {
            folds[row] = i % k;
        }
    }
    Ok(folds)
}

/// Stratified k-fold cross-validation accuracy. Standardization is refit
/// inside every training fold so no statistics leak from the held-out fold.
pub fn kfold_cv(
    spec: &ClassifierSpec,
    matrix: &FeatureMatrix,
    k: usize,
    seed: u64,
) -> Result<CvResult> {
    let folds = stratified_folds(&matrix.labels, k, seed)?;
    let mut fold_accuracies = Vec::with_capacity(k);
    for fold in 0..k {
        let val_idx: Vec<usize> = (0..folds.len()).filter(|&i| folds[i] == fold).collect();
        let train_idx: Vec<usize> = (0..folds.len()).filter(|&i| folds[i] != fold).collect();
        let train = matrix.select(&train_idx);
        let val = matrix.select(&val_idx);
        let (train_std, mut others, _) = standardize(&train, &[&val]);
        let val_std = others.pop().unwrap();
        let model = fit(spec, &train_std)?;
        let predictions = model.predict(&val_std)?;
        let hits = predictions
            .iter()
            .zip(&val_std.labels)
            .filter(|(p, t)| p == t)
            .count();
        fold_accuracies.push(hits as f64 / val_std.labels.len() as f64);
    }
    let mean = fold_accuracies.iter().sum::<f64>() / k as f64;
    let var = fold_accuracies
        .iter()
        .map(|a| (a - mean).powi(2))
        .sum::<f64>()
        / k as f64;
    Ok(CvResult {
        method: spec.kind().id().to_string(),
        fold_accuracies,
        mean,
        std: var.sqrt(),
    })
}

/// One-vs-rest ROC curve: rows scoring at or above each threshold are
/// called positive, thresholds descending over the unique scores with a
/// leading sentinel one above the maximum.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidInput("scores contain NaN".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedRoc(format!(
            "need both classes, got {n_pos} positive and {n_neg} negative labels"
        )));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let sentinel = scores[order[0]] + 1.0;
    let mut fpr = vec![0.0];
    let mut tpr = vec![0.0];
    let mut thresholds = vec![sentinel];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let cutoff = scores[order[i]];
        // consume the whole block of ties before emitting a point
        while i < order.len() && scores[order[i]] == cutoff {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        fpr.push(fp as f64 / n_neg as f64);
        tpr.push(tp as f64 / n_pos as f64);
        thresholds.push(cutoff);
    }
    Ok(RocCurve {
        fpr,
        tpr,
        thresholds,
    })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .fpr
        .windows(2)
        .zip(curve.tpr.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
        .sum()
}

/// One-vs-rest curves for the three classes plus micro/macro averages.
pub fn multiclass_roc(proba: &[Vec<f64>], labels: &[LoadClass]) -> Result<MulticlassRoc> {
    if proba.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} probability rows but {} labels",
            proba.len(),
            labels.len()
        )));
    }
    if let Some(row) = proba.iter().find(|r| r.len() != LoadClass::ALL.len()) {
        return Err(Error::InvalidInput(format!(
            "probability rows must have {} entries, got {}",
            LoadClass::ALL.len(),
            row.len()
        )));
    }
    for class in LoadClass::ALL {
        if !labels.contains(&class) {
            return Err(Error::UndefinedRoc(format!(
                "class {class} is absent from the labels"
            )));
        }
    }

    let mut per_class = Vec::with_capacity(3);
    let mut auc_per_class = Vec::with_capacity(3);
    for class in LoadClass::ALL {
        let scores: Vec<f64> = proba.iter().map(|row| row[class.index()]).collect();
        let binary: Vec<bool> = labels.iter().map(|&l| l == class).collect();
        let curve = roc_curve(&scores, &binary)?;
        auc_per_class.push(auc(&curve));
        per_class.push(curve);
    }
    let auc_macro = auc_per_class.iter().sum::<f64>() / auc_per_class.len() as f64;

    // micro: one binary problem over all 3n (score, is-this-class) pairs
    let mut flat_scores = Vec::with_capacity(3 * proba.len());
    let mut flat_labels = Vec::with_capacity(3 * proba.len());
    for (row, &label) in proba.iter().zip(labels) {
        for class in LoadClass::ALL {
            flat_scores.push(row[class.index()]);
            flat_labels.push(label == class);
        }
    }
    let micro = roc_curve(&flat_scores, &flat_labels)?;
    let auc_micro = auc(&micro);

    Ok(MulticlassRoc {
        per_class,
        micro,
        report: AucReport {
            auc_per_class,
            auc_micro,
            auc_macro,
        },
    })
}

/// Counts with rows indexed by the true class, columns by the predicted.
pub fn confusion_matrix(predicted: &[LoadClass], actual: &[LoadClass]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions but {} labels",
            predicted.len(),
            actual.len()
        )));
    }
    let mut counts = [[0usize; 3]; 3];
    for (&p, &t) in predicted.iter().zip(actual) {
        counts[t.index()][p.index()] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// Unweighted-mean precision and recall; empty-denominator classes
/// contribute 0 and are flagged.
pub fn precision_recall_macro(
    predicted: &[LoadClass],
    actual: &[LoadClass],
) -> Result<PrecisionRecall> {
    let cm = confusion_matrix(predicted, actual)?;
    let mut precision_per_class = Vec::with_capacity(3);
    let mut recall_per_class = Vec::with_capacity(3);
    let mut undefined_precision = Vec::new();
    let mut undefined_recall = Vec::new();
    for class in LoadClass::ALL {
        let c = class.index();
        let tp = cm.counts[c][c];
        let predicted_c: usize = (0..3).map(|i| cm.counts[i][c]).sum();
        let actual_c: usize = cm.counts[c].iter().sum();
        if predicted_c == 0 {
            undefined_precision.push(class);
            precision_per_class.push(0.0);
        } else {
            precision_per_class.push(tp as f64 / predicted_c as f64);
        }
        if actual_c == 0 {
            undefined_recall.push(class);
            recall_per_class.push(0.0);
        } else {
            recall_per_class.push(tp as f64 / actual_c as f64);
        }
    }
    let macro_precision = precision_per_class.iter().sum::<f64>() / 3.0;
    let macro_recall = recall_per_class.iter().sum::<f64>() / 3.0;
    Ok(PrecisionRecall {
        precision_per_class,
        recall_per_class,
        macro_precision,
        macro_recall,
        undefined_precision,
        undefined_recall,
    })
}

/// Split and fold settings shared by every pair in a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareProtocol {
    pub k: usize,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for CompareProtocol {
    fn default() -> Self {
        CompareProtocol {
            k: 10,
            test_fraction: 0.25,
            seed: 0,
        }
    }
}

/// Results of one (feature model, classifier) pair: cross-validation on
/// the training portion, then hold-out evaluation after a fresh fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub model: ModelSpec,
    pub classifier: ClassifierSpec,
    pub cv: CvResult,
    pub roc: MulticlassRoc,
    pub confusion: ConfusionMatrix,
    pub precision_recall: PrecisionRecall,
    pub holdout_accuracy: f64,
}

/// The full grid, one entry per requested (model, classifier) pair, in
/// the caller's order (models outer, classifiers inner).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub protocol: CompareProtocol,
    pub n_sessions: usize,
    pub entries: Vec<ComparisonEntry>,
}

/// Evaluates every (model, classifier) pair on one shared stratified
/// train/test split, so the comparison is paired: cross-validation runs on
/// the training portion, the hold-out metrics on the test portion.
///
/// Pairs run in parallel; every per-pair seed derives from the protocol
/// seed, so the report is identical whatever the thread count.
pub fn compare(
    models: &[ModelSpec],
    specs: &[ClassifierSpec],
    records: &[SessionRecord],
    protocol: &CompareProtocol,
) -> Result<ComparisonReport> {
    if models.is_empty() || specs.is_empty() {
        return Err(Error::InvalidInput(
            "comparison needs at least one model and one classifier".into(),
        ));
    }
    let labels: Vec<LoadClass> = records
        .iter()
        .map(|r| r.load_class())
        .collect::<Result<_>>()?;
    let (train_idx, test_idx) = stratified_split_indices(&labels, protocol.test_fraction, protocol.seed)?;

    let splits: Vec<(FeatureMatrix, FeatureMatrix)> = models
        .iter()
        .map(|m| {
            let full = encode(records, m)?;
            Ok((full.select(&train_idx), full.select(&test_idx)))
        })
        .collect::<Result<_>>()?;

    let grid: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|mi| (0..specs.len()).map(move |si| (mi, si)))
        .collect();
    let entries: Vec<ComparisonEntry> = grid
        .into_par_iter()
        .map(|(mi, si)| {
            let (train, test) = &splits[mi];
            evaluate_pair(&models[mi], &specs[si], train, test, protocol)
        })
        .collect::<Result<_>>()?;

    Ok(ComparisonReport {
        protocol: *protocol,
        n_sessions: records.len(),
        entries,
    })
}

fn evaluate_pair(
    model: &ModelSpec,
    spec: &ClassifierSpec,
    train: &FeatureMatrix,
    test: &FeatureMatrix,
    protocol: &CompareProtocol,
) -> Result<ComparisonEntry> {
    let cv = kfold_cv(spec, train, protocol.k, protocol.seed)?;
    let (train_std, mut others, _) = standardize(train, &[test]);
    let test_std = others.pop().unwrap();
    let fitted: TrainedModel = fit(spec, &train_std)?;
    let proba = fitted.predict_proba(&test_std)?;
    let predictions = fitted.predict(&test_std)?;
    let roc = multiclass_roc(&proba, &test_std.labels)?;
    let confusion = confusion_matrix(&predictions, &test_std.labels)?;
    let precision_recall = precision_recall_macro(&predictions, &test_std.labels)?;
    let holdout_accuracy = confusion.accuracy();
    Ok(ComparisonEntry {
        model: *model,
        classifier: spec.clone(),
        cv,
        roc,
        confusion,
        precision_recall,
        holdout_accuracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::MethodKind;
    use crate::data::ModelId;
    use crate::synth::SynthConfig;
    use rand::Rng;

    /// Three well-separated 2-D clusters, one per class.
    fn clustered_matrix(per_class: usize, spread: f64, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for class in LoadClass::ALL {
            let center = 3.0 * class.index() as f64;
            for _ in 0..per_class {
                rows.push(vec![
                    center + rng.random_range(-spread..spread),
                    -center + rng.random_range(-spread..spread),
                ]);
                labels.push(class);
            }
        }
        FeatureMatrix {
            column_names: vec!["u".into(), "v".into()],
            one_hot_columns: 0,
            rows,
            labels,
        }
    }

    /// Brute-force tie-corrected concordance over all (positive, negative)
    /// pairs.
    fn concordance(scores: &[f64], labels: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &li) in labels.iter().enumerate() {
            if !li {
                continue;
            }
            for (j, &lj) in labels.iter().enumerate() {
                if lj {
                    continue;
                }
                den += 1.0;
                if scores[i] > scores[j] {
                    num += 1.0;
                } else if scores[i] == scores[j] {
                    num += 0.5;
                }
            }
        }
        num / den
    }

    #[test]
    fn separable_data_gives_perfect_cv() {
        let matrix = clustered_matrix(20, 0.4, 1);
        let spec = ClassifierSpec::defaults(MethodKind::DecisionTree, 0);
        let cv = kfold_cv(&spec, &matrix, 10, 0).unwrap();
        assert_eq!(cv.method, "decision_tree");
        assert_eq!(cv.fold_accuracies.len(), 10);
        assert_eq!(cv.mean, 1.0);
        assert_eq!(cv.std, 0.0);
    }

    #[test]
    fn cv_mean_is_the_mean_of_fold_accuracies() {
        let matrix = clustered_matrix(15, 2.9, 5);
        let spec = ClassifierSpec::defaults(MethodKind::Knn, 0);
        let cv = kfold_cv(&spec, &matrix, 5, 3).unwrap();
        let direct = cv.fold_accuracies.iter().sum::<f64>() / 5.0;
        assert!((cv.mean - direct).abs() <= 1e-12);
        assert!(cv.fold_accuracies.iter().all(|a| (0.0..=1.0).contains(a)));
    }

    #[test]
    fn shuffled_labels_score_near_chance() {
        let base = clustered_matrix(30, 0.4, 2);
        let spec = ClassifierSpec::defaults(MethodKind::Logistic, 0);
        let mut means = Vec::new();
        for seed in 0..10u64 {
            let mut matrix = base.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            matrix.labels.shuffle(&mut rng);
            let cv = kfold_cv(&spec, &matrix, 10, seed).unwrap();
            assert!(
                (0.10..=0.60).contains(&cv.mean),
                "seed {seed}: wildly off chance: {}",
                cv.mean
            );
            means.push(cv.mean);
        }
        let grand = means.iter().sum::<f64>() / means.len() as f64;
        assert!(
            (0.20..=0.47).contains(&grand),
            "permutation accuracy {grand} outside the chance band"
        );
    }

    #[test]
    fn folds_are_deterministic_stratified_and_balanced() {
        // 23 + 20 + 31 members: per-fold class counts must differ by ≤ 1
        let mut labels = vec![LoadClass::Low; 23];
        labels.extend(vec![LoadClass::Medium; 20]);
        labels.extend(vec![LoadClass::High; 31]);
        let k = 10;
        let folds = stratified_folds(&labels, k, 9).unwrap();
        assert_eq!(folds, stratified_folds(&labels, k, 9).unwrap());
        assert_ne!(folds, stratified_folds(&labels, k, 10).unwrap());
        for class in LoadClass::ALL {
            let n_c = labels.iter().filter(|&&l| l == class).count();
            for fold in 0..k {
                let in_fold = labels
                    .iter()
                    .zip(&folds)
                    .filter(|(&l, &f)| l == class && f == fold)
                    .count();
                let perfect = n_c as f64 / k as f64;
                assert!(
                    (in_fold as f64 - perfect).abs() <= 1.0,
                    "class {class} fold {fold}: {in_fold} vs perfect {perfect}"
                );
            }
        }
        // folds partition the data
        assert!(folds.iter().all(|&f| f < k));
    }

    #[test]
    fn small_classes_cannot_be_cross_validated() {
        let mut labels = vec![LoadClass::Low; 12];
        labels.extend(vec![LoadClass::Medium; 12]);
        labels.extend(vec![LoadClass::High; 4]);
        assert!(matches!(
            stratified_folds(&labels, 10, 0),
            Err(Error::Stratification(_))
        ));
        assert!(matches!(
            stratified_folds(&labels, 1, 0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn perfect_scores_hit_the_ideal_corner() {
        let labels = vec![true, true, false, false, true];
        let scores: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
        let curve = roc_curve(&scores, &labels).unwrap();
        assert!(curve
            .fpr
            .iter()
            .zip(&curve.tpr)
            .any(|(&f, &t)| f == 0.0 && t == 1.0));
        assert_eq!(auc(&curve), 1.0);

        let reversed: Vec<f64> = scores.iter().map(|s| -s).collect();
        assert_eq!(auc(&roc_curve(&reversed, &labels).unwrap()), 0.0);
    }

    #[test]
    fn identical_scores_collapse_to_the_diagonal() {
        let scores = vec![0.4; 6];
        let labels = vec![true, false, true, false, true, false];
        let curve = roc_curve(&scores, &labels).unwrap();
        assert_eq!(curve.fpr, vec![0.0, 1.0]);
        assert_eq!(curve.tpr, vec![0.0, 1.0]);
        assert_eq!(curve.thresholds, vec![1.4, 0.4]);
        assert_eq!(auc(&curve), 0.5);
    }

    #[test]
    fn roc_needs_both_classes() {
        assert!(matches!(
            roc_curve(&[0.1, 0.9], &[true, true]),
            Err(Error::UndefinedRoc(_))
        ));
        assert!(matches!(
            roc_curve(&[0.1, 0.9], &[false, false]),
            Err(Error::UndefinedRoc(_))
        ));
        assert!(matches!(
            roc_curve(&[0.1], &[true, false]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn random_scores_sit_near_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 10000;
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let labels: Vec<bool> = (0..n).map(|_| rng.random_range(0.0..1.0) < 0.5).collect();
        let a = auc(&roc_curve(&scores, &labels).unwrap());
        assert!((0.48..=0.52).contains(&a), "{a}");
    }

    #[test]
    fn trapezoid_equals_pair_counting() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..40 {
            let n = rng.random_range(10..200);
            // quantized scores force plenty of ties
            let scores: Vec<f64> = (0..n)
                .map(|_| (rng.random_range(0.0f64..1.0) * 10.0).round() / 10.0)
                .collect();
            let mut labels: Vec<bool> = (0..n).map(|_| rng.random_range(0.0..1.0) < 0.5).collect();
            labels[0] = true;
            labels[1] = false;
            let curve = roc_curve(&scores, &labels).unwrap();
            let diff = (auc(&curve) - concordance(&scores, &labels)).abs();
            assert!(diff <= 1e-12, "trial {trial}: off by {diff}");
        }
    }

    #[test]
    fn curves_are_monotone_staircases() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = rng.random_range(5..100);
            let scores: Vec<f64> = (0..n)
                .map(|_| (rng.random_range(0.0f64..1.0) * 5.0).round() / 5.0)
                .collect();
            let mut labels: Vec<bool> = (0..n).map(|_| rng.random_range(0.0..1.0) < 0.5).collect();
            labels[0] = true;
            labels[1] = false;
            let curve = roc_curve(&scores, &labels).unwrap();
            assert_eq!((curve.fpr[0], curve.tpr[0]), (0.0, 0.0));
            let last = curve.fpr.len() - 1;
            assert_eq!((curve.fpr[last], curve.tpr[last]), (1.0, 1.0));
            assert!(curve.fpr.windows(2).all(|w| w[0] <= w[1]));
            assert!(curve.tpr.windows(2).all(|w| w[0] <= w[1]));
            assert!(curve.thresholds.windows(2).all(|w| w[0] > w[1]));
            assert_eq!(curve.fpr.len(), curve.thresholds.len());
        }
    }

    #[test]
    fn auc_ignores_strictly_increasing_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let scores: Vec<f64> = (0..150)
            .map(|_| (rng.random_range(0.0f64..1.0) * 8.0).round() / 8.0)
            .collect();
        let labels: Vec<bool> = (0..150)
            .map(|i| i % 3 == 0 || rng.random_range(0.0..1.0) < 0.3)
            .collect();
        let base = roc_curve(&scores, &labels).unwrap();
        for transform in [|s: f64| 2.0 * s + 1.0, |s: f64| s.exp()] {
            let mapped: Vec<f64> = scores.iter().map(|&s| transform(s)).collect();
            let curve = roc_curve(&mapped, &labels).unwrap();
            // identical ranks → identical operating points → identical area
            assert_eq!(curve.fpr, base.fpr);
            assert_eq!(curve.tpr, base.tpr);
            assert_eq!(auc(&curve), auc(&base));
        }
    }

    fn balanced_labels(per_class: usize) -> Vec<LoadClass> {
        LoadClass::ALL
            .into_iter()
            .flat_map(|c| std::iter::repeat_n(c, per_class))
            .collect()
    }

    #[test]
    fn perfect_probabilities_score_one_everywhere() {
        let labels = balanced_labels(4);
        let proba: Vec<Vec<f64>> = labels
            .iter()
            .map(|l| {
                let mut row = vec![0.0; 3];
                row[l.index()] = 1.0;
                row
            })
            .collect();
        let roc = multiclass_roc(&proba, &labels).unwrap();
        assert_eq!(roc.report.auc_per_class, vec![1.0, 1.0, 1.0]);
        assert_eq!(roc.report.auc_micro, 1.0);
        assert_eq!(roc.report.auc_macro, 1.0);
    }

    #[test]
    fn uniform_probabilities_score_half_everywhere() {
        let labels = balanced_labels(5);
        let proba = vec![vec![1.0 / 3.0; 3]; labels.len()];
        let roc = multiclass_roc(&proba, &labels).unwrap();
        assert_eq!(roc.report.auc_per_class, vec![0.5, 0.5, 0.5]);
        assert_eq!(roc.report.auc_micro, 0.5);
        assert_eq!(roc.report.auc_macro, 0.5);
        assert_eq!(roc.micro.fpr, vec![0.0, 1.0]);
    }

    #[test]
    fn micro_and_macro_match_the_flattening_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 300;
        let labels: Vec<LoadClass> = (0..n)
            .map(|i| LoadClass::ALL[if i < 3 { i } else { rng.random_range(0..3) }])
            .collect();
        let proba: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let raw: Vec<f64> = (0..3)
                    .map(|_| (rng.random_range(0.1f64..1.0) * 4.0).round() / 4.0)
                    .collect();
                let total: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / total).collect()
            })
            .collect();
        let roc = multiclass_roc(&proba, &labels).unwrap();

        // macro: unweighted mean of per-class concordances
        let mut macro_oracle = 0.0;
        for class in LoadClass::ALL {
            let scores: Vec<f64> = proba.iter().map(|r| r[class.index()]).collect();
            let binary: Vec<bool> = labels.iter().map(|&l| l == class).collect();
            macro_oracle += concordance(&scores, &binary) / 3.0;
        }
        assert!((roc.report.auc_macro - macro_oracle).abs() <= 1e-12);

        // micro: concordance of the flattened 3n problem
        let mut flat_scores = Vec::new();
        let mut flat_labels = Vec::new();
        for (row, &label) in proba.iter().zip(&labels) {
            for class in LoadClass::ALL {
                flat_scores.push(row[class.index()]);
                flat_labels.push(label == class);
            }
        }
        let micro_oracle = concordance(&flat_scores, &flat_labels);
        assert!((roc.report.auc_micro - micro_oracle).abs() <= 1e-12);
    }

    #[test]
    fn missing_class_is_reported_by_name() {
        let labels = vec![LoadClass::Low, LoadClass::Medium, LoadClass::Low];
        let proba = vec![vec![1.0 / 3.0; 3]; 3];
        match multiclass_roc(&proba, &labels) {
            Err(Error::UndefinedRoc(message)) => assert!(message.contains("high"), "{message}"),
            other => panic!("expected an undefined-ROC error, got {other:?}"),
        }
    }

    #[test]
    fn symmetric_instances_make_micro_equal_macro() {
        // equal supports; every class sees the same score templates rotated
        // onto itself, so the three one-vs-rest problems are identical up
        // to relabeling
        let templates = [
            [0.70, 0.20, 0.10],
            [0.50, 0.30, 0.20],
            [0.25, 0.40, 0.35],
            [0.34, 0.33, 0.33],
        ];
        let mut proba = Vec::new();
        let mut labels = Vec::new();
        for class in LoadClass::ALL {
            let c = class.index();
            for t in &templates {
                let mut row = vec![0.0; 3];
                for j in 0..3 {
                    row[(c + j) % 3] = t[j];
                }
                proba.push(row);
                labels.push(class);
            }
        }
        let roc = multiclass_roc(&proba, &labels).unwrap();
        let r = &roc.report;
        assert!((r.auc_micro - r.auc_macro).abs() <= 1e-12);
        for &a in &r.auc_per_class {
            assert!((a - r.auc_macro).abs() <= 1e-12);
        }
    }

    #[test]
    fn confusion_counts_match_their_definition() {
        use LoadClass::*;
        let actual = vec![Low, Low, Medium, Medium, High, High];

        let perfect = confusion_matrix(&actual, &actual).unwrap();
        assert_eq!(perfect.counts, [[2, 0, 0], [0, 2, 0], [0, 0, 2]]);
        assert_eq!(perfect.accuracy(), 1.0);
        assert_eq!(perfect.supports(), [2, 2, 2]);

        let all_low = confusion_matrix(&vec![Low; 6], &actual).unwrap();
        assert_eq!(all_low.counts, [[2, 0, 0], [2, 0, 0], [2, 0, 0]]);

        assert!(matches!(
            confusion_matrix(&[Low], &actual),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn confusion_matches_the_double_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let predicted: Vec<LoadClass> =
            (0..200).map(|_| LoadClass::ALL[rng.random_range(0..3)]).collect();
        let actual: Vec<LoadClass> =
            (0..200).map(|_| LoadClass::ALL[rng.random_range(0..3)]).collect();
        let cm = confusion_matrix(&predicted, &actual).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let oracle = predicted
                    .iter()
                    .zip(&actual)
                    .filter(|(p, t)| t.index() == i && p.index() == j)
                    .count();
                assert_eq!(cm.counts[i][j], oracle);
            }
        }
        // trace accuracy equals direct accuracy
        let direct = predicted
            .iter()
            .zip(&actual)
            .filter(|(p, t)| p == t)
            .count() as f64
            / 200.0;
        assert!((cm.accuracy() - direct).abs() <= 1e-12);
    }

    #[test]
    fn precision_recall_on_perfect_predictions() {
        let actual = balanced_labels(3);
        let pr = precision_recall_macro(&actual, &actual).unwrap();
        assert_eq!(pr.macro_precision, 1.0);
        assert_eq!(pr.macro_recall, 1.0);
        assert!(pr.undefined_precision.is_empty());
        assert!(pr.undefined_recall.is_empty());
    }

    #[test]
    fn never_predicted_class_is_flagged_and_contributes_zero() {
        use LoadClass::*;
        let actual = vec![Low, Low, Medium, Medium, High, High];
        let predicted = vec![Low, Low, Medium, Medium, Medium, Low];
        let pr = precision_recall_macro(&predicted, &actual).unwrap();
        assert_eq!(pr.undefined_precision, vec![High]);
        assert!(pr.undefined_recall.is_empty());
        assert_eq!(pr.precision_per_class[High.index()], 0.0);
        // Low: 2 of 3 predicted-Low are right; Medium: 2 of 3
        assert!((pr.macro_precision - (2.0 / 3.0 + 2.0 / 3.0 + 0.0) / 3.0).abs() <= 1e-12);
        assert!((pr.macro_recall - (1.0 + 1.0 + 0.0) / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn precision_recall_matches_confusion_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let predicted: Vec<LoadClass> =
            (0..150).map(|_| LoadClass::ALL[rng.random_range(0..3)]).collect();
        let actual: Vec<LoadClass> =
            (0..150).map(|_| LoadClass::ALL[rng.random_range(0..3)]).collect();
        let cm = confusion_matrix(&predicted, &actual).unwrap();
        let pr = precision_recall_macro(&predicted, &actual).unwrap();
        for c in 0..3 {
            let col: usize = (0..3).map(|i| cm.counts[i][c]).sum();
            let row: usize = cm.counts[c].iter().sum();
            assert!((pr.precision_per_class[c] - cm.counts[c][c] as f64 / col as f64).abs() <= 1e-12);
            assert!((pr.recall_per_class[c] - cm.counts[c][c] as f64 / row as f64).abs() <= 1e-12);
        }
    }

    fn quick_specs() -> Vec<ClassifierSpec> {
        vec![
            ClassifierSpec::defaults(MethodKind::Knn, 0),
            ClassifierSpec::defaults(MethodKind::GaussianNb, 0),
        ]
    }

    #[test]
    fn comparison_covers_the_grid_exactly_once() {
        let records = crate::synth::generate(&SynthConfig {
            n_sessions: 60,
            seed: 3,
            ..SynthConfig::default()
        })
        .unwrap();
        let models = vec![
            ModelSpec::new(ModelId::PostShort, true),
            ModelSpec::new(ModelId::PostShort, false),
        ];
        let protocol = CompareProtocol {
            k: 3,
            test_fraction: 0.25,
            seed: 0,
        };
        let report = compare(&models, &quick_specs(), &records, &protocol).unwrap();
        assert_eq!(report.entries.len(), 4);
        assert_eq!(report.n_sessions, 60);
        let mut seen = Vec::new();
        for entry in &report.entries {
            let key = (entry.model.tag(), entry.classifier.kind());
            assert!(!seen.contains(&key), "duplicate {key:?}");
            seen.push(key);
        }
        // models outer, classifiers inner
        assert_eq!(report.entries[0].model.tag(), "post_short+A");
        assert_eq!(report.entries[1].model.tag(), "post_short+A");
        assert_eq!(report.entries[2].model.tag(), "post_short-A");
        // hold-out confusion covers the whole test split
        let test_size = report.entries[0].confusion.total();
        assert!(test_size >= 12 && test_size <= 18, "{test_size}");
    }

    #[test]
    fn comparison_is_deterministic() {
        let records = crate::synth::generate(&SynthConfig {
            n_sessions: 60,
            seed: 5,
            ..SynthConfig::default()
        })
        .unwrap();
        let models = vec![ModelSpec::new(ModelId::PostFull, true)];
        let protocol = CompareProtocol {
            k: 3,
            test_fraction: 0.25,
            seed: 11,
        };
        let a = compare(&models, &quick_specs(), &records, &protocol).unwrap();
        let b = compare(&models, &quick_specs(), &records, &protocol).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn activity_variants_do_not_trail_on_strong_signal() {
        let records = crate::synth::generate(&SynthConfig {
            n_sessions: 150,
            seed: 7,
            signal_strength: 1.0,
            ..SynthConfig::default()
        })
        .unwrap();
        let models = vec![
            ModelSpec::new(ModelId::PostFull, true),
            ModelSpec::new(ModelId::PostFull, false),
        ];
        let specs = vec![
            ClassifierSpec::defaults(MethodKind::Logistic, 0),
            ClassifierSpec::defaults(MethodKind::DecisionTree, 0),
        ];
        let protocol = CompareProtocol {
            k: 5,
            test_fraction: 0.25,
            seed: 0,
        };
        let report = compare(&models, &specs, &records, &protocol).unwrap();
        for spec in &specs {
            let macro_of = |with_activity: bool| {
                report
                    .entries
                    .iter()
                    .find(|e| {
                        e.model.include_activity == with_activity
                            && e.classifier.kind() == spec.kind()
                    })
                    .unwrap()
                    .roc
                    .report
                    .auc_macro
            };
            let with = macro_of(true);
            let without = macro_of(false);
            assert!(
                with >= without - 0.02,
                "{}: +A {with} vs -A {without}",
                spec.kind()
            );
        }
    }
}
