//! Report artifacts: the full JSON document plus flat CSV summaries and
//! raw plotting data (ROC points, confusion counts).
//!
//! All numbers are written with the shortest round-trip formatting, so a
//! report regenerated from the same inputs is byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::data::LoadClass;
use crate::error::{Error, Result};
use crate::eval::{ComparisonReport, ConfusionMatrix, MulticlassRoc};

/// Pretty-printed JSON with the complete numeric detail of every entry.
pub fn write_json_report(report: &ComparisonReport, path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut file, report)
        .map_err(|e| Error::InvalidInput(format!("cannot serialize report: {e}")))?;
    file.write_all(b"\n")?;
    Ok(())
}

/// Cross-validation summary, one row per (model, method): the Mean/Std
/// table shape.
pub fn write_cv_csv(report: &ComparisonReport, path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "model,method,cv_mean,cv_std")?;
    for entry in &report.entries {
        writeln!(
            file,
            "{},{},{},{}",
            entry.model.tag(),
            entry.cv.method,
            entry.cv.mean,
            entry.cv.std
        )?;
    }
    Ok(())
}

/// Per-fold accuracies, one row per (model, method, fold): the box-plot
/// data behind the CV summary.
pub fn write_fold_csv(report: &ComparisonReport, path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "model,method,fold,accuracy")?;
    for entry in &report.entries {
        for (fold, accuracy) in entry.cv.fold_accuracies.iter().enumerate() {
            writeln!(
                file,
                "{},{},{},{}",
                entry.model.tag(),
                entry.cv.method,
                fold,
                accuracy
            )?;
        }
    }
    Ok(())
}

/// Hold-out comparison, one row per (model, method): the model-variant
/// table shape with AUCs, precision, recall and accuracy.
pub fn write_comparison_csv(report: &ComparisonReport, path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(
        file,
        "model,method,auc_low,auc_medium,auc_high,auc_micro,auc_macro,precision,recall,accuracy,cv_mean,cv_std"
    )?;
    for entry in &report.entries {
        let auc = &entry.roc.report;
        writeln!(
            file,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            entry.model.tag(),
            entry.cv.method,
            auc.auc_per_class[0],
            auc.auc_per_class[1],
            auc.auc_per_class[2],
            auc.auc_micro,
            auc.auc_macro,
            entry.precision_recall.macro_precision,
            entry.precision_recall.macro_recall,
            entry.holdout_accuracy,
            entry.cv.mean,
            entry.cv.std
        )?;
    }
    Ok(())
}

/// Raw ROC operating points for external plotting: one row per point of
/// each per-class curve and the micro curve.
pub fn write_roc_points_csv(roc: &MulticlassRoc, path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "curve,threshold,fpr,tpr")?;
    for class in LoadClass::ALL {
        let curve = &roc.per_class[class.index()];
        for i in 0..curve.fpr.len() {
            writeln!(
                file,
                "{},{},{},{}",
                class, curve.thresholds[i], curve.fpr[i], curve.tpr[i]
            )?;
        }
    }
    for i in 0..roc.micro.fpr.len() {
        writeln!(
            file,
            "micro,{},{},{}",
            roc.micro.thresholds[i], roc.micro.fpr[i], roc.micro.tpr[i]
        )?;
    }
    Ok(())
}

/// Confusion counts with the true class as the row key.
pub fn write_confusion_csv(cm: &ConfusionMatrix, path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "true_class,pred_low,pred_medium,pred_high")?;
    for class in LoadClass::ALL {
        let row = cm.counts[class.index()];
        writeln!(file, "{},{},{},{}", class, row[0], row[1], row[2])?;
    }
    Ok(())
}
