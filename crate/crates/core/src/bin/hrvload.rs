//! Command-line front end: synthesize sessions, extract HRV features from
//! RR recordings, train and apply classifiers, and run the evaluation and
//! comparison pipeline with its report artifacts.
//!
//! Every run writes exactly one manifest next to its artifacts; artifact
//! names share the stem `<command>-<seed>-<confighash>`, so re-running
//! with the same flags reproduces the same files byte for byte. `--format`
//! only changes the summary printed to stdout — files on disk always use
//! the formats of the pipeline contracts.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hrvload::classify::{fit, ClassifierSpec, MethodKind, TrainedModel};
use hrvload::data::{
    encode, load_sessions, save_sessions, standardize, stratified_split, ModelId, ModelSpec,
    Scaler,
};
use hrvload::eval::{compare, CompareProtocol, ComparisonReport};
use hrvload::hrv::{extract_all, read_rr_file, DEFAULT_BIN_WIDTH_MS};
use hrvload::manifest::RunManifest;
use hrvload::report::{
    write_comparison_csv, write_confusion_csv, write_cv_csv, write_fold_csv, write_json_report,
    write_roc_points_csv,
};
use hrvload::svg::{confusion_svg, roc_svg};
use hrvload::synth::{generate, SynthConfig};

#[derive(Parser)]
#[command(
    name = "hrvload",
    version,
    about = "HRV feature extraction and training-load classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for parallel sections (0 = one per core). Results
    /// never depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Directory receiving artifacts and the run manifest.
    #[arg(long, global = true, env = "HRVLOAD_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    /// Format of the summary printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic sessions CSV.
    Synth {
        /// Number of sessions.
        #[arg(long, default_value_t = 300)]
        n: usize,
        /// Coupling between load class and recovery features.
        #[arg(long, default_value_t = 0.8, value_parser = parse_signal)]
        signal: f64,
        /// Class mix `low,medium,high`, summing to 1 (default: equal).
        #[arg(long)]
        mix: Option<String>,
    },
    /// Extract the nine HRV features from RR-interval files.
    Features {
        /// RR files, or directories scanned for them.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Train one classifier on a sessions CSV and persist model + scaler.
    Train {
        /// Sessions CSV.
        #[arg(long)]
        data: PathBuf,
        /// Feature model family.
        #[arg(long, default_value = "post_full")]
        model: ModelId,
        /// Drop the activity one-hot block from the features.
        #[arg(long)]
        no_activity: bool,
        /// Classifier (full name or abbreviation, e.g. `rf`).
        #[arg(long, default_value = "random_forest")]
        method: MethodKind,
        /// Hold out this fraction for a test-accuracy readout
        /// (0 = train on everything).
        #[arg(long, default_value_t = 0.0)]
        test_fraction: f64,
    },
    /// Predict load classes for a sessions CSV with a saved model.
    Predict {
        /// Model JSON written by `train`.
        #[arg(long)]
        model: PathBuf,
        /// Scaler JSON written by `train`.
        #[arg(long)]
        scaler: PathBuf,
        /// Sessions CSV.
        #[arg(long)]
        data: PathBuf,
    },
    /// Evaluate one (model, method) pair: cross-validation plus hold-out
    /// ROC and confusion artifacts.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "post_full")]
        model: ModelId,
        #[arg(long)]
        no_activity: bool,
        #[arg(long, default_value = "random_forest")]
        method: MethodKind,
        /// Cross-validation folds.
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Hold-out fraction of the shared split.
        #[arg(long, default_value_t = 0.25)]
        test_fraction: f64,
    },
    /// Compare classifiers across feature models on one shared split.
    Compare {
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated model families.
        #[arg(long, value_delimiter = ',', default_value = "post_full")]
        models: Vec<ModelId>,
        /// Comma-separated methods (default: all seven).
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<MethodKind>>,
        /// Evaluate each model both with and without the activity block.
        #[arg(long)]
        ablate_activity: bool,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0.25)]
        test_fraction: f64,
    },
    /// `compare` with the ±activity ablation always on.
    Ablate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "post_full,post_short")]
        models: Vec<ModelId>,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<MethodKind>>,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0.25)]
        test_fraction: f64,
    },
    /// Re-render CSV and SVG artifacts from a saved JSON report.
    Report {
        /// Report JSON written by `evaluate`, `compare`, or `ablate`.
        #[arg(long)]
        from: PathBuf,
    },
}

fn parse_signal(s: &str) -> std::result::Result<f64, String> {
    let value: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(format!("signal strength must lie in [0, 1], got {value}"))
    }
}

/// Mutable run record the command bodies write into as they go, so a run
/// that fails halfway still reports which outputs exist.
#[derive(Default)]
struct RunState {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    soft_errors: Vec<String>,
    details: Value,
    summary: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // ignore the error when a pool already exists (tests, repeat init)
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }

    let (name, config) = describe(&cli);
    let mut manifest = RunManifest::new(name, config, cli.seed);
    let stem = manifest.artifact_stem();
    if let Err(e) = std::fs::create_dir_all(&cli.out_dir) {
        eprintln!("error: cannot create {}: {e}", cli.out_dir.display());
        return ExitCode::FAILURE;
    }

    let started = Instant::now();
    let mut state = RunState::default();
    let result = dispatch(&cli, &stem, &mut state);
    manifest.duration_ms = started.elapsed().as_millis() as u64;
    manifest.inputs = state.inputs;
    manifest.outputs = state.outputs;
    manifest.errors = state.soft_errors;
    manifest.details = state.details;
    if let Err(e) = &result {
        manifest.errors.push(format!("{e:#}"));
    }
    manifest.partial = !manifest.errors.is_empty();

    let manifest_path = cli.out_dir.join(format!("{stem}.manifest.json"));
    if let Err(e) = manifest.save(&manifest_path) {
        eprintln!("error: cannot write manifest {}: {e}", manifest_path.display());
        return ExitCode::FAILURE;
    }

    match result {
        Ok(()) if manifest.errors.is_empty() => {
            print_summary(cli.format, &state.summary);
            ExitCode::SUCCESS
        }
        Ok(()) => {
            // soft errors: artifacts exist, manifest flags the run partial
            print_summary(cli.format, &state.summary);
            for error in &manifest.errors {
                eprintln!("error: {error}");
            }
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Command name plus the resolved configuration that feeds the artifact
/// name hash. Deliberately excludes `--out-dir`, `--threads`, and
/// `--format`: none of them changes results.
fn describe(cli: &Cli) -> (&'static str, Value) {
    match &cli.command {
        Command::Synth { n, signal, mix } => (
            "synth",
            json!({"n": n, "signal": signal, "mix": mix, "seed": cli.seed}),
        ),
        Command::Features { paths } => (
            "features",
            json!({"paths": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()}),
        ),
        Command::Train {
            data,
            model,
            no_activity,
            method,
            test_fraction,
        } => (
            "train",
            json!({
                "data": data.display().to_string(),
                "model": ModelSpec::new(*model, !no_activity).tag(),
                "method": method.id(),
                "test_fraction": test_fraction,
                "seed": cli.seed,
            }),
        ),
        Command::Predict { model, scaler, data } => (
            "predict",
            json!({
                "model": model.display().to_string(),
                "scaler": scaler.display().to_string(),
                "data": data.display().to_string(),
            }),
        ),
        Command::Evaluate {
            data,
            model,
            no_activity,
            method,
            k,
            test_fraction,
        } => (
            "evaluate",
            json!({
                "data": data.display().to_string(),
                "model": ModelSpec::new(*model, !no_activity).tag(),
                "method": method.id(),
                "k": k,
                "test_fraction": test_fraction,
                "seed": cli.seed,
            }),
        ),
        Command::Compare {
            data,
            models,
            methods,
            ablate_activity,
            k,
            test_fraction,
        } => (
            "compare",
            json!({
                "data": data.display().to_string(),
                "models": models.iter().map(|m| m.id()).collect::<Vec<_>>(),
                "methods": requested_methods(methods).iter().map(|m| m.id()).collect::<Vec<_>>(),
                "ablate_activity": ablate_activity,
                "k": k,
                "test_fraction": test_fraction,
                "seed": cli.seed,
            }),
        ),
        Command::Ablate {
            data,
            models,
            methods,
            k,
            test_fraction,
        } => (
            "ablate",
            json!({
                "data": data.display().to_string(),
                "models": models.iter().map(|m| m.id()).collect::<Vec<_>>(),
                "methods": requested_methods(methods).iter().map(|m| m.id()).collect::<Vec<_>>(),
                "k": k,
                "test_fraction": test_fraction,
                "seed": cli.seed,
            }),
        ),
        Command::Report { from } => ("report", json!({"from": from.display().to_string()})),
    }
}

fn requested_methods(methods: &Option<Vec<MethodKind>>) -> Vec<MethodKind> {
    methods.clone().unwrap_or_else(|| MethodKind::ALL.to_vec())
}

fn dispatch(cli: &Cli, stem: &str, state: &mut RunState) -> Result<()> {
    match &cli.command {
        Command::Synth { n, signal, mix } => cmd_synth(cli, stem, state, *n, *signal, mix.as_deref()),
        Command::Features { paths } => cmd_features(cli, stem, state, paths),
        Command::Train {
            data,
            model,
            no_activity,
            method,
            test_fraction,
        } => cmd_train(cli, stem, state, data, *model, !no_activity, *method, *test_fraction),
        Command::Predict { model, scaler, data } => {
            cmd_predict(cli, stem, state, model, scaler, data)
        }
        Command::Evaluate {
            data,
            model,
            no_activity,
            method,
            k,
            test_fraction,
        } => {
            let models = vec![ModelSpec::new(*model, !no_activity)];
            let specs = vec![ClassifierSpec::defaults(*method, cli.seed)];
            cmd_compare_like(cli, stem, state, data, models, specs, *k, *test_fraction)
        }
        Command::Compare {
            data,
            models,
            methods,
            ablate_activity,
            k,
            test_fraction,
        } => {
            let models = expand_models(models, *ablate_activity);
            let specs = build_specs(&requested_methods(methods), cli.seed);
            cmd_compare_like(cli, stem, state, data, models, specs, *k, *test_fraction)
        }
        Command::Ablate {
            data,
            models,
            methods,
            k,
            test_fraction,
        } => {
            let models = expand_models(models, true);
            let specs = build_specs(&requested_methods(methods), cli.seed);
            cmd_compare_like(cli, stem, state, data, models, specs, *k, *test_fraction)
        }
        Command::Report { from } => cmd_report(cli, stem, state, from),
    }
}

fn expand_models(models: &[ModelId], ablate_activity: bool) -> Vec<ModelSpec> {
    models
        .iter()
        .flat_map(|&id| {
            if ablate_activity {
                vec![ModelSpec::new(id, true), ModelSpec::new(id, false)]
            } else {
                vec![ModelSpec::new(id, true)]
            }
        })
        .collect()
}

fn build_specs(methods: &[MethodKind], seed: u64) -> Vec<ClassifierSpec> {
    methods
        .iter()
        .map(|&kind| ClassifierSpec::defaults(kind, seed))
        .collect()
}

fn parse_mix(text: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad mix entry {p:?}")))
        .collect::<Result<_>>()?;
    if parts.len() != 3 {
        bail!("class mix needs exactly three entries `low,medium,high`, got {}", parts.len());
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn cmd_synth(
    cli: &Cli,
    stem: &str,
    state: &mut RunState,
    n: usize,
    signal: f64,
    mix: Option<&str>,
) -> Result<()> {
    let mut config = SynthConfig {
        n_sessions: n,
        seed: cli.seed,
        signal_strength: signal,
        ..SynthConfig::default()
    };
    if let Some(text) = mix {
        config.class_mix = parse_mix(text)?;
    }
    let records = generate(&config)?;
    let path = cli.out_dir.join(format!("{stem}.sessions.csv"));
    save_sessions(&records, &path).with_context(|| format!("writing {}", path.display()))?;
    state.outputs.push(path.clone());
    state.summary = json!({
        "command": "synth",
        "rows": records.len(),
        "sessions": path.display().to_string(),
    });
    Ok(())
}

const FEATURES_HEADER: &str = "file,avnn,sdnn,rmssd,sdsd,nn50,pnn50,hrv_index,rahr,rmhr";

fn cmd_features(cli: &Cli, stem: &str, state: &mut RunState, paths: &[PathBuf]) -> Result<()> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
                .with_context(|| format!("reading directory {}", path.display()))?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(path.clone());
        }
    }
    state.inputs = files.clone();

    let mut lines = vec![FEATURES_HEADER.to_string()];
    for file in &files {
        match read_rr_file(file).and_then(|rr| extract_all(&rr, DEFAULT_BIN_WIDTH_MS)) {
            Ok(f) => lines.push(format!(
                "{},{},{},{},{},{},{},{},{},{}",
                file.display(),
                f.avnn,
                f.sdnn,
                f.rmssd,
                f.sdsd,
                f.nn50,
                f.pnn50,
                f.hrv_index,
                f.rahr,
                f.rmhr
            )),
            // parse errors already carry file and line; prefix the rest
            Err(e @ hrvload::Error::Parse { .. }) => state.soft_errors.push(e.to_string()),
            Err(e) => state.soft_errors.push(format!("{}: {e}", file.display())),
        }
    }
    let path = cli.out_dir.join(format!("{stem}.features.csv"));
    std::fs::write(&path, lines.join("\n") + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    state.outputs.push(path.clone());
    state.summary = json!({
        "command": "features",
        "files": files.len(),
        "rows": lines.len() - 1,
        "failed": state.soft_errors.len(),
        "features": path.display().to_string(),
    });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    cli: &Cli,
    stem: &str,
    state: &mut RunState,
    data: &Path,
    model_id: ModelId,
    include_activity: bool,
    method: MethodKind,
    test_fraction: f64,
) -> Result<()> {
    state.inputs.push(data.to_path_buf());
    let records = load_sessions(data)?;
    let model_spec = ModelSpec::new(model_id, include_activity);
    let matrix = encode(&records, &model_spec)?;

    let (train, holdout) = if test_fraction > 0.0 {
        let (train, test) = stratified_split(&matrix, test_fraction, cli.seed)?;
        (train, Some(test))
    } else {
        (matrix, None)
    };
    let holdout_refs: Vec<&_> = holdout.iter().collect();
    let (train_std, mut scaled_holdout, scaler) = standardize(&train, &holdout_refs);

    let spec = ClassifierSpec::defaults(method, cli.seed);
    let fitted = fit(&spec, &train_std)?;

    let model_path = cli.out_dir.join(format!("{stem}.model.json"));
    fitted.save(&model_path)?;
    state.outputs.push(model_path.clone());
    let scaler_path = cli.out_dir.join(format!("{stem}.scaler.json"));
    scaler.save(&scaler_path)?;
    state.outputs.push(scaler_path.clone());

    let holdout_accuracy = match scaled_holdout.pop() {
        Some(test) => {
            let predictions = fitted.predict(&test)?;
            let hits = predictions.iter().zip(&test.labels).filter(|(p, t)| p == t).count();
            Some(hits as f64 / test.labels.len() as f64)
        }
        None => None,
    };

    state.details = json!({
        "split_seed": cli.seed,
        "scaler": serde_json::to_value(&scaler)?,
    });
    state.summary = json!({
        "command": "train",
        "model": model_path.display().to_string(),
        "scaler": scaler_path.display().to_string(),
        "method": method.id(),
        "features": model_spec.tag(),
        "train_rows": train_std.n_rows(),
        "holdout_accuracy": holdout_accuracy,
    });
    Ok(())
}

fn cmd_predict(
    cli: &Cli,
    stem: &str,
    state: &mut RunState,
    model: &Path,
    scaler: &Path,
    data: &Path,
) -> Result<()> {
    state.inputs.extend([model.to_path_buf(), scaler.to_path_buf(), data.to_path_buf()]);
    let fitted = TrainedModel::load(model)?;
    let scaler = Scaler::load(scaler)?;
    let records = load_sessions(data)?;
    let model_spec = ModelSpec::infer_from_columns(&fitted.feature_names).ok_or_else(|| {
        hrvload::Error::Schema(format!(
            "model columns {:?} do not match any feature model variant",
            fitted.feature_names
        ))
    })?;
    let matrix = encode(&records, &model_spec)?;
    let scaled = scaler.apply(&matrix);
    let proba = fitted.predict_proba(&scaled)?;
    let predictions = fitted.predict(&scaled)?;
    let hits = predictions.iter().zip(&scaled.labels).filter(|(p, t)| p == t).count();
    let accuracy = hits as f64 / predictions.len() as f64;

    let mut lines = vec!["row,activity,calories,true_class,predicted_class,p_low,p_medium,p_high".to_string()];
    for (i, record) in records.iter().enumerate() {
        lines.push(format!(
            "{},{},{},{},{},{},{},{}",
            i,
            record.activity,
            record.calories,
            scaled.labels[i],
            predictions[i],
            proba[i][0],
            proba[i][1],
            proba[i][2]
        ));
    }
    let path = cli.out_dir.join(format!("{stem}.predictions.csv"));
    std::fs::write(&path, lines.join("\n") + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    state.outputs.push(path.clone());

    state.summary = json!({
        "command": "predict",
        "rows": predictions.len(),
        "accuracy": accuracy,
        "predictions": path.display().to_string(),
    });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_compare_like(
    cli: &Cli,
    stem: &str,
    state: &mut RunState,
    data: &Path,
    models: Vec<ModelSpec>,
    specs: Vec<ClassifierSpec>,
    k: usize,
    test_fraction: f64,
) -> Result<()> {
    state.inputs.push(data.to_path_buf());
    let records = load_sessions(data)?;
    let protocol = CompareProtocol {
        k,
        test_fraction,
        seed: cli.seed,
    };
    let report = compare(&models, &specs, &records, &protocol)?;
    write_report_artifacts(&report, &cli.out_dir, stem, state)?;
    state.summary = summarize_report(&report, stem, &cli.out_dir);
    Ok(())
}

fn cmd_report(cli: &Cli, stem: &str, state: &mut RunState, from: &Path) -> Result<()> {
    state.inputs.push(from.to_path_buf());
    let text = std::fs::read_to_string(from).with_context(|| format!("reading {}", from.display()))?;
    let report: ComparisonReport = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a comparison report", from.display()))?;
    write_report_artifacts(&report, &cli.out_dir, stem, state)?;
    state.summary = summarize_report(&report, stem, &cli.out_dir);
    Ok(())
}

/// The full artifact family of a comparison: report JSON, summary CSVs,
/// and per-entry ROC/confusion plots with their raw point data.
fn write_report_artifacts(
    report: &ComparisonReport,
    out_dir: &Path,
    stem: &str,
    state: &mut RunState,
) -> Result<()> {
    fn emit<T>(
        outputs: &mut Vec<PathBuf>,
        path: PathBuf,
        result: hrvload::Result<T>,
    ) -> Result<()> {
        result.with_context(|| format!("writing {}", path.display()))?;
        outputs.push(path);
        Ok(())
    }
    let out = &mut state.outputs;

    let path = out_dir.join(format!("{stem}.report.json"));
    emit(out, path.clone(), write_json_report(report, &path))?;
    let path = out_dir.join(format!("{stem}.comparison.csv"));
    emit(out, path.clone(), write_comparison_csv(report, &path))?;
    let path = out_dir.join(format!("{stem}.cv.csv"));
    emit(out, path.clone(), write_cv_csv(report, &path))?;
    let path = out_dir.join(format!("{stem}.folds.csv"));
    emit(out, path.clone(), write_fold_csv(report, &path))?;

    for entry in &report.entries {
        let base = format!("{stem}.{}.{}", entry.model.tag(), entry.cv.method);
        let title = format!("{} / {}", entry.model.tag(), entry.cv.method);

        let path = out_dir.join(format!("{base}.roc.csv"));
        emit(out, path.clone(), write_roc_points_csv(&entry.roc, &path))?;
        let path = out_dir.join(format!("{base}.confusion.csv"));
        emit(out, path.clone(), write_confusion_csv(&entry.confusion, &path))?;

        let path = out_dir.join(format!("{base}.roc.svg"));
        let svg = roc_svg(&entry.roc, &format!("ROC — {title}"));
        emit(out, path.clone(), std::fs::write(&path, svg).map_err(Into::into))?;
        let path = out_dir.join(format!("{base}.confusion.svg"));
        let svg = confusion_svg(&entry.confusion, &format!("Confusion — {title}"));
        emit(out, path.clone(), std::fs::write(&path, svg).map_err(Into::into))?;
    }
    Ok(())
}

fn summarize_report(report: &ComparisonReport, stem: &str, out_dir: &Path) -> Value {
    let table: Vec<Value> = report
        .entries
        .iter()
        .map(|entry| {
            json!({
                "model": entry.model.tag(),
                "method": entry.cv.method,
                "cv_mean": entry.cv.mean,
                "auc_micro": entry.roc.report.auc_micro,
                "auc_macro": entry.roc.report.auc_macro,
                "accuracy": entry.holdout_accuracy,
            })
        })
        .collect();
    json!({
        "command": "compare",
        "entries": report.entries.len(),
        "report": out_dir.join(format!("{stem}.report.json")).display().to_string(),
        "results": table,
    })
}

fn print_summary(format: Format, summary: &Value) {
    match format {
        Format::Json => println!("{summary:#}"),
        Format::Csv => print_csv_summary(summary),
    }
}

fn csv_scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn print_csv_summary(summary: &Value) {
    let Some(map) = summary.as_object() else {
        println!("{summary}");
        return;
    };
    for (key, value) in map {
        match value.as_array() {
            Some(rows) if !rows.is_empty() && rows.iter().all(Value::is_object) => {
                let columns: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
                println!(
                    "{}",
                    columns.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(",")
                );
                for row in rows {
                    let cells: Vec<String> = columns
                        .iter()
                        .map(|c| csv_scalar(&row[c.as_str()]))
                        .collect();
                    println!("{}", cells.join(","));
                }
            }
            _ => println!("{key},{}", csv_scalar(value)),
        }
    }
}
