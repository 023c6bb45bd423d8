//! Session records, calorie binning, feature encoding, standardization,
//! stratified splitting, and CSV persistence.
//!
//! A [`SessionRecord`] is one training session: what happened during the
//! exercise (activity, distance, duration, heart rates, calories) plus the
//! nine post-exercise features of [`crate::hrv::HrvFeatures`]. Records fan
//! out into [`FeatureMatrix`] rows through a [`ModelSpec`], which fixes the
//! feature list and column order for each of the three model families.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hrv::HrvFeatures;
use crate::seed::derive_seed;

/// The three sport types in the dataset.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum ActivityType {
    Swim,
    Cycle,
    Run,
}

impl ActivityType {
    pub const ALL: [ActivityType; 3] = [ActivityType::Swim, ActivityType::Cycle, ActivityType::Run];

    pub fn name(self) -> &'static str {
        match self {
            ActivityType::Swim => "swim",
            ActivityType::Cycle => "cycle",
            ActivityType::Run => "run",
        }
    }

    pub fn index(self) -> usize {
        match self {
            ActivityType::Swim => 0,
            ActivityType::Cycle => 1,
            ActivityType::Run => 2,
        }
    }
}

impl fmt::Display for ActivityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swim" => Ok(ActivityType::Swim),
            "cycle" => Ok(ActivityType::Cycle),
            "run" => Ok(ActivityType::Run),
            other => Err(Error::InvalidInput(format!(
                "unknown activity {other:?}; expected swim, cycle, or run"
            ))),
        }
    }
}

/// Training-load class, ordered Low < Medium < High.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum LoadClass {
    Low,
    Medium,
    High,
}

impl LoadClass {
    pub const ALL: [LoadClass; 3] = [LoadClass::Low, LoadClass::Medium, LoadClass::High];

    pub fn name(self) -> &'static str {
        match self {
            LoadClass::Low => "low",
            LoadClass::Medium => "medium",
            LoadClass::High => "high",
        }
    }

    pub fn index(self) -> usize {
        match self {
            LoadClass::Low => 0,
            LoadClass::Medium => 1,
            LoadClass::High => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<LoadClass> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for LoadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Calorie bounds: a session burns more than 0 and at most 4000 kcal.
pub const MAX_CALORIES: f64 = 4000.0;

/// Maps burned calories to a load class with half-open bins:
/// [0, 400) low, [400, 1000) medium, [1000, 4000] high.
pub fn bin_calories(calories: f64) -> Result<LoadClass> {
    if !calories.is_finite() || calories <= 0.0 || calories > MAX_CALORIES {
        return Err(Error::OutOfRange(format!(
            "calories must lie in (0, {MAX_CALORIES}], got {calories}"
        )));
    }
    Ok(if calories < 400.0 {
        LoadClass::Low
    } else if calories < 1000.0 {
        LoadClass::Medium
    } else {
        LoadClass::High
    })
}

/// One recorded training session: in-exercise measurements plus the
/// post-exercise heart features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub activity: ActivityType,
    /// Covered distance, meters.
    pub distance_m: f64,
    /// Session duration, seconds.
    pub duration_s: f64,
    /// Average in-exercise heart rate, beats/min.
    pub ahr: f64,
    /// Maximum in-exercise heart rate, beats/min.
    pub mhr: f64,
    /// Burned calories, kcal.
    pub calories: f64,
    /// Features of the post-exercise RR recording.
    pub post: HrvFeatures,
}

impl SessionRecord {
    /// Checks the physiological bounds on the in-exercise fields.
    pub fn validate(&self) -> Result<()> {
        fn check(name: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
            if !value.is_finite() || value < lo || value > hi {
                return Err(Error::OutOfRange(format!(
                    "{name} must lie in [{lo}, {hi}], got {value}"
                )));
            }
            Ok(())
        }
        check("distance_m", self.distance_m, 300.0, 200_000.0)?;
        check("duration_s", self.duration_s, 600.0, 32_400.0)?;
        check("ahr", self.ahr, 45.0, 195.0)?;
        check("mhr", self.mhr, 45.0, 195.0)?;
        if self.mhr < self.ahr {
            return Err(Error::OutOfRange(format!(
                "mhr ({}) must be at least ahr ({})",
                self.mhr, self.ahr
            )));
        }
        if !self.calories.is_finite() || self.calories <= 0.0 || self.calories > MAX_CALORIES {
            return Err(Error::OutOfRange(format!(
                "calories must lie in (0, {MAX_CALORIES}], got {}",
                self.calories
            )));
        }
        Ok(())
    }

    pub fn load_class(&self) -> Result<LoadClass> {
        bin_calories(self.calories)
    }
}

/// Quantities derived from the in-exercise measurements: training impulse
/// I = minutes × AHR (total heartbeats), velocity V = D/T in m/s, and
/// power-proxy P = V².
pub fn derive_in_exercise(record: &SessionRecord) -> (f64, f64, f64) {
    let impulse = record.duration_s / 60.0 * record.ahr;
    let velocity = record.distance_m / record.duration_s;
    (impulse, velocity, velocity * velocity)
}

/// The three model families, named by which measurements they may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    /// In-exercise measurements and their derived quantities.
    InExerciseFull,
    /// All nine post-exercise features (minus SDSD's close cousin usage; see
    /// the feature list on [`ModelSpec`]).
    PostFull,
    /// The four-feature post-exercise subset.
    PostShort,
}

impl ModelId {
    pub const ALL: [ModelId; 3] = [ModelId::InExerciseFull, ModelId::PostFull, ModelId::PostShort];

    pub fn id(self) -> &'static str {
        match self {
            ModelId::InExerciseFull => "in_full",
            ModelId::PostFull => "post_full",
            ModelId::PostShort => "post_short",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in_full" => Ok(ModelId::InExerciseFull),
            "post_full" => Ok(ModelId::PostFull),
            "post_short" => Ok(ModelId::PostShort),
            other => Err(Error::InvalidInput(format!(
                "unknown model id {other:?}; expected in_full, post_full, or post_short"
            ))),
        }
    }
}

/// A model family plus the choice of including the activity one-hot block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model_id: ModelId,
    pub include_activity: bool,
}

impl ModelSpec {
    pub fn new(model_id: ModelId, include_activity: bool) -> Self {
        Self {
            model_id,
            include_activity,
        }
    }

    /// Numeric feature names in their fixed order (after any one-hot block).
    pub fn numeric_columns(&self) -> &'static [&'static str] {
        match self.model_id {
            ModelId::InExerciseFull => &[
                "distance_m",
                "duration_s",
                "ahr",
                "mhr",
                "impulse",
                "velocity",
                "power",
            ],
            ModelId::PostFull => &[
                "avnn", "sdnn", "rmssd", "nn50", "pnn50", "hrv_index", "rahr", "rmhr",
            ],
            ModelId::PostShort => &["avnn", "sdnn", "rmssd", "hrv_index"],
        }
    }

    /// Full ordered column list, activity one-hot first when included.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.include_activity {
            for a in ActivityType::ALL {
                names.push(format!("activity_{}", a.name()));
            }
        }
        names.extend(self.numeric_columns().iter().map(|s| s.to_string()));
        names
    }

    pub fn n_columns(&self) -> usize {
        self.numeric_columns().len() + if self.include_activity { 3 } else { 0 }
    }

    /// Short tag for file names and report rows, e.g. `post_full+A`.
    pub fn tag(&self) -> String {
        format!(
            "{}{}",
            self.model_id.id(),
            if self.include_activity { "+A" } else { "-A" }
        )
    }

    /// The variant whose column list equals `columns` exactly, if any —
    /// lets a persisted model find its feature encoding again.
    pub fn infer_from_columns(columns: &[String]) -> Option<ModelSpec> {
        ModelId::ALL
            .into_iter()
            .flat_map(|id| [ModelSpec::new(id, true), ModelSpec::new(id, false)])
            .find(|spec| spec.column_names() == columns)
    }

    fn numeric_row(&self, record: &SessionRecord) -> Vec<f64> {
        let p = &record.post;
        match self.model_id {
            ModelId::InExerciseFull => {
                let (impulse, velocity, power) = derive_in_exercise(record);
                vec![
                    record.distance_m,
                    record.duration_s,
                    record.ahr,
                    record.mhr,
                    impulse,
                    velocity,
                    power,
                ]
            }
            ModelId::PostFull => vec![
                p.avnn,
                p.sdnn,
                p.rmssd,
                f64::from(p.nn50),
                p.pnn50,
                p.hrv_index,
                p.rahr,
                p.rmhr,
            ],
            ModelId::PostShort => vec![p.avnn, p.sdnn, p.rmssd, p.hrv_index],
        }
    }
}

/// Encoded rows with their class labels.
///
/// `one_hot_columns` counts the leading activity indicator columns (0 or 3);
/// standardization leaves them untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub column_names: Vec<String>,
    pub one_hot_columns: usize,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<LoadClass>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.column_names.len()
    }

    /// New matrix with the rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            column_names: self.column_names.clone(),
            one_hot_columns: self.one_hot_columns,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Distinct classes present, in Low < Medium < High order.
    pub fn present_classes(&self) -> Vec<LoadClass> {
        LoadClass::ALL
            .into_iter()
            .filter(|c| self.labels.contains(c))
            .collect()
    }
}

/// Encodes sessions into the feature matrix of `spec`; labels come from
/// calorie binning.
pub fn encode(records: &[SessionRecord], spec: &ModelSpec) -> Result<FeatureMatrix> {
    if records.is_empty() {
        return Err(Error::InvalidInput(
            "cannot encode an empty record list".into(),
        ));
    }
    let mut rows = Vec::with_capacity(records.len());
    let mut labels = Vec::with_capacity(records.len());
    for record in records {
        let mut row = Vec::with_capacity(spec.n_columns());
        if spec.include_activity {
            for a in ActivityType::ALL {
                row.push(if record.activity == a { 1.0 } else { 0.0 });
            }
        }
        row.extend(spec.numeric_row(record));
        rows.push(row);
        labels.push(record.load_class()?);
    }
    Ok(FeatureMatrix {
        column_names: spec.column_names(),
        one_hot_columns: if spec.include_activity { 3 } else { 0 },
        rows,
        labels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    pub std: f64,
}

/// Per-column z-scoring parameters fitted on a training matrix.
///
/// The map holds only columns that actually get scaled: one-hot indicator
/// columns and zero-variance columns are omitted and pass through unchanged.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Scaler {
    pub columns: BTreeMap<String, ColumnStats>,
}

impl Scaler {
    /// Fits means and population standard deviations on the training matrix.
    pub fn fit(train: &FeatureMatrix) -> Scaler {
        let n = train.n_rows() as f64;
        let mut columns = BTreeMap::new();
        for (j, name) in train.column_names.iter().enumerate() {
            if j < train.one_hot_columns {
                continue;
            }
            let mean = train.rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = train.rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            if std > 0.0 {
                columns.insert(name.clone(), ColumnStats { mean, std });
            }
        }
        Scaler { columns }
    }

    /// Applies the stored parameters; columns without parameters pass through.
    pub fn apply(&self, matrix: &FeatureMatrix) -> FeatureMatrix {
        let stats: Vec<Option<&ColumnStats>> = matrix
            .column_names
            .iter()
            .map(|name| self.columns.get(name))
            .collect();
        let rows = matrix
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&stats)
                    .map(|(&x, s)| match s {
                        Some(s) => (x - s.mean) / s.std,
                        None => x,
                    })
                    .collect()
            })
            .collect();
        FeatureMatrix {
            column_names: matrix.column_names.clone(),
            one_hot_columns: matrix.one_hot_columns,
            rows,
            labels: matrix.labels.clone(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(file, self)
            .map_err(|e| Error::InvalidInput(format!("cannot write scaler: {e}")))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Scaler> {
        let file = BufReader::new(File::open(path)?);
        serde_json::from_reader(file).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: format!("invalid scaler document: {e}"),
        })
    }
}

/// Fits a scaler on `train` and applies it to `train` and every matrix in
/// `others` (validation or test sets), so nothing leaks from held-out rows.
pub fn standardize(
    train: &FeatureMatrix,
    others: &[&FeatureMatrix],
) -> (FeatureMatrix, Vec<FeatureMatrix>, Scaler) {
    let scaler = Scaler::fit(train);
    let scaled_train = scaler.apply(train);
    let scaled_others = others.iter().map(|m| scaler.apply(m)).collect();
    (scaled_train, scaled_others, scaler)
}

/// Splits row indices per class, deterministically under `seed`.
///
/// Each class keeps round(n_c × test_fraction) rows for the test side,
/// clamped so both sides get at least one row per class. Returned index
/// lists are sorted ascending.
pub fn stratified_split_indices(
    labels: &[LoadClass],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in LoadClass::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::Stratification(format!(
                "class {class} has {} member(s); need at least 2 to split",
                members.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, class.index() as u64));
        members.shuffle(&mut rng);
        let n = members.len();
        let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Stratified train/test split of a whole matrix.
pub fn stratified_split(
    matrix: &FeatureMatrix,
    test_fraction: f64,
    seed: u64,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    let (train_idx, test_idx) = stratified_split_indices(&matrix.labels, test_fraction, seed)?;
    Ok((matrix.select(&train_idx), matrix.select(&test_idx)))
}

/// Column order of the sessions CSV schema.
pub const SESSIONS_HEADER: [&str; 15] = [
    "activity",
    "distance_m",
    "duration_s",
    "ahr",
    "mhr",
    "calories",
    "avnn",
    "sdnn",
    "rmssd",
    "sdsd",
    "nn50",
    "pnn50",
    "hrv_index",
    "rahr",
    "rmhr",
];

/// Writes sessions as CSV under the fixed schema.
pub fn save_sessions(records: &[SessionRecord], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", SESSIONS_HEADER.join(","))?;
    for r in records {
        let p = &r.post;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.activity,
            r.distance_m,
            r.duration_s,
            r.ahr,
            r.mhr,
            r.calories,
            p.avnn,
            p.sdnn,
            p.rmssd,
            p.sdsd,
            p.nn50,
            p.pnn50,
            p.hrv_index,
            p.rahr,
            p.rmhr
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Reads sessions from CSV, reporting malformed rows with their line number
/// and rejecting records that fail validation.
pub fn load_sessions(path: &Path) -> Result<Vec<SessionRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: e.to_string(),
        })?;

    let header = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let expected: Vec<&str> = SESSIONS_HEADER.to_vec();
    let found: Vec<&str> = header.iter().collect();
    if found != expected {
        let missing: Vec<&str> = expected
            .iter()
            .filter(|c| !found.contains(c))
            .copied()
            .collect();
        let unexpected: Vec<&str> = found
            .iter()
            .filter(|c| !expected.contains(c))
            .copied()
            .collect();
        let mut message = format!("{}:", path.display());
        if !missing.is_empty() {
            message.push_str(&format!(" missing column(s): {}.", missing.join(", ")));
        }
        if !unexpected.is_empty() {
            message.push_str(&format!(" unexpected column(s): {}.", unexpected.join(", ")));
        }
        if missing.is_empty() && unexpected.is_empty() {
            message.push_str(" columns are out of order.");
        }
        message.push_str(&format!(" expected header: {}", expected.join(",")));
        return Err(Error::Schema(message));
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if row.len() != SESSIONS_HEADER.len() {
            return Err(parse_err(format!(
                "expected {} fields, found {}",
                SESSIONS_HEADER.len(),
                row.len()
            )));
        }
        let field = |i: usize| row.get(i).unwrap_or_default();
        let num = |i: usize| -> Result<f64> {
            field(i).parse::<f64>().map_err(|_| {
                parse_err(format!(
                    "column {:?}: expected a number, got {:?}",
                    SESSIONS_HEADER[i],
                    field(i)
                ))
            })
        };
        let activity = field(0)
            .parse::<ActivityType>()
            .map_err(|e| parse_err(e.to_string()))?;
        let nn50 = field(10).parse::<u32>().map_err(|_| {
            parse_err(format!(
                "column \"nn50\": expected a non-negative integer, got {:?}",
                field(10)
            ))
        })?;
        let record = SessionRecord {
            activity,
            distance_m: num(1)?,
            duration_s: num(2)?,
            ahr: num(3)?,
            mhr: num(4)?,
            calories: num(5)?,
            post: HrvFeatures {
                avnn: num(6)?,
                sdnn: num(7)?,
                rmssd: num(8)?,
                sdsd: num(9)?,
                nn50,
                pnn50: num(11)?,
                hrv_index: num(12)?,
                rahr: num(13)?,
                rmhr: num(14)?,
            },
        };
        record.validate().map_err(|e| parse_err(e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}
