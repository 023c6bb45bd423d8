//! C ABI over the core toolkit: build or load RR-interval series, extract
//! the nine HRV features, and run saved classifiers on raw feature rows.
//!
//! Conventions: constructors return NULL on failure, every other fallible
//! call returns an [`HlStatus`], and the message of the most recent failure
//! on the current thread is available from [`hl_last_error`]. Handles are
//! opaque and must be released with their matching `hl_*_free`. The header
//! `include/hrvload.h` is regenerated from this file on every build.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use hrvload::classify::TrainedModel;
use hrvload::data::{FeatureMatrix, LoadClass, Scaler};
use hrvload::hrv::{extract_all, read_rr_file, RRSeries};

/// Histogram bin width in milliseconds conventionally used by the HRV
/// triangular index (1/128 s sampling).
pub const HL_DEFAULT_BIN_WIDTH_MS: f64 = 7.8125;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// The input values violate a documented bound.
    InvalidInput = 2,
    /// A file exists but its contents are malformed.
    ParseError = 3,
    /// A document has the wrong columns or shape.
    SchemaMismatch = 4,
    IoError = 5,
    /// A model document is unreadable or has the wrong format version.
    ModelError = 6,
    /// The library itself failed; report this as a bug.
    InternalError = 7,
}

/// An RR-interval recording. Create with [`hl_rr_from_intervals`] or
/// [`hl_rr_load`], release with [`hl_rr_free`].
pub struct HlRrSeries(RRSeries);

/// A trained classifier together with the feature scaler it was trained
/// behind. Create with [`hl_model_load`], release with [`hl_model_free`].
pub struct HlModel {
    model: TrainedModel,
    scaler: Scaler,
    feature_names: Vec<CString>,
}

/// The nine features of one RR recording.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlHrvFeatures {
    /// Mean interval, ms.
    pub avnn: f64,
    /// Population standard deviation of the intervals, ms.
    pub sdnn: f64,
    /// Root mean square of successive differences, ms.
    pub rmssd: f64,
    /// Population standard deviation of successive differences, ms.
    pub sdsd: f64,
    /// Successive differences larger than 50 ms in magnitude.
    pub nn50: u32,
    /// NN50 as a fraction of the interval count.
    pub pnn50: f64,
    /// Interval count over the modal histogram bin count.
    pub hrv_index: f64,
    /// Mean instantaneous heart rate, beats/min.
    pub rahr: f64,
    /// Peak instantaneous heart rate, beats/min.
    pub rmhr: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let mut bytes = message.into_bytes();
    // interior NULs cannot appear in a C string
    bytes.retain(|&b| b != 0);
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(bytes).unwrap());
}

fn fail(status: HlStatus, message: impl std::fmt::Display) -> HlStatus {
    set_error(message.to_string());
    status
}

fn status_of(error: &hrvload::Error) -> HlStatus {
    use hrvload::Error;
    match error {
        Error::Parse { .. } => HlStatus::ParseError,
        Error::Schema(_) => HlStatus::SchemaMismatch,
        Error::Io(_) => HlStatus::IoError,
        Error::ModelLoad(_) => HlStatus::ModelError,
        _ => HlStatus::InvalidInput,
    }
}

/// Runs `body` with a panic guard: unwinding must never cross the ABI.
fn guarded<T>(fallback: T, body: impl FnOnce() -> T) -> T {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(value) => value,
        Err(_) => {
            set_error("internal panic; report this as a bug".to_string());
            fallback
        }
    }
}

fn utf8_path<'a>(raw: *const c_char) -> Result<&'a Path, HlStatus> {
    // SAFETY: the caller passes a NUL-terminated string (checked non-NULL)
    let bytes = unsafe { CStr::from_ptr(raw) };
    match bytes.to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => Err(fail(HlStatus::InvalidInput, "path is not valid UTF-8")),
    }
}

/// Message of the most recent failure on this thread, NUL-terminated and
/// empty when nothing failed yet. The pointer stays valid until the next
/// failing `hl_*` call on the same thread.
#[no_mangle]
pub extern "C" fn hl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Builds an RR series from `len` intervals in milliseconds. Intervals
/// must be finite and inside (0, 3000) ms. Returns NULL on failure.
#[no_mangle]
pub unsafe extern "C" fn hl_rr_from_intervals(
    intervals: *const f64,
    len: usize,
) -> *mut HlRrSeries {
    if intervals.is_null() {
        fail(HlStatus::NullArgument, "intervals is NULL");
        return ptr::null_mut();
    }
    let values = unsafe { std::slice::from_raw_parts(intervals, len) }.to_vec();
    guarded(ptr::null_mut(), || match RRSeries::new(values) {
        Ok(rr) => Box::into_raw(Box::new(HlRrSeries(rr))),
        Err(e) => {
            fail(status_of(&e), e);
            ptr::null_mut()
        }
    })
}

/// Reads an RR recording file: one interval in milliseconds per line,
/// optionally headed by `rr_ms`. Returns NULL on failure.
#[no_mangle]
pub unsafe extern "C" fn hl_rr_load(path: *const c_char) -> *mut HlRrSeries {
    if path.is_null() {
        fail(HlStatus::NullArgument, "path is NULL");
        return ptr::null_mut();
    }
    let path = match utf8_path(path) {
        Ok(p) => p,
        Err(_) => return ptr::null_mut(),
    };
    guarded(ptr::null_mut(), || match read_rr_file(path) {
        Ok(rr) => Box::into_raw(Box::new(HlRrSeries(rr))),
        Err(e) => {
            fail(status_of(&e), e);
            ptr::null_mut()
        }
    })
}

/// Number of intervals in the series; 0 when `series` is NULL.
#[no_mangle]
pub unsafe extern "C" fn hl_rr_len(series: *const HlRrSeries) -> usize {
    if series.is_null() {
        return 0;
    }
    unsafe { &*series }.0.len()
}

/// Releases a series. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn hl_rr_free(series: *mut HlRrSeries) {
    if !series.is_null() {
        drop(unsafe { Box::from_raw(series) });
    }
}

/// Extracts the nine HRV features into `*out`. Pass
/// [`HL_DEFAULT_BIN_WIDTH_MS`] as the histogram bin width unless another
/// width is required; the series needs at least 3 intervals.
#[no_mangle]
pub unsafe extern "C" fn hl_hrv_compute(
    series: *const HlRrSeries,
    bin_width_ms: f64,
    out: *mut HlHrvFeatures,
) -> HlStatus {
    if series.is_null() || out.is_null() {
        return fail(HlStatus::NullArgument, "series or out is NULL");
    }
    let series = unsafe { &*series };
    guarded(HlStatus::InternalError, || {
        match extract_all(&series.0, bin_width_ms) {
            Ok(f) => {
                unsafe {
                    *out = HlHrvFeatures {
                        avnn: f.avnn,
                        sdnn: f.sdnn,
                        rmssd: f.rmssd,
                        sdsd: f.sdsd,
                        nn50: f.nn50,
                        pnn50: f.pnn50,
                        hrv_index: f.hrv_index,
                        rahr: f.rahr,
                        rmhr: f.rmhr,
                    };
                }
                HlStatus::Ok
            }
            Err(e) => fail(status_of(&e), e),
        }
    })
}

/// Loads a trained model and its scaler from the JSON documents written
/// by `hrvload train`. Returns NULL on failure.
#[no_mangle]
pub unsafe extern "C" fn hl_model_load(
    model_path: *const c_char,
    scaler_path: *const c_char,
) -> *mut HlModel {
    if model_path.is_null() || scaler_path.is_null() {
        fail(HlStatus::NullArgument, "model_path or scaler_path is NULL");
        return ptr::null_mut();
    }
    let (model_path, scaler_path) = match (utf8_path(model_path), utf8_path(scaler_path)) {
        (Ok(m), Ok(s)) => (m, s),
        _ => return ptr::null_mut(),
    };
    guarded(ptr::null_mut(), || {
        let model = match TrainedModel::load(model_path) {
            Ok(m) => m,
            Err(e) => {
                fail(status_of(&e), e);
                return ptr::null_mut();
            }
        };
        let scaler = match Scaler::load(scaler_path) {
            Ok(s) => s,
            Err(e) => {
                fail(status_of(&e), e);
                return ptr::null_mut();
            }
        };
        let feature_names = model
            .feature_names
            .iter()
            .map(|n| CString::new(n.as_str()).unwrap_or_default())
            .collect();
        Box::into_raw(Box::new(HlModel {
            model,
            scaler,
            feature_names,
        }))
    })
}

/// Releases a model. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn hl_model_free(model: *mut HlModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Number of input features the model expects; 0 when `model` is NULL.
#[no_mangle]
pub unsafe extern "C" fn hl_model_n_features(model: *const HlModel) -> usize {
    if model.is_null() {
        return 0;
    }
    unsafe { &*model }.model.feature_names.len()
}

/// Number of load classes (the probability row width). Always 3: low,
/// medium, high.
#[no_mangle]
pub extern "C" fn hl_model_n_classes(model: *const HlModel) -> usize {
    let _ = model;
    LoadClass::ALL.len()
}

/// Name of input feature `index`, matching the training column order.
/// The pointer stays valid while the model lives; NULL when out of range.
#[no_mangle]
pub unsafe extern "C" fn hl_model_feature_name(
    model: *const HlModel,
    index: usize,
) -> *const c_char {
    if model.is_null() {
        return ptr::null();
    }
    match unsafe { &*model }.feature_names.get(index) {
        Some(name) => name.as_ptr(),
        None => ptr::null(),
    }
}

/// Static name of class `index`: "low", "medium", "high". NULL when out
/// of range.
#[no_mangle]
pub extern "C" fn hl_class_name(index: usize) -> *const c_char {
    const NAMES: [&str; 3] = ["low\0", "medium\0", "high\0"];
    match NAMES.get(index) {
        Some(name) => name.as_ptr() as *const c_char,
        None => ptr::null(),
    }
}

/// Shared predict path: scale one raw feature row and run the model.
fn predict_row(handle: &HlModel, row: &[f64]) -> Result<(LoadClass, Vec<f64>), (HlStatus, String)> {
    let expected = handle.model.feature_names.len();
    if row.len() != expected {
        return Err((
            HlStatus::InvalidInput,
            format!("expected {expected} features, got {}", row.len()),
        ));
    }
    let matrix = FeatureMatrix {
        column_names: handle.model.feature_names.clone(),
        one_hot_columns: 0,
        rows: vec![row.to_vec()],
        // labels are carried along but never read on the predict path
        labels: vec![LoadClass::Low],
    };
    let scaled = handle.scaler.apply(&matrix);
    let proba = handle
        .model
        .predict_proba(&scaled)
        .map_err(|e| (status_of(&e), e.to_string()))?;
    let predicted = handle
        .model
        .predict(&scaled)
        .map_err(|e| (status_of(&e), e.to_string()))?[0];
    // re-key the probability row from the model's class order onto the
    // fixed low/medium/high axis
    let mut by_class = vec![0.0; LoadClass::ALL.len()];
    for (class, p) in handle.model.class_order.iter().zip(&proba[0]) {
        by_class[class.index()] = *p;
    }
    Ok((predicted, by_class))
}

/// Predicts the load class of one raw (unscaled) feature row laid out in
/// the model's column order; writes the class index (0 low, 1 medium,
/// 2 high) to `*class_index`.
#[no_mangle]
pub unsafe extern "C" fn hl_model_predict(
    model: *const HlModel,
    features: *const f64,
    len: usize,
    class_index: *mut usize,
) -> HlStatus {
    if model.is_null() || features.is_null() || class_index.is_null() {
        return fail(HlStatus::NullArgument, "model, features, or class_index is NULL");
    }
    let handle = unsafe { &*model };
    let row = unsafe { std::slice::from_raw_parts(features, len) };
    guarded(HlStatus::InternalError, || match predict_row(handle, row) {
        Ok((predicted, _)) => {
            unsafe { *class_index = predicted.index() };
            HlStatus::Ok
        }
        Err((status, message)) => fail(status, message),
    })
}

/// Class probabilities of one raw feature row; fills `proba` (length
/// [`hl_model_n_classes`]) indexed 0 low, 1 medium, 2 high.
#[no_mangle]
pub unsafe extern "C" fn hl_model_predict_proba(
    model: *const HlModel,
    features: *const f64,
    len: usize,
    proba: *mut f64,
) -> HlStatus {
    if model.is_null() || features.is_null() || proba.is_null() {
        return fail(HlStatus::NullArgument, "model, features, or proba is NULL");
    }
    let handle = unsafe { &*model };
    let row = unsafe { std::slice::from_raw_parts(features, len) };
    guarded(HlStatus::InternalError, || match predict_row(handle, row) {
        Ok((_, by_class)) => {
            let out = unsafe { std::slice::from_raw_parts_mut(proba, by_class.len()) };
            out.copy_from_slice(&by_class);
            HlStatus::Ok
        }
        Err((status, message)) => fail(status, message),
    })
}
