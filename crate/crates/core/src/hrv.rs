//! Time-domain features of a short RR-interval recording.
//!
//! All metrics are computed from the beat-to-beat intervals of a roughly
//! one-minute post-exercise recording: AVNN, SDNN, RMSSD, SDSD, NN50, pNN50,
//! the triangular HRV index, and the mean/maximum instantaneous heart rate
//! (RAHR, RMHR). Standard deviations use the population form (divide by N).

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default histogram bin width for the triangular index: 1/128 s.
pub const DEFAULT_BIN_WIDTH_MS: f64 = 7.8125;

/// Physiological bounds on a single interval, exclusive on both ends.
pub const MIN_INTERVAL_MS: f64 = 0.0;
pub const MAX_INTERVAL_MS: f64 = 3000.0;

/// An ordered series of beat-to-beat intervals in milliseconds.
///
/// Construction validates the physiological bounds, so every
/// `RRSeries` the metric functions see is already well-formed.
#[derive(Debug, Clone, PartialEq)]
pub struct RRSeries {
    intervals: Vec<f64>,
    recording_window_s: f64,
}

impl RRSeries {
    /// Builds a series with the nominal 60 s recording window.
    ///
    /// Rejects series shorter than two intervals and any interval outside
    /// (0, 3000) ms; garbage beats must be cleaned upstream.
    pub fn new(intervals: Vec<f64>) -> Result<Self> {
        Self::with_window(intervals, 60.0)
    }

    pub fn with_window(intervals: Vec<f64>, recording_window_s: f64) -> Result<Self> {
        if intervals.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "an RR series needs at least 2 intervals, got {}",
                intervals.len()
            )));
        }
        for (i, &x) in intervals.iter().enumerate() {
            if !x.is_finite() || x <= MIN_INTERVAL_MS || x >= MAX_INTERVAL_MS {
                return Err(Error::InvalidInput(format!(
                    "interval #{i} is {x} ms, outside ({MIN_INTERVAL_MS}, {MAX_INTERVAL_MS}) ms"
                )));
            }
        }
        if !recording_window_s.is_finite() || recording_window_s <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "recording window must be positive, got {recording_window_s} s"
            )));
        }
        Ok(Self {
            intervals,
            recording_window_s,
        })
    }

    pub fn intervals(&self) -> &[f64] {
        &self.intervals
    }

    pub fn recording_window_s(&self) -> f64 {
        self.recording_window_s
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Successive differences `x[i+1] - x[i]`, of length N-1.
    pub fn successive_differences(&self) -> Vec<f64> {
        self.intervals.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Which denominator pNN50 uses.
///
/// The interval count N is the default; the pair count N-1 is the common
/// alternative in the HRV literature and is available as a switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pnn50Denominator {
    #[default]
    Intervals,
    Pairs,
}

/// The nine scalar features of a post-exercise recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HrvFeatures {
    /// Mean interval, ms.
    pub avnn: f64,
    /// Population standard deviation of the intervals, ms.
    pub sdnn: f64,
    /// Root mean square of successive differences, ms.
    pub rmssd: f64,
    /// Population standard deviation of successive differences, ms.
    pub sdsd: f64,
    /// Count of successive pairs differing by more than 50 ms.
    pub nn50: u32,
    /// NN50 divided by the interval count, in [0, 1].
    pub pnn50: f64,
    /// Triangular index: interval count over the modal histogram bin count.
    pub hrv_index: f64,
    /// Mean instantaneous heart rate, beats/min.
    pub rahr: f64,
    /// Maximum instantaneous heart rate, beats/min.
    pub rmhr: f64,
}

/// Mean of all intervals, ms.
pub fn compute_avnn(rr: &RRSeries) -> f64 {
    mean(rr.intervals())
}

/// Population standard deviation of all intervals, ms.
pub fn compute_sdnn(rr: &RRSeries) -> f64 {
    population_std(rr.intervals())
}

/// Root mean square of the N-1 successive differences, ms.
pub fn compute_rmssd(rr: &RRSeries) -> f64 {
    let diffs = rr.successive_differences();
    let mean_sq = diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64;
    mean_sq.sqrt()
}

/// Population standard deviation of the successive differences, ms.
///
/// Needs at least two differences, i.e. a series of three or more intervals.
pub fn compute_sdsd(rr: &RRSeries) -> Result<f64> {
    if rr.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "SDSD needs at least 3 intervals (two differences), got {}",
            rr.len()
        )));
    }
    Ok(population_std(&rr.successive_differences()))
}

/// Count of successive pairs whose absolute difference strictly exceeds 50 ms.
pub fn compute_nn50(rr: &RRSeries) -> u32 {
    rr.successive_differences()
        .iter()
        .filter(|d| d.abs() > 50.0)
        .count() as u32
}

/// NN50 over the interval count N.
pub fn compute_pnn50(rr: &RRSeries) -> f64 {
    compute_pnn50_with(rr, Pnn50Denominator::Intervals)
}

/// NN50 over the chosen denominator (interval count or pair count).
pub fn compute_pnn50_with(rr: &RRSeries, denominator: Pnn50Denominator) -> f64 {
    let denom = match denominator {
        Pnn50Denominator::Intervals => rr.len(),
        Pnn50Denominator::Pairs => rr.len() - 1,
    };
    f64::from(compute_nn50(rr)) / denom as f64
}

/// Triangular index: N divided by the modal bin count of the interval
/// histogram. Bins are anchored at 0 ms; interval x falls in bin
/// floor(x / bin_width).
pub fn compute_hrv_index(rr: &RRSeries, bin_width_ms: f64) -> Result<f64> {
    if !bin_width_ms.is_finite() || bin_width_ms <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "histogram bin width must be positive, got {bin_width_ms}"
        )));
    }
    let mut counts = std::collections::BTreeMap::new();
    for &x in rr.intervals() {
        let bin = (x / bin_width_ms).floor() as i64;
        *counts.entry(bin).or_insert(0usize) += 1;
    }
    let modal = counts.values().copied().max().unwrap_or(1);
    Ok(rr.len() as f64 / modal as f64)
}

/// Mean instantaneous heart rate, where an interval of x ms beats at
/// 60000/x beats per minute.
pub fn compute_rahr(rr: &RRSeries) -> f64 {
    rr.intervals().iter().map(|x| 60_000.0 / x).sum::<f64>() / rr.len() as f64
}

/// Maximum instantaneous heart rate: 60000 over the shortest interval.
pub fn compute_rmhr(rr: &RRSeries) -> f64 {
    let min = rr
        .intervals()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    60_000.0 / min
}

/// Computes all nine features with the default pNN50 denominator.
pub fn extract_all(rr: &RRSeries, bin_width_ms: f64) -> Result<HrvFeatures> {
    extract_all_with(rr, bin_width_ms, Pnn50Denominator::Intervals)
}

pub fn extract_all_with(
    rr: &RRSeries,
    bin_width_ms: f64,
    denominator: Pnn50Denominator,
) -> Result<HrvFeatures> {
    Ok(HrvFeatures {
        avnn: compute_avnn(rr),
        sdnn: compute_sdnn(rr),
        rmssd: compute_rmssd(rr),
        sdsd: compute_sdsd(rr)?,
        nn50: compute_nn50(rr),
        pnn50: compute_pnn50_with(rr, denominator),
        hrv_index: compute_hrv_index(rr, bin_width_ms)?,
        rahr: compute_rahr(rr),
        rmhr: compute_rmhr(rr),
    })
}

/// Reads an RR-interval file: one interval in milliseconds per line,
/// optionally preceded by a `rr_ms` header line. Blank lines are ignored.
pub fn read_rr_file(path: &Path) -> Result<RRSeries> {
    let file = File::open(path).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    let mut intervals = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if idx == 0 && text == "rr_ms" {
            continue;
        }
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message: format!("expected an interval in milliseconds, got {text:?}"),
        })?;
        if !value.is_finite() || value <= MIN_INTERVAL_MS || value >= MAX_INTERVAL_MS {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: format!(
                    "interval {value} ms outside ({MIN_INTERVAL_MS}, {MAX_INTERVAL_MS}) ms"
                ),
            });
        }
        intervals.push(value);
    }
    RRSeries::new(intervals).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn series(xs: &[f64]) -> RRSeries {
        RRSeries::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn rejects_short_and_out_of_range_series() {
        assert!(RRSeries::new(vec![]).is_err());
        assert!(RRSeries::new(vec![800.0]).is_err());
        assert!(RRSeries::new(vec![800.0, -5.0]).is_err());
        assert!(RRSeries::new(vec![800.0, 0.0]).is_err());
        assert!(RRSeries::new(vec![800.0, 3000.0]).is_err());
        assert!(RRSeries::new(vec![800.0, f64::NAN]).is_err());
        assert!(RRSeries::new(vec![800.0, 2999.9]).is_ok());
    }

    #[test]
    fn avnn_constant_and_hand_computed() {
        assert_relative_eq!(compute_avnn(&series(&[800.0; 4])), 800.0);
        // (800 + 860 + 790) / 3
        assert_relative_eq!(
            compute_avnn(&series(&[800.0, 860.0, 790.0])),
            2450.0 / 3.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sdnn_zero_variance_and_two_point() {
        assert_relative_eq!(compute_sdnn(&series(&[800.0; 3])), 0.0);
        // mean 800, deviations +-100, population std
        assert_relative_eq!(compute_sdnn(&series(&[700.0, 900.0])), 100.0);
    }

    #[test]
    fn sdnn_scales_homogeneously() {
        let base = [700.0, 820.0, 760.0, 900.0];
        let scaled: Vec<f64> = base.iter().map(|x| x * 1.5).collect();
        assert_relative_eq!(
            compute_sdnn(&series(&scaled)),
            1.5 * compute_sdnn(&series(&base)),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rmssd_hand_computed() {
        assert_relative_eq!(compute_rmssd(&series(&[800.0; 4])), 0.0);
        // diffs 60 and -70: sqrt((3600 + 4900) / 2)
        assert_relative_eq!(
            compute_rmssd(&series(&[800.0, 860.0, 790.0])),
            (4250.0f64).sqrt(),
            max_relative = 1e-12
        );
        // single difference: rms equals |diff|
        assert_relative_eq!(compute_rmssd(&series(&[700.0, 900.0])), 200.0);
    }

    #[test]
    fn sdsd_hand_computed_and_length_check() {
        // arithmetic progression: all differences equal
        assert_relative_eq!(
            compute_sdsd(&series(&[800.0, 810.0, 820.0, 830.0])).unwrap(),
            0.0
        );
        // diffs {60, -70}: mean -5, deviations +-65
        assert_relative_eq!(
            compute_sdsd(&series(&[800.0, 860.0, 790.0])).unwrap(),
            65.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(compute_sdsd(&series(&[812.0; 5])).unwrap(), 0.0);
        assert!(compute_sdsd(&series(&[700.0, 900.0])).is_err());
    }

    #[test]
    fn nn50_strict_inequality() {
        assert_eq!(compute_nn50(&series(&[800.0, 860.0, 790.0])), 2);
        // a difference of exactly 50 ms does not count
        assert_eq!(compute_nn50(&series(&[800.0, 850.0, 800.0])), 0);
        assert_eq!(compute_nn50(&series(&[810.0; 6])), 0);
    }

    #[test]
    fn pnn50_denominators() {
        let rr = series(&[800.0, 860.0, 790.0]);
        assert_relative_eq!(compute_pnn50(&rr), 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(
            compute_pnn50_with(&rr, Pnn50Denominator::Pairs),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(compute_pnn50(&series(&[780.0; 8])), 0.0);
    }

    #[test]
    fn hrv_index_examples() {
        // all intervals in one bin
        assert_relative_eq!(
            compute_hrv_index(&series(&[800.0, 801.0, 803.0]), 100.0).unwrap(),
            1.0
        );
        // two bins of two
        assert_relative_eq!(
            compute_hrv_index(&series(&[800.0, 800.0, 900.0, 900.0]), DEFAULT_BIN_WIDTH_MS)
                .unwrap(),
            2.0
        );
        assert!(compute_hrv_index(&series(&[800.0, 900.0]), 0.0).is_err());
        assert!(compute_hrv_index(&series(&[800.0, 900.0]), -1.0).is_err());
    }

    #[test]
    fn rahr_and_rmhr_examples() {
        let constant = series(&[800.0; 5]);
        assert_relative_eq!(compute_rahr(&constant), 75.0);
        assert_relative_eq!(compute_rmhr(&constant), 75.0);

        let two = series(&[600.0, 1000.0]);
        assert_relative_eq!(compute_rahr(&two), 80.0); // (100 + 60) / 2
        assert_relative_eq!(compute_rmhr(&two), 100.0);

        assert_relative_eq!(compute_rahr(&series(&[1000.0; 3])), 60.0);
    }

    #[test]
    fn extract_all_composes_the_metrics() {
        let rr = series(&[800.0, 860.0, 790.0]);
        let f = extract_all(&rr, DEFAULT_BIN_WIDTH_MS).unwrap();
        assert_relative_eq!(f.avnn, compute_avnn(&rr));
        assert_relative_eq!(f.sdnn, compute_sdnn(&rr));
        assert_relative_eq!(f.rmssd, compute_rmssd(&rr));
        assert_relative_eq!(f.sdsd, compute_sdsd(&rr).unwrap());
        assert_eq!(f.nn50, 2);
        assert_relative_eq!(f.pnn50, 2.0 / 3.0);
        assert_relative_eq!(f.rahr, compute_rahr(&rr));
        assert_relative_eq!(f.rmhr, compute_rmhr(&rr));
        assert!(f.rmhr >= f.rahr);
    }

    #[test]
    fn extract_all_on_constant_series() {
        let f = extract_all(&series(&[750.0; 10]), DEFAULT_BIN_WIDTH_MS).unwrap();
        assert_relative_eq!(f.avnn, 750.0);
        assert_relative_eq!(f.sdnn, 0.0);
        assert_relative_eq!(f.rmssd, 0.0);
        assert_relative_eq!(f.sdsd, 0.0);
        assert_eq!(f.nn50, 0);
        assert_relative_eq!(f.pnn50, 0.0);
        assert_relative_eq!(f.hrv_index, 1.0);
        assert_relative_eq!(f.rahr, 80.0);
        assert_relative_eq!(f.rmhr, 80.0);
    }

    #[test]
    fn translation_shifts_avnn_only() {
        let base = [700.0, 820.0, 760.0, 900.0, 655.0];
        let shifted: Vec<f64> = base.iter().map(|x| x + 37.0).collect();
        let a = series(&base);
        let b = series(&shifted);
        assert_relative_eq!(compute_avnn(&b), compute_avnn(&a) + 37.0, max_relative = 1e-12);
        assert_relative_eq!(compute_sdnn(&b), compute_sdnn(&a), max_relative = 1e-12);
        assert_relative_eq!(compute_rmssd(&b), compute_rmssd(&a), max_relative = 1e-12);
        assert_relative_eq!(
            compute_sdsd(&b).unwrap(),
            compute_sdsd(&a).unwrap(),
            max_relative = 1e-12
        );
        assert_eq!(compute_nn50(&b), compute_nn50(&a));
    }

    #[test]
    fn permutation_witness() {
        // order-insensitive metrics do not move; order-sensitive ones can
        let a = series(&[700.0, 900.0, 700.0, 900.0]);
        let b = series(&[700.0, 700.0, 900.0, 900.0]);
        assert_relative_eq!(compute_avnn(&a), compute_avnn(&b));
        assert_relative_eq!(compute_sdnn(&a), compute_sdnn(&b));
        assert_relative_eq!(
            compute_hrv_index(&a, DEFAULT_BIN_WIDTH_MS).unwrap(),
            compute_hrv_index(&b, DEFAULT_BIN_WIDTH_MS).unwrap()
        );
        assert_relative_eq!(compute_rahr(&a), compute_rahr(&b));
        assert_relative_eq!(compute_rmhr(&a), compute_rmhr(&b));
        assert_ne!(compute_rmssd(&a), compute_rmssd(&b));
        assert_ne!(compute_nn50(&a), compute_nn50(&b));
        assert_ne!(compute_sdsd(&a).unwrap(), compute_sdsd(&b).unwrap());
    }

    #[test]
    fn rr_file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();

        let good = dir.path().join("good.txt");
        std::fs::write(&good, "rr_ms\n800\n860.5\n790\n").unwrap();
        let rr = read_rr_file(&good).unwrap();
        assert_eq!(rr.intervals(), &[800.0, 860.5, 790.0]);

        let headerless = dir.path().join("headerless.txt");
        std::fs::write(&headerless, "800\n900\n").unwrap();
        assert_eq!(read_rr_file(&headerless).unwrap().len(), 2);

        let negative = dir.path().join("neg.txt");
        std::fs::write(&negative, "800\n-20\n900\n").unwrap();
        match read_rr_file(&negative) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected a parse error, got {other:?}"),
        }

        let garbage = dir.path().join("garbage.txt");
        std::fs::write(&garbage, "800\nabc\n").unwrap();
        match read_rr_file(&garbage) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }
}
