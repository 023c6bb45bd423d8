//! Calibrated synthetic session datasets.
//!
//! Real athlete data is private, so evaluation runs on generated sessions.
//! The generator first fixes each session's load class from the requested
//! mix, then samples in-exercise measurements inside activity-specific
//! ranges so that calories are consistent with duration and heart rate, and
//! finally synthesizes a post-exercise RR series whose mean shifts up in
//! rate (and whose variability shrinks) with the load class. The
//! in-exercise→post-exercise coupling is controlled by `signal_strength`:
//! at 0 the recording carries no class information, at 1 the class shift is
//! maximal and between-session noise vanishes. Post-exercise features are
//! always computed by running the real extractor on the synthesized series.
//!
//! All sampling is per-record substreams of the master seed, so the output
//! is independent of generation order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{ActivityType, LoadClass, SessionRecord};
use crate::error::{Error, Result};
use crate::hrv::{extract_all, RRSeries, DEFAULT_BIN_WIDTH_MS};
use crate::seed::derive_seed;

/// Configuration of one synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_sessions: usize,
    pub seed: u64,
    /// Strength of the load→recovery coupling, in [0, 1].
    pub signal_strength: f64,
    /// Requested fractions of Low/Medium/High sessions; must sum to 1.
    pub class_mix: [f64; 3],
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_sessions: 300,
            seed: 0,
            signal_strength: 0.8,
            class_mix: [1.0 / 3.0; 3],
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_sessions < 12 {
            return Err(Error::InvalidInput(format!(
                "need at least 12 sessions, got {}",
                self.n_sessions
            )));
        }
        if !self.signal_strength.is_finite()
            || !(0.0..=1.0).contains(&self.signal_strength)
        {
            return Err(Error::InvalidInput(format!(
                "signal strength must lie in [0, 1], got {}",
                self.signal_strength
            )));
        }
        let sum: f64 = self.class_mix.iter().sum();
        if self.class_mix.iter().any(|&m| !m.is_finite() || m < 0.0)
            || (sum - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidInput(format!(
                "class mix must be non-negative and sum to 1, got {:?}",
                self.class_mix
            )));
        }
        Ok(())
    }
}

/// Per-activity calibration: heart-rate range, burn rate, and cruise speed.
struct ActivityProfile {
    ahr_lo: f64,
    ahr_hi: f64,
    /// kcal per minute at a reference heart rate of 130 bpm.
    kcal_per_min: f64,
    v_lo: f64,
    v_hi: f64,
    /// Baseline post-exercise mean RR interval, ms.
    rr_base_ms: f64,
}

fn profile(activity: ActivityType) -> ActivityProfile {
    match activity {
        ActivityType::Swim => ActivityProfile {
            ahr_lo: 110.0,
            ahr_hi: 160.0,
            kcal_per_min: 10.0,
            v_lo: 0.8,
            v_hi: 1.6,
            rr_base_ms: 780.0,
        },
        ActivityType::Cycle => ActivityProfile {
            ahr_lo: 100.0,
            ahr_hi: 170.0,
            kcal_per_min: 9.0,
            v_lo: 5.5,
            v_hi: 11.0,
            rr_base_ms: 820.0,
        },
        ActivityType::Run => ActivityProfile {
            ahr_lo: 120.0,
            ahr_hi: 185.0,
            kcal_per_min: 11.0,
            v_lo: 2.2,
            v_hi: 4.5,
            rr_base_ms: 760.0,
        },
    }
}

/// Calorie sampling range per class, pulled in from the bin edges so the
/// additive noise below can never flip a session into a neighboring class,
/// plus the noise scale (2σ stays inside the margin).
fn class_calorie_band(class: LoadClass) -> (f64, f64, f64) {
    match class {
        LoadClass::Low => (20.0, 380.0, 4.0),
        LoadClass::Medium => (430.0, 970.0, 6.0),
        LoadClass::High => (1150.0, 3850.0, 30.0),
    }
}

/// Standard normal truncated at ±z_max, scaled and shifted.
fn truncated_gauss<R: Rng>(rng: &mut R, sigma: f64, z_max: f64) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if z.abs() <= z_max {
            return sigma * z;
        }
    }
}

/// Largest-remainder apportionment of `n` sessions over the class mix.
fn class_targets(mix: &[f64; 3], n: usize) -> Result<[usize; 3]> {
    let mut targets = [0usize; 3];
    let mut remainders = [0.0f64; 3];
    let mut assigned = 0;
    for i in 0..3 {
        let exact = mix[i] * n as f64;
        targets[i] = exact.floor() as usize;
        remainders[i] = exact - exact.floor();
        assigned += targets[i];
    }
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| remainders[b].partial_cmp(&remainders[a]).unwrap());
    for &i in order.iter().take(n - assigned) {
        targets[i] += 1;
    }
    for i in 0..3 {
        if mix[i] > 0.0 && targets[i] == 0 {
            return Err(Error::Generation(format!(
                "class mix {:?} is infeasible for {} sessions: {} would get no sessions",
                mix,
                n,
                LoadClass::ALL[i]
            )));
        }
    }
    Ok(targets)
}

/// Generates one post-exercise RR series for the given class and activity.
///
/// The series covers roughly one minute (intervals appended until their sum
/// reaches 60 s). At full signal the series mean drops by 80 ms per class
/// step below the activity baseline and the beat-to-beat spread shrinks
/// with class; at zero signal the class leaves no trace and the mean
/// wanders with between-session noise instead.
pub fn generate_rr(
    class: LoadClass,
    activity: ActivityType,
    signal: f64,
    seed: u64,
) -> RRSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = class.index() as f64;
    let mean = profile(activity).rr_base_ms - signal * 80.0 * idx
        + (1.0 - signal) * truncated_gauss(&mut rng, 50.0, 2.0);
    let sigma_short = 45.0 * (1.0 - 0.25 * signal * idx);

    let mut intervals = Vec::with_capacity(96);
    let mut total = 0.0;
    while total < 60_000.0 {
        let x = (mean + truncated_gauss(&mut rng, sigma_short, 2.0)).clamp(310.0, 1390.0);
        intervals.push(x);
        total += x;
    }
    RRSeries::new(intervals).expect("generated intervals are clamped into range")
}

fn generate_record(
    class: LoadClass,
    signal: f64,
    record_seed: u64,
    rr_seed: u64,
) -> Result<SessionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(record_seed);
    let activity = ActivityType::ALL[rng.random_range(0..3)];
    let p = profile(activity);

    let ahr = rng.random_range(p.ahr_lo..p.ahr_hi);
    let kcal_per_min = p.kcal_per_min * ahr / 130.0;

    // keep the implied duration inside [600 s, 32400 s] with a little slack
    let (band_lo, band_hi, noise_sigma) = class_calorie_band(class);
    let lo = band_lo.max(10.2 * kcal_per_min);
    let hi = band_hi.min(537.0 * kcal_per_min);
    debug_assert!(lo < hi, "infeasible calorie band for {activity} {class}");
    let calorie_target = rng.random_range(lo..hi);

    let duration_s = calorie_target / kcal_per_min * 60.0;
    let v_hi = p.v_hi.min(199_000.0 / duration_s);
    let velocity = rng.random_range(p.v_lo..v_hi);
    let distance_m = velocity * duration_s;
    let mhr = (ahr + rng.random_range(5.0..25.0)).min(195.0);
    let calories = calorie_target + truncated_gauss(&mut rng, noise_sigma, 2.0);

    let rr = generate_rr(class, activity, signal, rr_seed);
    let record = SessionRecord {
        activity,
        distance_m,
        duration_s,
        ahr,
        mhr,
        calories,
        post: extract_all(&rr, DEFAULT_BIN_WIDTH_MS)?,
    };
    record.validate()?;
    Ok(record)
}

/// Generates a full dataset. Deterministic under the config seed; the class
/// mix is realized exactly (the calorie noise cannot cross a bin edge).
pub fn generate(config: &SynthConfig) -> Result<Vec<SessionRecord>> {
    config.validate()?;
    let targets = class_targets(&config.class_mix, config.n_sessions)?;

    let mut schedule = Vec::with_capacity(config.n_sessions);
    for (i, &t) in targets.iter().enumerate() {
        schedule.extend(std::iter::repeat_n(LoadClass::ALL[i], t));
    }
    use rand::seq::SliceRandom;
    schedule.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0)));

    schedule
        .iter()
        .enumerate()
        .map(|(i, &class)| {
            let record_seed = derive_seed(config.seed, 2 * i as u64 + 1);
            let rr_seed = derive_seed(config.seed, 2 * i as u64 + 2);
            generate_record(class, config.signal_strength, record_seed, rr_seed)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::bin_calories;
    use proptest::prelude::*;

    fn config(n: usize, seed: u64, signal: f64, mix: [f64; 3]) -> SynthConfig {
        SynthConfig {
            n_sessions: n,
            seed,
            signal_strength: signal,
            class_mix: mix,
        }
    }

    #[test]
    fn config_validation() {
        assert!(SynthConfig::default().validate().is_ok());
        assert!(config(11, 0, 0.5, [1.0 / 3.0; 3]).validate().is_err());
        assert!(config(100, 0, -0.1, [1.0 / 3.0; 3]).validate().is_err());
        assert!(config(100, 0, 1.1, [1.0 / 3.0; 3]).validate().is_err());
        assert!(config(100, 0, 0.5, [0.5, 0.6, -0.1]).validate().is_err());
        assert!(config(100, 0, 0.5, [0.5, 0.4, 0.2]).validate().is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = config(60, 42, 0.7, [0.4, 0.4, 0.2]);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a, b);
        let c = generate(&config(60, 43, 0.7, [0.4, 0.4, 0.2])).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn class_mix_is_realized_exactly() {
        let records = generate(&config(100, 7, 0.5, [0.5, 0.3, 0.2])).unwrap();
        assert_eq!(records.len(), 100);
        let mut counts = [0usize; 3];
        for r in &records {
            counts[bin_calories(r.calories).unwrap().index()] += 1;
        }
        assert_eq!(counts, [50, 30, 20]);
    }

    #[test]
    fn infeasible_mix_is_a_generation_error() {
        let err = generate(&config(12, 0, 0.5, [0.98, 0.01, 0.01])).unwrap_err();
        assert!(matches!(err, Error::Generation(_)), "{err}");
    }

    #[test]
    fn all_records_satisfy_invariants() {
        for seed in [0, 1, 2] {
            for r in generate(&config(50, seed, 0.9, [1.0 / 3.0; 3])).unwrap() {
                r.validate().unwrap();
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn random_configs_produce_valid_records(
            n in 12usize..80,
            seed in 0u64..10_000,
            signal in 0.0f64..=1.0,
        ) {
            let records = generate(&config(n, seed, signal, [1.0 / 3.0; 3])).unwrap();
            prop_assert_eq!(records.len(), n);
            for r in &records {
                prop_assert!(r.validate().is_ok());
            }
        }
    }

    #[test]
    fn rr_series_respects_window_and_clamps() {
        for seed in 0..50u64 {
            for class in LoadClass::ALL {
                for activity in ActivityType::ALL {
                    for signal in [0.0, 0.5, 1.0] {
                        let rr = generate_rr(class, activity, signal, seed);
                        let sum: f64 = rr.intervals().iter().sum();
                        assert!(
                            (55_000.0..=65_000.0).contains(&sum),
                            "window {sum} out of range"
                        );
                        for &x in rr.intervals() {
                            assert!(x > 300.0 && x < 1400.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn high_load_shortens_intervals_at_full_signal() {
        let mean = |rr: &RRSeries| {
            rr.intervals().iter().sum::<f64>() / rr.len() as f64
        };
        for seed in 0..100u64 {
            for activity in ActivityType::ALL {
                let low = generate_rr(LoadClass::Low, activity, 1.0, seed);
                let high = generate_rr(LoadClass::High, activity, 1.0, seed);
                assert!(mean(&high) < mean(&low));
            }
        }
    }

    fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        cov / (vx.sqrt() * vy.sqrt())
    }

    fn ranks(xs: &[f64]) -> Vec<f64> {
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
        let mut out = vec![0.0; xs.len()];
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &order[i..=j] {
                out[k] = avg;
            }
            i = j + 1;
        }
        out
    }

    #[test]
    fn zero_signal_decouples_recovery_from_load() {
        let records = generate(&config(1000, 3, 0.0, [1.0 / 3.0; 3])).unwrap();
        let calories: Vec<f64> = records.iter().map(|r| r.calories).collect();
        let rmssd: Vec<f64> = records.iter().map(|r| r.post.rmssd).collect();
        let r = pearson(&calories, &rmssd);
        assert!(r.abs() <= 0.1, "corr(calories, rmssd) = {r}");
    }

    #[test]
    fn full_signal_couples_load_to_recovery_rate() {
        let records = generate(&config(1000, 3, 1.0, [1.0 / 3.0; 3])).unwrap();
        let calories: Vec<f64> = records.iter().map(|r| r.calories).collect();
        let rahr: Vec<f64> = records.iter().map(|r| r.post.rahr).collect();
        let rho = pearson(&ranks(&calories), &ranks(&rahr));
        assert!(rho >= 0.8, "spearman(calories, rahr) = {rho}");
    }
}
