//! Linear drift test: OLS on `[1, t]` (t in days from series start) with
//! Newey–West HAC standard errors.
//!
//! The long-run covariance uses Bartlett weights `w_l = 1 − l/(L+1)` up to
//! lag `L = round(lag_days · fs)`. Significance comes from a Student-t
//! reference with `N − 2` degrees of freedom, or optionally from a
//! simulated fixed-b null distribution of the same statistic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::exec::{item_seed, Execution};

const MIN_LEN: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum DriftError {
    #[error("drift fit needs at least {MIN_LEN} points, got {0}")]
    TooShort(usize),
    #[error("sampling rate must be positive, got {0}")]
    BadRate(f64),
    #[error("HAC lag must be non-negative and finite, got {0} days")]
    BadLag(f64),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("fixed-b null was simulated for n={expected_n}, lag={expected_lag}; got n={n}, lag={lag}")]
    NullMismatch {
        expected_n: usize,
        expected_lag: usize,
        n: usize,
        lag: usize,
    },
}

/// Reference distribution for the drift t statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DriftReference {
    StudentT,
    /// Null distribution of |t| simulated under i.i.d. Gaussian errors on the
    /// same design and lag.
    FixedB { draws: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftConfig {
    pub lag_days: f64,
    pub reference: DriftReference,
}

impl Default for DriftConfig {
    fn default() -> Self {
        Self {
            lag_days: 7.0,
            reference: DriftReference::StudentT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftResult {
    /// Score units per day.
    #[serde(rename = "slope_per_day")]
    pub slope: f64,
    pub intercept: f64,
    #[serde(rename = "se_hac")]
    pub se_slope_hac: f64,
    #[serde(rename = "t")]
    pub t_stat: f64,
    #[serde(rename = "p")]
    pub p_value: f64,
    #[serde(rename = "lag_samples")]
    pub lag: usize,
}

/// Fits the drift model with the Student-t reference.
pub fn fit_drift(y: &[f64], fs: f64, lag_days: f64) -> Result<DriftResult, DriftError> {
    fit_drift_with(
        y,
        fs,
        &DriftConfig {
            lag_days,
            reference: DriftReference::StudentT,
        },
    )
}

pub fn fit_drift_with(y: &[f64], fs: f64, cfg: &DriftConfig) -> Result<DriftResult, DriftError> {
    let lag = hac_lag(y.len(), fs, cfg.lag_days)?;
    match cfg.reference {
        DriftReference::StudentT => {
            let est = estimate(y, fs, lag)?;
            Ok(est.finish(student_t_p(est.t_stat(), y.len())))
        }
        DriftReference::FixedB { draws, seed } => {
            let null = FixedBNull::simulate(y.len(), lag, draws, seed, Execution::default());
            fit_drift_against(y, fs, cfg.lag_days, &null)
        }
    }
}

/// Fits the drift model using a precomputed fixed-b null distribution.
pub fn fit_drift_against(y: &[f64], fs: f64, lag_days: f64, null: &FixedBNull) -> Result<DriftResult, DriftError> {
    let lag = hac_lag(y.len(), fs, lag_days)?;
    if null.n != y.len() || null.lag != lag {
        return Err(DriftError::NullMismatch {
            expected_n: null.n,
            expected_lag: null.lag,
            n: y.len(),
            lag,
        });
    }
    let est = estimate(y, fs, lag)?;
    Ok(est.finish(null.p_value(est.t_stat())))
}

fn hac_lag(n: usize, fs: f64, lag_days: f64) -> Result<usize, DriftError> {
    if n < MIN_LEN {
        return Err(DriftError::TooShort(n));
    }
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(DriftError::BadRate(fs));
    }
    if !(lag_days >= 0.0 && lag_days.is_finite()) {
        return Err(DriftError::BadLag(lag_days));
    }
    Ok(((lag_days * fs).round() as usize).min(n - 1))
}

#[derive(Clone, Copy)]
struct Estimate {
    slope: f64,
    intercept: f64,
    se: f64,
    lag: usize,
}

impl Estimate {
    fn t_stat(&self) -> f64 {
        if self.se > 0.0 {
            self.slope / self.se
        } else if self.slope == 0.0 {
            0.0
        } else {
            self.slope.signum() * f64::INFINITY
        }
    }

    fn finish(self, p_value: f64) -> DriftResult {
        DriftResult {
            slope: self.slope,
            intercept: self.intercept,
            se_slope_hac: self.se,
            t_stat: self.t_stat(),
            p_value,
            lag: self.lag,
        }
    }
}

/// OLS with a centred time regressor; the slope and its sandwich variance
/// are unchanged by centring.
fn estimate(y: &[f64], fs: f64, lag: usize) -> Result<Estimate, DriftError> {
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(DriftError::NonFinite(i));
    }
    let n = y.len();
    let t_mean = (n - 1) as f64 / (2.0 * fs);
    let tc: Vec<f64> = (0..n).map(|i| i as f64 / fs - t_mean).collect();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let stt: f64 = tc.iter().map(|t| t * t).sum();

    if y.iter().all(|&v| v == y[0]) {
        return Ok(Estimate {
            slope: 0.0,
            intercept: y[0],
            se: 0.0,
            lag,
        });
    }

    let slope = tc.iter().zip(y).map(|(t, v)| t * (v - y_mean)).sum::<f64>() / stt;
    let intercept = y_mean - slope * t_mean;
    // Score contributions for the slope row of the centred design.
    let u: Vec<f64> = tc
        .iter()
        .zip(y)
        .map(|(t, v)| t * (v - y_mean - slope * t))
        .collect();
    let meat = bartlett_long_run(&u, lag);
    Ok(Estimate {
        slope,
        intercept,
        se: meat.max(0.0).sqrt() / stt,
        lag,
    })
}

/// `Σ_l w_l Γ_l` with `Γ_l = Σ_i u_i u_{i−l}` counted on both sides for l ≥ 1.
fn bartlett_long_run(u: &[f64], lag: usize) -> f64 {
    let mut s: f64 = u.iter().map(|x| x * x).sum();
    for l in 1..=lag {
        let w = 1.0 - l as f64 / (lag as f64 + 1.0);
        let gamma: f64 = u[l..].iter().zip(u).map(|(a, b)| a * b).sum();
        s += 2.0 * w * gamma;
    }
    s
}

fn student_t_p(t: f64, n: usize) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if !t.is_finite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, (n - 2) as f64).expect("n >= 10 gives positive dof");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// Simulated null distribution of |t| for a given series length and lag.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedBNull {
    n: usize,
    lag: usize,
    sorted_abs_t: Vec<f64>,
}

impl FixedBNull {
    pub fn simulate(n: usize, lag: usize, draws: usize, seed: u64, exec: Execution) -> Self {
        let draws = draws.max(1);
        let mut abs_t = exec.map_indexed(
            draws,
            || vec![0.0; n],
            |buf, i| {
                let mut rng = ChaCha8Rng::seed_from_u64(item_seed(seed, i));
                for v in buf.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                // Design is scale-free in t, so fs = 1 suffices.
                estimate(buf, 1.0, lag).map(|e| e.t_stat().abs()).unwrap_or(0.0)
            },
        );
        abs_t.sort_by(f64::total_cmp);
        Self {
            n,
            lag,
            sorted_abs_t: abs_t,
        }
    }

    /// Two-sided p-value `(1 + #{|t_sim| ≥ |t|}) / (draws + 1)`.
    pub fn p_value(&self, t: f64) -> f64 {
        let a = t.abs();
        let below = self.sorted_abs_t.partition_point(|&x| x < a);
        let at_or_above = self.sorted_abs_t.len() - below;
        (1 + at_or_above) as f64 / (self.sorted_abs_t.len() + 1) as f64
    }

    /// Critical |t| at level `alpha`.
    pub fn critical_value(&self, alpha: f64) -> f64 {
        let k = ((1.0 - alpha) * self.sorted_abs_t.len() as f64).ceil() as usize;
        self.sorted_abs_t[k.clamp(1, self.sorted_abs_t.len()) - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let y: Vec<f64> = (0..200).map(|i| 0.1 + 0.02 * (i as f64 / 8.0)).collect();
        let r = fit_drift(&y, 8.0, 7.0).unwrap();
        assert!((r.slope - 0.02).abs() < 1e-14);
        assert!((r.intercept - 0.1).abs() < 1e-12);
        assert!(r.p_value < 1e-12);
        assert_eq!(r.lag, 56);
    }

    #[test]
    fn constant_series_has_no_drift() {
        let r = fit_drift(&[0.6; 100], 8.0, 7.0).unwrap();
        assert_eq!((r.slope, r.t_stat, r.p_value), (0.0, 0.0, 1.0));
    }

    #[test]
    fn input_errors() {
        assert_eq!(fit_drift(&[0.0; 5], 8.0, 1.0), Err(DriftError::TooShort(5)));
        assert_eq!(fit_drift(&[0.0; 20], 0.0, 1.0), Err(DriftError::BadRate(0.0)));
        assert_eq!(fit_drift(&[0.0; 20], 8.0, -1.0), Err(DriftError::BadLag(-1.0)));
        let mut y = vec![0.5; 20];
        y[3] = f64::NAN;
        assert_eq!(fit_drift(&y, 8.0, 1.0), Err(DriftError::NonFinite(3)));
    }

    #[test]
    fn lag_is_capped_by_length() {
        let y: Vec<f64> = (0..12).map(|i| (i % 3) as f64).collect();
        assert_eq!(fit_drift(&y, 8.0, 7.0).unwrap().lag, 11);
    }

    #[test]
    fn fixed_b_null_is_wider_than_normal() {
        let null = FixedBNull::simulate(300, 24, 2000, 11, Execution::default());
        assert!(null.critical_value(0.05) > 2.0);
        assert!((null.p_value(0.0) - 1.0).abs() < 1e-12);
        assert!(null.p_value(1e9) < 1e-3);
    }

    #[test]
    fn fixed_b_rejects_mismatched_null() {
        let null = FixedBNull::simulate(50, 8, 10, 1, Execution::Sequential);
        let y: Vec<f64> = (0..60).map(|i| (i as f64).sin()).collect();
        assert!(matches!(fit_drift_against(&y, 8.0, 1.0, &null), Err(DriftError::NullMismatch { .. })));
    }
}
