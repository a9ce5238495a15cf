//! Synthetic series for validating the spectral pipeline.

use std::f64::consts::PI;

use chrono::{DateTime, Duration, FixedOffset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::ModulationError;
use crate::series::EvenSeries;

/// Start instant of generated series: Monday 2024-01-01 00:00 UTC.
pub const SYNTH_EPOCH: &str = "2024-01-01T00:00:00+00:00";

/// `amplitude · sin(2π·freq·t + phase)`, phase in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineComponent {
    pub amplitude: f64,
    pub freq: f64,
    #[serde(default)]
    pub phase: f64,
}

fn epoch() -> DateTime<FixedOffset> {
    DateTime::parse_from_rfc3339(SYNTH_EPOCH).expect("valid epoch literal")
}

fn grid(fs: f64, duration: f64) -> Result<(Duration, usize), ModulationError> {
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(ModulationError::BadParameter("fs must be positive"));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(ModulationError::BadParameter("duration must be positive"));
    }
    let n = (duration * fs).round() as usize;
    if n == 0 {
        return Err(ModulationError::BadParameter("duration shorter than one sample"));
    }
    let dt = Duration::nanoseconds((86_400e9 / fs).round() as i64);
    Ok((dt, n))
}

fn noise(noise_sd: f64, seed: u64) -> Result<impl FnMut() -> f64, ModulationError> {
    let normal = Normal::new(0.0, noise_sd).map_err(|_| ModulationError::BadParameter("noise_sd must be >= 0"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(move || if noise_sd > 0.0 { normal.sample(&mut rng) } else { 0.0 })
}

fn into_series(dt: Duration, values: &[f64]) -> EvenSeries {
    EvenSeries::from_values(epoch(), dt, values).expect("positive dt and observed points")
}

/// Sum of sinusoids plus white Gaussian noise, one value per slot, over
/// `duration` days sampled at `fs` per day.
pub fn synth_sines(
    components: &[SineComponent],
    fs: f64,
    duration: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<EvenSeries, ModulationError> {
    let (dt, n) = grid(fs, duration)?;
    if let Some(c) = components.iter().find(|c| !(2.0 * c.freq.abs() < fs)) {
        return Err(ModulationError::Nyquist { freq: c.freq, fs });
    }
    let mut eps = noise(noise_sd, seed)?;
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            components
                .iter()
                .map(|c| c.amplitude * (2.0 * PI * c.freq * t + c.phase).sin())
                .sum::<f64>()
                + eps()
        })
        .collect();
    Ok(into_series(dt, &values))
}

/// Periodic linear interpolation of `table` at phase `x` (in periods).
fn lookup(table: &[f64], x: f64) -> f64 {
    let len = table.len();
    let pos = x.rem_euclid(1.0) * len as f64;
    let i = (pos.floor() as usize).min(len - 1);
    let w = pos - i as f64;
    table[i] * (1.0 - w) + table[(i + 1) % len] * w
}

/// `baseline + weekly(t)·daily(t) + ε(t)` where `daily` spans one day and
/// `weekly` spans seven days, both sampled uniformly and interpolated
/// linearly.
pub fn synth_modulated(
    daily_profile: &[f64],
    weekly_envelope: &[f64],
    baseline: f64,
    noise_sd: f64,
    fs: f64,
    days: f64,
    seed: u64,
) -> Result<EvenSeries, ModulationError> {
    let (dt, n) = grid(fs, days)?;
    if days < 14.0 {
        return Err(ModulationError::TooShort(days));
    }
    let need_daily = fs.ceil() as usize;
    if daily_profile.len() < need_daily {
        return Err(ModulationError::BadTable {
            which: "daily",
            len: daily_profile.len(),
            required: need_daily,
        });
    }
    let need_weekly = (7.0 * fs).ceil() as usize;
    if weekly_envelope.len() < need_weekly {
        return Err(ModulationError::BadTable {
            which: "weekly",
            len: weekly_envelope.len(),
            required: need_weekly,
        });
    }
    if daily_profile.iter().chain(weekly_envelope).any(|v| !v.is_finite()) {
        return Err(ModulationError::BadParameter("profile tables must be finite"));
    }
    let mut eps = noise(noise_sd, seed)?;
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            baseline + lookup(weekly_envelope, t / 7.0) * lookup(daily_profile, t) + eps()
        })
        .collect();
    Ok(into_series(dt, &values))
}

/// Samples `offset + Σ A·sin(2π·c·j/len + φ)` at `j = 0..len`, where each
/// term is `(A, c, φ)` with `c` cycles per table period.
pub fn harmonic_table(offset: f64, terms: &[(f64, f64, f64)], len: usize) -> Vec<f64> {
    (0..len)
        .map(|j| {
            let x = j as f64 / len as f64;
            offset + terms.iter().map(|(a, c, p)| a * (2.0 * PI * c * x + p).sin()).sum::<f64>()
        })
        .collect()
}
