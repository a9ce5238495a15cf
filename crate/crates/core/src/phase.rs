//! Single-frequency cosine/sine least-squares fits and composite
//! reconstruction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PhaseError {
    #[error("phase fit needs at least 4 points, got {0}")]
    TooShort(usize),
    #[error("frequency {freq} is outside [0, fs/2] for fs = {fs}")]
    BadFrequency { freq: f64, fs: f64 },
    #[error("sampling rate must be positive, got {0}")]
    BadRate(f64),
    #[error("normal equations are singular at frequency {0}")]
    Singular(f64),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("no components to reconstruct")]
    Empty,
    #[error("horizon {horizon} d is shorter than 10 periods of the slowest component ({min} d)")]
    HorizonTooShort { horizon: f64, min: f64 },
    #[error("resolution {resolution}/d does not exceed twice the highest frequency {max_freq}/d")]
    ResolutionTooLow { resolution: f64, max_freq: f64 },
}

/// `x(t) ≈ amplitude · cos(2π·freq·t + phase)`, t in days from the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseFit {
    pub freq: f64,
    pub a: f64,
    pub b: f64,
    pub amplitude: f64,
    pub phase_deg: f64,
}

impl PhaseFit {
    /// Builds a fit from amplitude and phase (degrees).
    pub fn from_polar(freq: f64, amplitude: f64, phase_deg: f64) -> Self {
        let phi = phase_deg.to_radians();
        Self {
            freq,
            a: amplitude * phi.cos(),
            b: -amplitude * phi.sin(),
            amplitude,
            phase_deg: wrap_degrees(phase_deg),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (2.0 * PI * self.freq * t + self.phase_deg.to_radians()).cos()
    }
}

/// Maps degrees into (−180, 180].
fn wrap_degrees(d: f64) -> f64 {
    let w = (d + 180.0).rem_euclid(360.0) - 180.0;
    if w <= -180.0 {
        w + 360.0
    } else {
        w
    }
}

/// Least-squares `c + a·cos + b·sin` fit at `freq`; the offset `c` is
/// discarded so amplitude and phase describe the fluctuation only.
pub fn fit_phase(y: &[f64], fs: f64, freq: f64) -> Result<PhaseFit, PhaseError> {
    let n = y.len();
    if n < 4 {
        return Err(PhaseError::TooShort(n));
    }
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(PhaseError::BadRate(fs));
    }
    if !(freq >= 0.0 && freq <= fs / 2.0) {
        return Err(PhaseError::BadFrequency { freq, fs });
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(PhaseError::NonFinite(i));
    }
    // Centring both the series and the regressors is the same as fitting an
    // intercept alongside the cosine and sine terms.
    let nf = n as f64;
    let basis: Vec<(f64, f64)> = (0..n).map(|i| (2.0 * PI * freq * i as f64 / fs).sin_cos()).collect();
    let y_mean = y.iter().sum::<f64>() / nf;
    let s_mean = basis.iter().map(|b| b.0).sum::<f64>() / nf;
    let c_mean = basis.iter().map(|b| b.1).sum::<f64>() / nf;
    let (mut scc, mut sss, mut scs, mut scy, mut ssy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&(s, c), v) in basis.iter().zip(y) {
        let (s, c, v) = (s - s_mean, c - c_mean, v - y_mean);
        scc += c * c;
        sss += s * s;
        scs += c * s;
        scy += c * v;
        ssy += s * v;
    }
    let det = scc * sss - scs * scs;
    if !(det > 1e-9 * n as f64 * n as f64) {
        return Err(PhaseError::Singular(freq));
    }
    let a = (sss * scy - scs * ssy) / det;
    let b = (scc * ssy - scs * scy) / det;
    let amplitude = a.hypot(b);
    let phase_deg = wrap_degrees((-b).atan2(a).to_degrees());
    Ok(PhaseFit {
        freq,
        a,
        b,
        amplitude,
        phase_deg,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    /// Composite signal at `t = i / resolution`, `i = 0..=horizon·resolution`.
    pub series: Vec<f64>,
    pub resolution: f64,
    pub peak_to_peak: f64,
}

/// Sums the fitted components over `horizon` days sampled at `resolution`
/// per day and reports the range.
pub fn reconstruct(fits: &[PhaseFit], horizon: f64, resolution: f64) -> Result<Reconstruction, PhaseError> {
    if fits.is_empty() {
        return Err(PhaseError::Empty);
    }
    let max_freq = fits.iter().map(|f| f.freq.abs()).fold(0.0, f64::max);
    if !(resolution > 2.0 * max_freq && resolution.is_finite()) {
        return Err(PhaseError::ResolutionTooLow { resolution, max_freq });
    }
    let min_freq = fits
        .iter()
        .map(|f| f.freq.abs())
        .filter(|&f| f > 0.0)
        .fold(f64::INFINITY, f64::min);
    let min_horizon = if min_freq.is_finite() { 10.0 / min_freq } else { 0.0 };
    if !(horizon >= min_horizon && horizon.is_finite()) {
        return Err(PhaseError::HorizonTooShort { horizon, min: min_horizon });
    }
    let n = (horizon * resolution).floor() as usize + 1;
    let series: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / resolution;
            fits.iter().map(|f| f.eval(t)).sum()
        })
        .collect();
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(Reconstruction {
        series,
        resolution,
        peak_to_peak: hi - lo,
    })
}
