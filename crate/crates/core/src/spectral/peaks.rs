//! Significant-peak extraction and spectral explained variance.

use serde::{Deserialize, Serialize};

use super::{SignificanceBand, SpectralError, Spectrum};

/// How exceeding bins are turned into peaks. The DC bin is never a peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeakRule {
    /// Local maxima within each contiguous run of exceeding bins.
    #[default]
    RunMaximum,
    /// Every exceeding bin.
    EveryBin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakInfo {
    #[serde(rename = "freq_per_day")]
    pub freq: f64,
    pub period_days: f64,
    pub power: f64,
    pub threshold: f64,
    pub amplitude: f64,
    pub bin_index: usize,
}

impl PeakInfo {
    pub fn period_hours(&self) -> f64 {
        self.period_days * 24.0
    }

    /// `7.3 d` for periods of two days or more, `21.0 h` below.
    pub fn period_label(&self) -> String {
        if self.period_days >= 2.0 {
            format!("{:.1} d", self.period_days)
        } else {
            format!("{:.1} h", self.period_hours())
        }
    }
}

pub fn detect_peaks(spec: &Spectrum, band: &SignificanceBand) -> Result<Vec<PeakInfo>, SpectralError> {
    detect_peaks_with(spec, band, PeakRule::RunMaximum)
}

pub fn detect_peaks_with(
    spec: &Spectrum,
    band: &SignificanceBand,
    rule: PeakRule,
) -> Result<Vec<PeakInfo>, SpectralError> {
    if spec.power.len() != band.threshold.len() || spec.freqs.len() != spec.power.len() {
        return Err(SpectralError::GridMismatch);
    }
    let p = &spec.power;
    let exceeds = |k: usize| k > 0 && p[k] > band.threshold[k];

    let mut bins = Vec::new();
    let mut k = 1;
    while k < p.len() {
        if !exceeds(k) {
            k += 1;
            continue;
        }
        let start = k;
        while k < p.len() && exceeds(k) {
            k += 1;
        }
        let run = start..k;
        match rule {
            PeakRule::EveryBin => bins.extend(run),
            PeakRule::RunMaximum => {
                for i in run.clone() {
                    let rises = i == run.start || p[i] > p[i - 1];
                    let holds = i + 1 == run.end || p[i] >= p[i + 1];
                    if rises && holds {
                        bins.push(i);
                    }
                }
            }
        }
    }

    Ok(bins
        .into_iter()
        .map(|k| PeakInfo {
            freq: spec.freqs[k],
            period_days: 1.0 / spec.freqs[k],
            power: p[k],
            threshold: band.threshold[k],
            amplitude: (p[k] * spec.amplitude_factor).sqrt(),
            bin_index: k,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplainedVariance {
    /// Reported fraction, clamped to at most 1.
    pub fraction: f64,
    pub unclamped: f64,
    pub clamped: bool,
}

/// Summed peak power over `variance`.
pub fn explained_variance(peaks: &[PeakInfo], variance: f64) -> Result<ExplainedVariance, SpectralError> {
    if !(variance > 0.0) {
        return Err(SpectralError::NonPositiveVariance(variance));
    }
    let raw = peaks.iter().map(|p| p.power).sum::<f64>() / variance;
    let clamped = raw > 1.0;
    if clamped {
        log::warn!("summed peak power exceeds the series variance ({raw:.3}); reporting 1.0");
    }
    Ok(ExplainedVariance {
        fraction: raw.min(1.0),
        unclamped: raw,
        clamped,
    })
}
