//! End-to-end analysis of a probe log and the resulting audit report.
//!
//! Pipeline: grid alignment → imputation → slot means → drift → Welch
//! spectrum → permutation band → peaks → classification → phase fits →
//! reconstruction → explained variance → calendar grids.

mod output;

pub use output::{render_csv, render_text, write_outputs, ReportFormat};

use chrono::{DateTime, Duration, FixedOffset};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drift::{fit_drift_with, DriftConfig, DriftError, DriftReference, DriftResult};
use crate::exec::Execution;
use crate::log::{infer_grid, LogContents, LogError};
use crate::modulation::{classify_peaks, ModulationError, ModulationModel, PeakLabel};
use crate::phase::{fit_phase, reconstruct, PhaseError, PhaseFit, Reconstruction};
use crate::series::{
    aggregate_replicates, build_series, daily_means, impute_missing, weekday_hour_grid, weekly_means, CalendarMean,
    EvenSeries, SeriesError, WeekdayHourGrid,
};
use crate::spectral::{
    detect_peaks_with, explained_variance, permutation_band_with, welch, Detrend, ExplainedVariance, Normalization,
    PeakRule, SignificanceBand, SpectralError, Spectrum, WelchConfig, Window,
};
use crate::stats::{mean, sample_sd};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("log: {0}")]
    Log(#[from] LogError),
    #[error("series: {0}")]
    Series(#[from] SeriesError),
    #[error("drift: {0}")]
    Drift(#[from] DriftError),
    #[error("spectrum: {0}")]
    Spectral(#[from] SpectralError),
    #[error("phase: {0}")]
    Phase(#[from] PhaseError),
    #[error("modulation model: {0}")]
    Modulation(#[from] ModulationError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl AnalysisError {
    /// True for errors caused by the caller's parameters rather than the data.
    pub fn is_usage(&self) -> bool {
        matches!(self, AnalysisError::Config(_) | AnalysisError::Modulation(ModulationError::InvalidModel))
    }
}

/// Explicit sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t0: DateTime<FixedOffset>,
    pub dt_seconds: f64,
    pub t_end: DateTime<FixedOffset>,
}

impl GridSpec {
    pub fn dt(&self) -> Duration {
        Duration::nanoseconds((self.dt_seconds * 1e9).round() as i64)
    }
}

mod tz_serde {
    use chrono::FixedOffset;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(tz: &FixedOffset, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&tz.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FixedOffset, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    /// Segment length is `⌊N / nperseg_div⌋`.
    pub nperseg_div: usize,
    pub overlap: f64,
    pub n_perm: usize,
    pub alpha: f64,
    pub hac_days: f64,
    pub drift_reference: DriftReference,
    pub seed: u64,
    #[serde(with = "tz_serde")]
    pub tz_offset: FixedOffset,
    pub peak_rule: PeakRule,
    pub normalization: Normalization,
    pub model: ModulationModel,
    /// Classification tolerance in cycles/day; defaults to the bin width.
    pub tolerance: Option<f64>,
    pub horizon_days: f64,
    /// Reconstruction samples per day; defaults to the series rate.
    pub resolution: Option<f64>,
    /// Sampling grid; inferred from the log when absent.
    pub grid: Option<GridSpec>,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            nperseg_div: 4,
            overlap: 0.5,
            n_perm: 1000,
            alpha: 0.05,
            hac_days: 7.0,
            drift_reference: DriftReference::StudentT,
            seed: 0,
            tz_offset: FixedOffset::east_opt(2 * 3600).expect("valid offset"),
            peak_rule: PeakRule::RunMaximum,
            normalization: Normalization::Amplitude,
            model: ModulationModel::default(),
            tolerance: None,
            horizon_days: 700.0,
            resolution: None,
            grid: None,
            execution: Execution::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |m: &str| Err(AnalysisError::Config(m.to_string()));
        if self.nperseg_div == 0 {
            return bad("nperseg_div must be positive");
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return bad("overlap must lie in [0, 1)");
        }
        if self.n_perm < 100 {
            return bad("n_perm must be at least 100");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if !(self.hac_days >= 0.0 && self.hac_days.is_finite()) {
            return bad("hac_days must be non-negative");
        }
        if self.tolerance.is_some_and(|t| !(t > 0.0)) {
            return bad("tolerance must be positive");
        }
        if !(self.horizon_days > 0.0) {
            return bad("horizon_days must be positive");
        }
        if self.resolution.is_some_and(|r| !(r > 0.0)) {
            return bad("resolution must be positive");
        }
        if self.grid.is_some_and(|g| !(g.dt_seconds > 0.0)) {
            return bad("grid interval must be positive");
        }
        self.model.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub n: usize,
    pub fs: f64,
    pub t0: DateTime<FixedOffset>,
    pub dt_seconds: f64,
    pub observed_slots: usize,
    pub gap_slots: Vec<usize>,
    pub n_measurements: usize,
    /// Mean of all measured replicate scores.
    pub mean: f64,
    /// Sample SD of all measured replicate scores.
    pub sd_raw: f64,
    /// Sample SD of the per-slot means after imputation.
    pub sd_avg: f64,
    pub log_status_counts: std::collections::BTreeMap<String, usize>,
    pub log_truncated_tail: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub nperseg: usize,
    pub n_bins: usize,
    pub df: f64,
    pub n_segments: usize,
    pub normalization: Normalization,
    pub amplitude_factor: f64,
    pub total_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub period: String,
    pub period_days: f64,
    pub freq_per_day: f64,
    pub bin_index: usize,
    pub power: f64,
    pub threshold: f64,
    pub amplitude: f64,
    pub label: PeakLabel,
    pub predicted_freq_per_day: f64,
    pub deviation: f64,
    /// Absent when the least-squares fit is singular at this frequency.
    pub phase: Option<PhaseFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grids {
    pub weekday_hour: Option<WeekdayHourGrid>,
    pub daily: Vec<CalendarMean>,
    pub weekly: Vec<CalendarMean>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub tool_version: String,
    pub series_summary: SeriesSummary,
    pub drift: DriftResult,
    pub spectrum_file: String,
    pub spectrum: SpectrumSummary,
    pub peaks: Vec<PeakReport>,
    pub explained_variance: ExplainedVariance,
    pub reconstruction_peak_to_peak: Option<f64>,
    pub grids: Grids,
    /// Fully resolved parameters; analysing the same log with this
    /// configuration reproduces the report exactly.
    pub config_echo: AnalysisConfig,
}

/// Report plus the bulky intermediate products written as sidecar files.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: AuditReport,
    pub series: EvenSeries,
    pub slot_means: Vec<f64>,
    pub spectrum: Spectrum,
    pub band: SignificanceBand,
    pub reconstruction: Option<Reconstruction>,
}

pub const SPECTRUM_FILE: &str = "spectrum.csv";

pub fn analyze(log: &LogContents, cfg: &AnalysisConfig) -> Result<Analysis, AnalysisError> {
    cfg.validate()?;
    if log.records.is_empty() {
        return Err(LogError::Empty.into());
    }
    let grid = match cfg.grid {
        Some(g) => g,
        None => {
            let g = infer_grid(&log.all_timestamps)?;
            GridSpec {
                t0: g.t0,
                dt_seconds: g.dt.num_seconds() as f64,
                t_end: g.t_end,
            }
        }
    };

    let raw = build_series(&log.records, grid.t0, grid.dt(), grid.t_end)?;
    let series = impute_missing(&raw)?;
    let y = aggregate_replicates(&series)?;
    let fs = series.fs();
    let measured: Vec<f64> = raw.observed_scores().collect();
    let sd_avg = sample_sd(&y);

    let drift = fit_drift_with(
        &y,
        fs,
        &DriftConfig {
            lag_days: cfg.hac_days,
            reference: cfg.drift_reference,
        },
    )?;

    let welch_cfg = WelchConfig {
        nperseg: y.len() / cfg.nperseg_div,
        overlap_fraction: cfg.overlap,
        window: Window::Hann,
        normalization: cfg.normalization,
        detrend: Detrend::Mean,
    };
    let spectrum = welch(&y, fs, &welch_cfg)?;
    let band = permutation_band_with(&y, fs, &welch_cfg, cfg.n_perm, cfg.alpha, cfg.seed, cfg.execution)?;
    let peaks = detect_peaks_with(&spectrum, &band, cfg.peak_rule)?;
    let tolerance = cfg.tolerance.unwrap_or(spectrum.df);
    let classes = classify_peaks(&peaks, &cfg.model, tolerance);

    let mut fits = Vec::with_capacity(peaks.len());
    for p in &peaks {
        match fit_phase(&y, fs, p.freq) {
            Ok(f) => fits.push(Some(f)),
            Err(PhaseError::Singular(f)) => {
                log::warn!("phase fit is singular at {f} cycles/day; component left out of reconstruction");
                fits.push(None);
            }
            Err(e) => return Err(e.into()),
        }
    }

    let explained = if peaks.is_empty() {
        ExplainedVariance {
            fraction: 0.0,
            unclamped: 0.0,
            clamped: false,
        }
    } else {
        explained_variance(&peaks, sd_avg * sd_avg)?
    };

    let resolution = cfg.resolution.unwrap_or(fs);
    let usable: Vec<PhaseFit> = fits.iter().flatten().copied().collect();
    let reconstruction = if usable.is_empty() {
        None
    } else {
        Some(reconstruct(&usable, cfg.horizon_days, resolution)?)
    };

    let weekday_hour = match weekday_hour_grid(&raw, cfg.tz_offset) {
        Ok(g) => Some(g),
        Err(SeriesError::NonIntegerSlotsPerDay(r)) => {
            log::warn!("{r} samples per day is not an integer; weekday × time-of-day grid skipped");
            None
        }
        Err(e) => return Err(e.into()),
    };

    let peak_reports = classes
        .into_iter()
        .zip(fits)
        .map(|(c, phase)| PeakReport {
            period: c.peak.period_label(),
            period_days: c.peak.period_days,
            freq_per_day: c.peak.freq,
            bin_index: c.peak.bin_index,
            power: c.peak.power,
            threshold: c.peak.threshold,
            amplitude: c.peak.amplitude,
            label: c.label,
            predicted_freq_per_day: c.predicted_freq,
            deviation: c.deviation,
            phase,
        })
        .collect();

    let echo = AnalysisConfig {
        tolerance: Some(tolerance),
        resolution: Some(resolution),
        grid: Some(grid),
        ..cfg.clone()
    };

    let report = AuditReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        series_summary: SeriesSummary {
            n: y.len(),
            fs,
            t0: series.t0(),
            dt_seconds: grid.dt_seconds,
            observed_slots: raw.points().iter().filter(|p| p.is_observed()).count(),
            gap_slots: raw.gap_indices(),
            n_measurements: measured.len(),
            mean: mean(&measured),
            sd_raw: sample_sd(&measured),
            sd_avg,
            log_status_counts: log.status_counts.clone(),
            log_truncated_tail: log.truncated_tail,
        },
        drift,
        spectrum_file: SPECTRUM_FILE.to_string(),
        spectrum: SpectrumSummary {
            nperseg: welch_cfg.nperseg,
            n_bins: spectrum.len(),
            df: spectrum.df,
            n_segments: spectrum.n_segments,
            normalization: spectrum.normalization,
            amplitude_factor: spectrum.amplitude_factor,
            total_power: spectrum.total_power(),
        },
        peaks: peak_reports,
        explained_variance: explained,
        reconstruction_peak_to_peak: reconstruction.as_ref().map(|r| r.peak_to_peak),
        grids: Grids {
            weekday_hour,
            daily: daily_means(&raw, cfg.tz_offset),
            weekly: weekly_means(&raw, cfg.tz_offset),
        },
        config_echo: echo,
    };

    Ok(Analysis {
        report,
        series,
        slot_means: y,
        spectrum,
        band,
        reconstruction,
    })
}
