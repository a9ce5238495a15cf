//! Synthetic scenarios for `simulate`.

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};
use temporal_audit::exec::item_seed;
use temporal_audit::log::LogEntry;
use temporal_audit::modulation::{harmonic_table, synth_modulated, synth_sines, SineComponent, SYNTH_EPOCH};
use temporal_audit::series::aggregate_replicates;
use temporal_audit::{EvenSeries, MeasurementRecord};

/// Table samples per input sample; keeps grid points on table entries.
const TABLE_OVERSAMPLE: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonics {
    #[serde(default)]
    pub offset: f64,
    /// `[amplitude, cycles per table period, phase in radians]`.
    pub terms: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum Profile {
    #[serde(rename = "table")]
    Table(Vec<f64>),
    #[serde(rename = "harmonics")]
    Harmonics(Harmonics),
}

impl Profile {
    fn table(&self, len: usize) -> Vec<f64> {
        match self {
            Profile::Table(t) => t.clone(),
            Profile::Harmonics(h) => harmonic_table(h.offset, &h.terms, len),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Signal {
    Sines {
        components: Vec<SineComponent>,
    },
    Modulated {
        daily: Profile,
        weekly: Profile,
        #[serde(default)]
        baseline: f64,
    },
}

/// A synthetic log: `offset + scale · signal + noise`, one value per
/// replicate and slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub signal: Signal,
    /// Samples per day.
    pub fs: f64,
    pub days: f64,
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default = "one_u32")]
    pub replicates: u32,
    /// First slot; defaults to Monday 2024-01-01 00:00 UTC.
    #[serde(default)]
    pub start: Option<DateTime<FixedOffset>>,
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("slot {slot} replicate {replicate}: value {value} is outside [0, 1]")]
    OutOfRange { slot: usize, replicate: u32, value: f64 },
}

impl Scenario {
    fn series(&self, seed: u64) -> Result<EvenSeries, ScenarioError> {
        let invalid = |e: temporal_audit::modulation::ModulationError| ScenarioError::Invalid(e.to_string());
        match &self.signal {
            Signal::Sines { components } => synth_sines(components, self.fs, self.days, self.noise_sd, seed).map_err(invalid),
            Signal::Modulated { daily, weekly, baseline } => {
                let per_day = self.fs.ceil() as usize * TABLE_OVERSAMPLE;
                synth_modulated(
                    &daily.table(per_day),
                    &weekly.table(7 * per_day),
                    *baseline,
                    self.noise_sd,
                    self.fs,
                    self.days,
                    seed,
                )
                .map_err(invalid)
            }
        }
    }

    /// Log entries for every replicate; replicate `r` uses its own noise stream.
    pub fn entries(&self) -> Result<Vec<LogEntry>, ScenarioError> {
        if self.replicates == 0 {
            return Err(ScenarioError::Invalid("replicates must be >= 1".into()));
        }
        if !self.scale.is_finite() || !self.offset.is_finite() {
            return Err(ScenarioError::Invalid("offset and scale must be finite".into()));
        }
        let start = self
            .start
            .unwrap_or_else(|| DateTime::parse_from_rfc3339(SYNTH_EPOCH).expect("valid epoch literal"));
        let mut out = Vec::new();
        for r in 0..self.replicates {
            let series = self.series(item_seed(self.seed, r as usize))?;
            let values = aggregate_replicates(&series).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
            for (i, v) in values.iter().enumerate() {
                let value = self.offset + self.scale * v;
                let ts = start + series.dt() * i as i32;
                let rec = MeasurementRecord::new(ts, r, value).map_err(|_| ScenarioError::OutOfRange {
                    slot: i,
                    replicate: r,
                    value,
                })?;
                out.push(LogEntry::from_record(&rec));
            }
        }
        out.sort_by_key(|e| (e.ts, e.rep));
        Ok(out)
    }
}
