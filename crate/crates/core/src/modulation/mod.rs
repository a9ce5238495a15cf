//! Multiplicative daily × weekly modulation model.
//!
//! A daily rhythm at `f_d` whose shape is modulated by a weekly rhythm at
//! `f_w` produces spectral lines at `k·f_d ± m·f_w`. Frequencies are kept as
//! exact rationals so that, for example, the first sidebands of a 24 h
//! rhythm under a 7 d envelope land at exactly 21 h and 28 h.

mod synth;

pub use synth::{harmonic_table, synth_modulated, synth_sines, SineComponent, SYNTH_EPOCH};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::PeakInfo;

#[derive(Debug, Error, PartialEq)]
pub enum ModulationError {
    #[error("model requires f_d > f_w > 0 and k_max >= 1")]
    InvalidModel,
    #[error("component at {freq} cycles/day is at or above Nyquist for fs = {fs}")]
    Nyquist { freq: f64, fs: f64 },
    #[error("{which} table has {len} samples, needs at least {required}")]
    BadTable {
        which: &'static str,
        len: usize,
        required: usize,
    },
    #[error("modulated series needs at least 14 days, got {0}")]
    TooShort(f64),
    #[error("invalid parameter: {0}")]
    BadParameter(&'static str),
}

pub type Frequency = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationModel {
    /// Daily fundamental, cycles/day.
    pub f_d: Frequency,
    /// Weekly fundamental, cycles/day.
    pub f_w: Frequency,
    pub k_max: u32,
    pub m_max: u32,
}

impl Default for ModulationModel {
    fn default() -> Self {
        Self {
            f_d: Ratio::from_integer(1),
            f_w: Ratio::new(1, 7),
            k_max: 3,
            m_max: 1,
        }
    }
}

impl ModulationModel {
    pub fn validate(&self) -> Result<(), ModulationError> {
        let zero = Ratio::from_integer(0);
        if self.f_w > zero && self.f_d > self.f_w && self.k_max >= 1 {
            Ok(())
        } else {
            Err(ModulationError::InvalidModel)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

/// One predicted line `k·f_d ± m·f_w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedLine {
    pub k: u32,
    pub m: u32,
    pub sign: Sign,
    pub freq: Frequency,
}

impl PredictedLine {
    pub fn freq_per_day(&self) -> f64 {
        *self.freq.numer() as f64 / *self.freq.denom() as f64
    }

    /// Exact period in hours.
    pub fn period_hours(&self) -> Ratio<i64> {
        Ratio::from_integer(24) / self.freq
    }

    fn label(&self) -> PeakLabel {
        match (self.k, self.m) {
            (0, 1) => PeakLabel::WeeklyFundamental,
            (0, m) => PeakLabel::WeeklyHarmonic { m },
            (1, 0) => PeakLabel::DailyFundamental,
            (k, 0) => PeakLabel::DailyHarmonic { k },
            (k, m) => PeakLabel::Sideband { k, m, sign: self.sign },
        }
    }

    fn parsimony(&self) -> (u32, u32) {
        (self.k + self.m, self.k)
    }
}

/// All distinct positive `k·f_d ± m·f_w` for `0 ≤ k ≤ k_max`, `0 ≤ m ≤ m_max`,
/// `(k, m) ≠ (0, 0)`, sorted by frequency. Coincident lines keep the most
/// parsimonious `(k + m, k)`.
pub fn predict_frequencies(model: &ModulationModel) -> Vec<PredictedLine> {
    let zero = Ratio::from_integer(0);
    let mut lines: Vec<PredictedLine> = Vec::new();
    for k in 0..=model.k_max {
        for m in 0..=model.m_max {
            if k == 0 && m == 0 {
                continue;
            }
            let base = model.f_d * Ratio::from_integer(k as i64);
            let side = model.f_w * Ratio::from_integer(m as i64);
            let signs: &[Sign] = if m == 0 { &[Sign::Plus] } else { &[Sign::Plus, Sign::Minus] };
            for &sign in signs {
                let freq = match sign {
                    Sign::Plus => base + side,
                    Sign::Minus => base - side,
                };
                if freq <= zero {
                    continue;
                }
                let line = PredictedLine { k, m, sign, freq };
                match lines.iter_mut().find(|l| l.freq == freq) {
                    Some(existing) if line.parsimony() < existing.parsimony() => *existing = line,
                    Some(_) => {}
                    None => lines.push(line),
                }
            }
        }
    }
    lines.sort_by_key(|l| l.freq);
    lines
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PeakLabel {
    WeeklyFundamental,
    WeeklyHarmonic { m: u32 },
    DailyFundamental,
    DailyHarmonic { k: u32 },
    Sideband { k: u32, m: u32, sign: Sign },
    Unexplained,
}

impl std::fmt::Display for PeakLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PeakLabel::WeeklyFundamental => write!(f, "weekly_fundamental"),
            PeakLabel::WeeklyHarmonic { m } => write!(f, "weekly_harmonic(m={m})"),
            PeakLabel::DailyFundamental => write!(f, "daily_fundamental"),
            PeakLabel::DailyHarmonic { k } => write!(f, "daily_harmonic(k={k})"),
            PeakLabel::Sideband { k, m, sign } => {
                let s = match sign {
                    Sign::Plus => '+',
                    Sign::Minus => '-',
                };
                write!(f, "sideband(k={k},m={m},{s})")
            }
            PeakLabel::Unexplained => write!(f, "unexplained"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakClassification {
    pub peak: PeakInfo,
    pub label: PeakLabel,
    /// Nearest predicted line, whether or not it lies within tolerance.
    pub predicted_freq: f64,
    /// `peak.freq − predicted_freq`.
    pub deviation: f64,
}

/// Assigns each peak to its nearest predicted line within `tolerance`
/// (cycles/day); ties go to smaller `k + m`, then smaller `k`.
pub fn classify_peaks(peaks: &[PeakInfo], model: &ModulationModel, tolerance: f64) -> Vec<PeakClassification> {
    let lines = predict_frequencies(model);
    peaks
        .iter()
        .map(|peak| {
            let nearest = lines.iter().min_by(|a, b| {
                let da = (peak.freq - a.freq_per_day()).abs();
                let db = (peak.freq - b.freq_per_day()).abs();
                if (da - db).abs() <= 1e-12 {
                    a.parsimony().cmp(&b.parsimony())
                } else {
                    da.total_cmp(&db)
                }
            });
            match nearest {
                Some(line) => {
                    let deviation = peak.freq - line.freq_per_day();
                    let label = if deviation.abs() <= tolerance {
                        line.label()
                    } else {
                        PeakLabel::Unexplained
                    };
                    PeakClassification {
                        peak: peak.clone(),
                        label,
                        predicted_freq: line.freq_per_day(),
                        deviation,
                    }
                }
                None => PeakClassification {
                    peak: peak.clone(),
                    label: PeakLabel::Unexplained,
                    predicted_freq: f64::NAN,
                    deviation: f64::NAN,
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn peak(freq: f64) -> PeakInfo {
        PeakInfo {
            freq,
            period_days: 1.0 / freq,
            power: 1e-4,
            threshold: 0.0,
            amplitude: 0.01,
            bin_index: 0,
        }
    }

    fn line(model: &ModulationModel, k: u32, m: u32, sign: Sign) -> PredictedLine {
        *predict_frequencies(model)
            .iter()
            .find(|l| l.k == k && l.m == m && l.sign == sign)
            .unwrap()
    }

    #[test]
    fn first_sidebands_are_21_and_28_hours() {
        let model = ModulationModel::default();
        assert_eq!(line(&model, 1, 1, Sign::Plus).period_hours(), Ratio::from_integer(21));
        assert_eq!(line(&model, 1, 1, Sign::Minus).period_hours(), Ratio::from_integer(28));
        assert_eq!(line(&model, 1, 0, Sign::Plus).period_hours(), Ratio::from_integer(24));
    }

    #[test]
    fn second_harmonic_sidebands() {
        let model = ModulationModel::default();
        let up = line(&model, 2, 1, Sign::Plus).period_hours();
        let down = line(&model, 2, 1, Sign::Minus).period_hours();
        // 24 / (2 ± 1/7) = 168/15, 168/13
        assert_eq!(up, Ratio::new(168, 15));
        assert_eq!(down, Ratio::new(168, 13));
    }

    #[test]
    fn closed_under_formula_and_distinct() {
        let model = ModulationModel {
            k_max: 4,
            m_max: 3,
            ..Default::default()
        };
        let lines = predict_frequencies(&model);
        for l in &lines {
            let k = Ratio::from_integer(l.k as i64);
            let m = Ratio::from_integer(l.m as i64);
            let expect = match l.sign {
                Sign::Plus => model.f_d * k + model.f_w * m,
                Sign::Minus => model.f_d * k - model.f_w * m,
            };
            assert_eq!(l.freq, expect);
            assert!(l.freq > Ratio::from_integer(0));
        }
        assert!(lines.windows(2).all(|w| w[0].freq < w[1].freq));
        // k = 0 contributes weekly lines 1/7, 2/7, 3/7.
        assert_eq!(lines.iter().filter(|l| l.k == 0).count(), 3);
    }

    #[test]
    fn coincident_lines_keep_parsimonious_form() {
        let model = ModulationModel {
            f_d: Ratio::from_integer(1),
            f_w: Ratio::new(1, 2),
            k_max: 2,
            m_max: 2,
        };
        let lines = predict_frequencies(&model);
        let one = lines.iter().find(|l| l.freq == Ratio::from_integer(1)).unwrap();
        assert_eq!((one.k, one.m), (1, 0));
    }

    #[test]
    fn classification_examples() {
        let model = ModulationModel::default();
        let c = classify_peaks(&[peak(1.14), peak(0.137), peak(3.9)], &model, 0.046);
        assert_eq!(c[0].label, PeakLabel::Sideband { k: 1, m: 1, sign: Sign::Plus });
        assert_eq!(c[1].label, PeakLabel::WeeklyFundamental);
        assert!((c[1].deviation - (0.137 - 1.0 / 7.0)).abs() < 1e-12);
        assert_eq!(c[2].label, PeakLabel::Unexplained);
    }

    #[test]
    fn ties_prefer_smaller_orders() {
        // Halfway between 1 (k=1,m=0) and 8/7 (k=1,m=1,+).
        let model = ModulationModel::default();
        let mid = (1.0 + 8.0 / 7.0) / 2.0;
        let c = classify_peaks(&[peak(mid)], &model, 0.1);
        assert_eq!(c[0].label, PeakLabel::DailyFundamental);
    }

    #[test]
    fn invalid_models() {
        let mut m = ModulationModel::default();
        assert!(m.validate().is_ok());
        m.f_w = Ratio::from_integer(2);
        assert_eq!(m.validate(), Err(ModulationError::InvalidModel));
    }
}
