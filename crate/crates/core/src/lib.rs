//! Auditing toolkit for time invariance of stochastic networked services.
//!
//! A probe log of scored replicate responses is aligned onto an even grid,
//! tested for linear drift with Newey–West HAC standard errors, and scanned
//! for periodic structure with Welch spectra against permutation-derived
//! significance bands. Significant peaks are attributed to a multiplicative
//! daily × weekly modulation model and recombined into a composite signal.
//!
//! The pipeline entry point is [`report::analyze`].

// Negated comparisons below deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod drift;
pub mod exec;
pub mod log;
pub mod modulation;
pub mod phase;
pub mod report;
pub mod scoring;
pub mod series;
pub mod spectral;
mod stats;

pub use drift::{fit_drift, DriftConfig, DriftReference, DriftResult};
pub use exec::Execution;
pub use modulation::{classify_peaks, predict_frequencies, ModulationModel, PeakClassification, PeakLabel};
pub use phase::{fit_phase, reconstruct, PhaseFit, Reconstruction};
pub use report::{analyze, AnalysisConfig, AuditReport};
pub use scoring::{parse_structured, score_response, StructuredAnswer, TaskSpec};
pub use series::{EvenSeries, MeasurementRecord, TimePoint, WeekdayHourGrid};
pub use spectral::{
    detect_peaks, explained_variance, permutation_band, welch, Normalization, PeakInfo, PeakRule,
    SignificanceBand, Spectrum, WelchConfig,
};
