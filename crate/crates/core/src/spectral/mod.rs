//! Welch power spectra, permutation significance bands and peak extraction.

mod band;
mod peaks;
mod welch;

pub use band::{permutation_band, permutation_band_with, SignificanceBand};
pub use peaks::{detect_peaks, detect_peaks_with, explained_variance, ExplainedVariance, PeakInfo, PeakRule};
pub use welch::{welch, Detrend, Normalization, Spectrum, WelchConfig, WelchPlan, Window};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("empty input series")]
    Empty,
    #[error("segment length {nperseg} exceeds series length {n}")]
    SegmentTooLong { nperseg: usize, n: usize },
    #[error("segment length must be at least 8, got {0}")]
    SegmentTooShort(usize),
    #[error("overlap fraction must lie in [0, 1), got {0}")]
    BadOverlap(f64),
    #[error("sampling rate must be positive, got {0}")]
    BadRate(f64),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("alpha must lie in (0, 1), got {0}")]
    BadAlpha(f64),
    #[error("at least 100 permutations are required, got {0}")]
    TooFewPermutations(usize),
    #[error("spectrum and band use different frequency grids")]
    GridMismatch,
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
}
