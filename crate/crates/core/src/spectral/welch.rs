//! Welch's averaged periodogram with a periodic Hann taper.
//!
//! Segments of `nperseg` samples advance by `nperseg − ⌊overlap·nperseg⌋`;
//! trailing samples that do not fill a segment are dropped. Two scalings are
//! offered:
//!
//! * `Amplitude`: an on-bin sinusoid of amplitude `A` produces a peak of `A²`.
//! * `Variance`: bin powers sum to the (segment-averaged) variance of the input.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::SpectralError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    Amplitude,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detrend {
    None,
    #[default]
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchConfig {
    pub nperseg: usize,
    pub overlap_fraction: f64,
    pub window: Window,
    pub normalization: Normalization,
    pub detrend: Detrend,
}

impl WelchConfig {
    pub fn new(nperseg: usize) -> Self {
        Self {
            nperseg,
            overlap_fraction: 0.5,
            window: Window::Hann,
            normalization: Normalization::Amplitude,
            detrend: Detrend::Mean,
        }
    }

    /// Segment length `⌊n / divisor⌋`.
    pub fn for_length(n: usize, divisor: usize) -> Self {
        Self::new(n / divisor.max(1))
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn noverlap(&self) -> usize {
        (self.overlap_fraction * self.nperseg as f64).floor() as usize
    }

    pub fn hop(&self) -> usize {
        self.nperseg - self.noverlap()
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        if self.nperseg < 8 {
            return Err(SpectralError::SegmentTooShort(self.nperseg));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(SpectralError::BadOverlap(self.overlap_fraction));
        }
        Ok(())
    }
}

/// One-sided power spectrum. Index 0 is the DC bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub df: f64,
    pub fs: f64,
    pub n_segments: usize,
    pub normalization: Normalization,
    /// Converts a bin power into a squared sinusoid amplitude (on-bin).
    pub amplitude_factor: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Index of the bin nearest to `freq`.
    pub fn bin_of(&self, freq: f64) -> usize {
        ((freq / self.df).round().max(0.0) as usize).min(self.len().saturating_sub(1))
    }

    /// Sum of powers over all non-DC bins.
    pub fn total_power(&self) -> f64 {
        self.power.iter().skip(1).sum()
    }
}

/// Reusable FFT plan, window and scaling for one `(nperseg, fs, cfg)`.
pub struct WelchPlan {
    cfg: WelchConfig,
    fs: f64,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    scale: Vec<f64>,
    amplitude_factor: f64,
}

/// Per-thread buffers for [`WelchPlan::compute_into`].
pub struct WelchScratch {
    buf: Vec<Complex<f64>>,
    fft_scratch: Vec<Complex<f64>>,
}

impl WelchPlan {
    pub fn new(fs: f64, cfg: WelchConfig) -> Result<Self, SpectralError> {
        cfg.validate()?;
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(SpectralError::BadRate(fs));
        }
        let n = cfg.nperseg;
        let window: Vec<f64> = match cfg.window {
            Window::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
                .collect(),
        };
        let sum_w: f64 = window.iter().sum();
        let sum_w2: f64 = window.iter().map(|w| w * w).sum();
        let n_bins = n / 2 + 1;
        let edge = |k: usize| k == 0 || (n.is_multiple_of(2) && k == n / 2);
        let (interior, base, amplitude_factor) = match cfg.normalization {
            Normalization::Amplitude => (4.0, 1.0 / (sum_w * sum_w), 1.0),
            Normalization::Variance => (
                2.0,
                1.0 / (n as f64 * sum_w2),
                2.0 * n as f64 * sum_w2 / (sum_w * sum_w),
            ),
        };
        let scale = (0..n_bins)
            .map(|k| if edge(k) { base } else { interior * base })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(n);
        Ok(Self {
            cfg,
            fs,
            window,
            fft,
            scale,
            amplitude_factor,
        })
    }

    pub fn config(&self) -> &WelchConfig {
        &self.cfg
    }

    pub fn n_bins(&self) -> usize {
        self.scale.len()
    }

    pub fn scratch(&self) -> WelchScratch {
        WelchScratch {
            buf: vec![Complex::default(); self.cfg.nperseg],
            fft_scratch: vec![Complex::default(); self.fft.get_inplace_scratch_len()],
        }
    }

    fn segment_count(&self, n: usize) -> usize {
        (n - self.cfg.nperseg) / self.cfg.hop() + 1
    }

    fn check_input(&self, y: &[f64]) -> Result<(), SpectralError> {
        if y.is_empty() {
            return Err(SpectralError::Empty);
        }
        if self.cfg.nperseg > y.len() {
            return Err(SpectralError::SegmentTooLong {
                nperseg: self.cfg.nperseg,
                n: y.len(),
            });
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite(i));
        }
        Ok(())
    }

    /// Averaged periodogram of `y` written into `out` (length `n_bins`).
    /// Returns the number of segments. Input is assumed validated.
    pub fn compute_into(&self, y: &[f64], scratch: &mut WelchScratch, out: &mut [f64]) -> usize {
        let n = self.cfg.nperseg;
        let hop = self.cfg.hop();
        let segments = self.segment_count(y.len());
        out.iter_mut().for_each(|p| *p = 0.0);
        for s in 0..segments {
            let seg = &y[s * hop..s * hop + n];
            let offset = match self.cfg.detrend {
                Detrend::Mean => seg.iter().sum::<f64>() / n as f64,
                Detrend::None => 0.0,
            };
            for ((b, &v), &w) in scratch.buf.iter_mut().zip(seg).zip(&self.window) {
                *b = Complex::new((v - offset) * w, 0.0);
            }
            self.fft.process_with_scratch(&mut scratch.buf, &mut scratch.fft_scratch);
            for (p, x) in out.iter_mut().zip(&scratch.buf) {
                *p += x.norm_sqr();
            }
        }
        let inv = 1.0 / segments as f64;
        for (p, s) in out.iter_mut().zip(&self.scale) {
            *p *= s * inv;
        }
        segments
    }

    pub fn compute(&self, y: &[f64]) -> Result<Spectrum, SpectralError> {
        self.check_input(y)?;
        let mut scratch = self.scratch();
        let mut power = vec![0.0; self.n_bins()];
        let n_segments = self.compute_into(y, &mut scratch, &mut power);
        let df = self.fs / self.cfg.nperseg as f64;
        Ok(Spectrum {
            freqs: (0..self.n_bins()).map(|k| k as f64 * df).collect(),
            power,
            df,
            fs: self.fs,
            n_segments,
            normalization: self.cfg.normalization,
            amplitude_factor: self.amplitude_factor,
        })
    }

    pub(crate) fn validate_input(&self, y: &[f64]) -> Result<(), SpectralError> {
        self.check_input(y)
    }
}

/// Welch spectrum of a gap-free series sampled at `fs` per unit time.
pub fn welch(y: &[f64], fs: f64, cfg: &WelchConfig) -> Result<Spectrum, SpectralError> {
    WelchPlan::new(fs, *cfg)?.compute(y)
}
