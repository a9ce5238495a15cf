use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use temporal_audit::spectral::{
    detect_peaks, permutation_band, permutation_band_with, welch, Detrend, Normalization, WelchConfig,
};
use temporal_audit::Execution;

fn noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Welch by direct O(n²) DFT sums, written from the definition.
fn naive_welch(y: &[f64], fs: f64, nperseg: usize, noverlap: usize, variance: bool) -> Vec<f64> {
    let hop = nperseg - noverlap;
    let w: Vec<f64> = (0..nperseg)
        .map(|i| (PI * i as f64 / nperseg as f64).sin().powi(2))
        .collect();
    let s1: f64 = w.iter().sum();
    let s2: f64 = w.iter().map(|v| v * v).sum();
    let bins = nperseg / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut count = 0;
    let mut start = 0;
    while start + nperseg <= y.len() {
        let seg = &y[start..start + nperseg];
        let m = seg.iter().sum::<f64>() / nperseg as f64;
        for (k, a) in acc.iter_mut().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, v) in seg.iter().enumerate() {
                let ang = -2.0 * PI * (k * j) as f64 / nperseg as f64;
                re += (v - m) * w[j] * ang.cos();
                im += (v - m) * w[j] * ang.sin();
            }
            *a += re * re + im * im;
        }
        count += 1;
        start += hop;
    }
    let _ = fs;
    acc.iter()
        .enumerate()
        .map(|(k, a)| {
            let edge = k == 0 || (nperseg.is_multiple_of(2) && k == nperseg / 2);
            let base = if variance { 1.0 / (nperseg as f64 * s2) } else { 1.0 / (s1 * s1) };
            let one_sided = if edge { 1.0 } else if variance { 2.0 } else { 4.0 };
            a / count as f64 * base * one_sided
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_naive_dft(seed in any::<u64>(), nperseg in 8usize..64, extra in 0usize..200, variance in any::<bool>(), overlap in 0.0f64..0.9) {
        let n = nperseg + extra;
        let y = noise(n, seed);
        let mut cfg = WelchConfig::new(nperseg);
        cfg.overlap_fraction = overlap;
        if variance {
            cfg = cfg.with_normalization(Normalization::Variance);
        }
        let s = welch(&y, 8.0, &cfg).unwrap();
        let oracle = naive_welch(&y, 8.0, nperseg, cfg.noverlap(), variance);
        prop_assert_eq!(s.power.len(), oracle.len());
        for (a, b) in s.power.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{} vs {}", a, b);
        }
        prop_assert!(s.power.iter().all(|&p| p >= 0.0));
        prop_assert!(s.freqs.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(*s.freqs.last().unwrap() <= 4.0 + 1e-12);
        prop_assert!((s.df - 8.0 / nperseg as f64).abs() < 1e-15);
    }

    #[test]
    fn scaling_and_offset(seed in any::<u64>(), c in -5.0f64..5.0, d in -10.0f64..10.0) {
        let y = noise(400, seed);
        let cfg = WelchConfig::new(100);
        let base = welch(&y, 8.0, &cfg).unwrap();
        let scaled: Vec<f64> = y.iter().map(|v| c * v).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + d).collect();
        let sc = welch(&scaled, 8.0, &cfg).unwrap();
        let sh = welch(&shifted, 8.0, &cfg).unwrap();
        for k in 0..base.len() {
            prop_assert!((sc.power[k] - c * c * base.power[k]).abs() <= 1e-10 * (1.0 + base.power[k]));
            prop_assert!((sh.power[k] - base.power[k]).abs() <= 1e-9 * (1.0 + base.power[k]));
        }
    }

    #[test]
    fn on_bin_sinusoid_recovers_amplitude(a in 0.01f64..3.0, k in 1usize..40, phase in 0.0f64..6.3) {
        let fs = 8.0;
        let nperseg = 100;
        let f = k as f64 * fs / nperseg as f64;
        let y: Vec<f64> = (0..600).map(|i| a * (2.0 * PI * f * i as f64 / fs + phase).sin()).collect();
        let s = welch(&y, fs, &WelchConfig::new(nperseg)).unwrap();
        prop_assert!((s.power[k] - a * a).abs() < 1e-9 * (1.0 + a * a));
        let peak_amp = (s.power[k] * s.amplitude_factor).sqrt();
        prop_assert!((peak_amp - a).abs() < 1e-9);
    }
}

#[test]
fn variance_normalization_sums_to_variance() {
    let mut totals = Vec::new();
    for seed in 0..50 {
        let y = noise(702, seed);
        let m = y.iter().sum::<f64>() / y.len() as f64;
        let var = y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / y.len() as f64;
        let s = welch(&y, 8.0, &WelchConfig::for_length(702, 4).with_normalization(Normalization::Variance)).unwrap();
        let total = s.power.iter().sum::<f64>();
        assert!((total / var - 1.0).abs() < 0.1, "total {total} vs variance {var}");
        totals.push(total);
    }
    let mean = totals.iter().sum::<f64>() / totals.len() as f64;
    assert!((mean - 1.0).abs() < 0.05, "mean total {mean}");
}

#[test]
fn detrend_none_keeps_offset_in_dc() {
    let mut cfg = WelchConfig::new(64);
    cfg.detrend = Detrend::None;
    let s = welch(&[1.0; 256], 8.0, &cfg).unwrap();
    assert!((s.power[0] - 1.0).abs() < 1e-12);
}

#[test]
fn band_is_bit_identical_across_modes_and_runs() {
    let y = noise(702, 77);
    let cfg = WelchConfig::for_length(702, 4);
    let a = permutation_band_with(&y, 8.0, &cfg, 300, 0.05, 2024, Execution::Sequential).unwrap();
    let b = permutation_band_with(&y, 8.0, &cfg, 300, 0.05, 2024, Execution::Parallel).unwrap();
    let c = permutation_band_with(&y, 8.0, &cfg, 300, 0.05, 2024, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(b, c);
    assert!(a.threshold.iter().all(|&t| t >= 0.0));
    assert_eq!(a.threshold.len(), 88);
}

#[test]
fn white_noise_flags_about_alpha_of_bins() {
    // Monte Carlo false-positive oracle: each run tests its own band.
    let cfg = WelchConfig::for_length(702, 4);
    let mut fractions = Vec::new();
    for run in 0..200u64 {
        let y = noise(702, 5000 + run);
        let spec = welch(&y, 8.0, &cfg).unwrap();
        let band = permutation_band(&y, 8.0, &cfg, 200, 0.05, run).unwrap();
        let flagged = (1..spec.len()).filter(|&k| spec.power[k] > band.threshold[k]).count();
        fractions.push(flagged as f64 / (spec.len() - 1) as f64);
    }
    let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
    assert!((mean - 0.05).abs() <= 0.02, "mean flagged fraction {mean}");
}

#[test]
fn peaks_carry_threshold_and_amplitude() {
    let fs = 8.0;
    let mut y = noise(702, 3);
    for (i, v) in y.iter_mut().enumerate() {
        *v = 0.05 * *v + 0.1 * (2.0 * PI * (25.0 * 8.0 / 175.0) * i as f64 / fs).cos();
    }
    let cfg = WelchConfig::for_length(702, 4);
    let spec = welch(&y, fs, &cfg).unwrap();
    let band = permutation_band(&y, fs, &cfg, 500, 0.05, 1).unwrap();
    let peaks = detect_peaks(&spec, &band).unwrap();
    let top = peaks.iter().max_by(|a, b| a.power.total_cmp(&b.power)).unwrap();
    assert_eq!(top.bin_index, 25);
    assert!((top.amplitude - 0.1).abs() < 0.01);
    for p in &peaks {
        assert!(p.power > p.threshold);
        assert_eq!(p.threshold, band.threshold[p.bin_index]);
        assert!((p.amplitude * p.amplitude - p.power).abs() < 1e-15);
    }
}
