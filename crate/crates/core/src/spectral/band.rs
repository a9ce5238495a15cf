//! Per-bin significance thresholds from permutation surrogates.
//!
//! Surrogate `i` shuffles the series with a ChaCha8 stream seeded by
//! `item_seed(seed, i)` (mixed seed XOR index), so the band does not depend
//! on execution order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::welch::{WelchConfig, WelchPlan};
use super::SpectralError;
use crate::exec::{item_seed, Execution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceBand {
    pub threshold: Vec<f64>,
    pub n_perm: usize,
    pub alpha: f64,
    pub seed: u64,
}

pub fn permutation_band(
    y: &[f64],
    fs: f64,
    cfg: &WelchConfig,
    n_perm: usize,
    alpha: f64,
    seed: u64,
) -> Result<SignificanceBand, SpectralError> {
    permutation_band_with(y, fs, cfg, n_perm, alpha, seed, Execution::default())
}

pub fn permutation_band_with(
    y: &[f64],
    fs: f64,
    cfg: &WelchConfig,
    n_perm: usize,
    alpha: f64,
    seed: u64,
    exec: Execution,
) -> Result<SignificanceBand, SpectralError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SpectralError::BadAlpha(alpha));
    }
    if n_perm < 100 {
        return Err(SpectralError::TooFewPermutations(n_perm));
    }
    let plan = WelchPlan::new(fs, *cfg)?;
    plan.validate_input(y)?;
    let n_bins = plan.n_bins();

    let spectra = exec.map_indexed(
        n_perm,
        || (plan.scratch(), y.to_vec()),
        |(scratch, buf), i| {
            buf.copy_from_slice(y);
            let mut rng = ChaCha8Rng::seed_from_u64(item_seed(seed, i));
            buf.shuffle(&mut rng);
            let mut out = vec![0.0; n_bins];
            plan.compute_into(buf, scratch, &mut out);
            out
        },
    );

    // Nearest-rank (1 − alpha) quantile.
    let rank = ((1.0 - alpha) * n_perm as f64 - 1e-9).ceil().max(1.0) as usize;
    let mut column = vec![0.0; n_perm];
    let threshold = (0..n_bins)
        .map(|k| {
            for (c, s) in column.iter_mut().zip(&spectra) {
                *c = s[k];
            }
            let (_, kth, _) = column.select_nth_unstable_by(rank - 1, f64::total_cmp);
            *kth
        })
        .collect();

    Ok(SignificanceBand {
        threshold,
        n_perm,
        alpha,
        seed,
    })
}
