//! Execution mode for the data-parallel loops (permutation surrogates).
//!
//! With the `parallel` feature disabled every mode runs sequentially. Both
//! modes produce bit-identical results: each work item is seeded from its
//! index alone and results are collected in index order.

use serde::{Deserialize, Serialize};

/// Seed of work item `index` under top-level `seed`: the splitmix64 mix of
/// `seed`, XOR `index`. Mixing first keeps seeds that differ only in their
/// low bits from producing the same set of item seeds.
pub fn item_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31)) ^ index as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Maps `f` over `0..n`, returning results in index order.
    ///
    /// `init` builds per-worker scratch state.
    pub fn map_indexed<S, T, I, F>(self, n: usize, init: I, f: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map_init(&init, |s, i| f(s, i)).collect()
            }
            _ => {
                let mut scratch = init();
                (0..n).map(|i| f(&mut scratch, i)).collect()
            }
        }
    }
}
