//! Deterministic parallel execution of independent trials.
//!
//! Trial `i` always draws from `ChaCha8Rng::seed_from_u64(trial_seed(master, i))`,
//! and results are returned in trial order, so output does not depend on
//! the number of workers or on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::Result;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index`: the `index + 1`-th SplitMix64 output of a
/// generator started at `splitmix64(master)`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let state = splitmix64(master).wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    splitmix64(state)
}

pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, index))
}

/// Runs `f(index, seed, rng)` for every trial on a pool of `workers`
/// threads and returns the results in trial order.
pub fn run_trials<T, F>(trials: usize, master: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()?;
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let seed = trial_seed(master, i as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                f(i, seed, &mut rng)
            })
            .collect()
    })
}
