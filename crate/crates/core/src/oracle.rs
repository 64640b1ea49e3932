//! Brute-force references.
//!
//! Nothing here touches the compressed storage or the estimator code; the
//! QoMax rank rule is re-derived by sorting.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::ArmDistribution;

/// Replications per random stream; fixes results independently of thread count.
const CHUNK: u64 = 512;

/// Estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

fn rank_statistic(mut values: Vec<f64>, q: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let b = values.len();
    let mut rank = 1;
    while (rank as f64) < b as f64 * q - 1e-9 {
        rank += 1;
    }
    values[rank.min(b) - 1]
}

/// QoMax of an uncompressed table, `table[j]` being batch `j`. `None` when empty.
pub fn naive_qomax(table: &[Vec<f64>], q: f64) -> Option<f64> {
    if table.is_empty() || table.iter().any(Vec::is_empty) {
        return None;
    }
    let maxima = table
        .iter()
        .map(|batch| batch.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Some(rank_statistic(maxima, q))
}

/// Maximum of the 1-based positions strictly after `cutoff`.
pub fn naive_suffix_max(sequence: &[f64], cutoff: usize) -> Option<f64> {
    sequence
        .get(cutoff..)
        .filter(|s| !s.is_empty())
        .map(|s| s.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// `H_N = Σ_{n ≤ N} 1/n`, summed from the small terms up.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

fn chunked<F>(reps: u64, seed: u64, per_rep: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = reps.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(reps - c * CHUNK);
            (0..len).map(|_| per_rep(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// Frequency of `QoMax(dist1) ≤ QoMax(dist2)` with `b` batches of `n` draws each.
pub fn mc_comparison_prob(
    dist1: &ArmDistribution,
    dist2: &ArmDistribution,
    n: u64,
    b: usize,
    q: f64,
    reps: u64,
    seed: u64,
) -> Estimate {
    let hits = chunked(reps, seed, |rng| {
        let x: Vec<f64> = (0..b).map(|_| dist1.sample_max(n, rng)).collect();
        let y: Vec<f64> = (0..b).map(|_| dist2.sample_max(n, rng)).collect();
        f64::from(u8::from(rank_statistic(x, q) <= rank_statistic(y, q)))
    });
    let p = hits.iter().sum::<f64>() / reps as f64;
    Estimate {
        value: p,
        std_error: (p * (1.0 - p) / reps as f64).sqrt(),
    }
}

/// Monte Carlo mean of the maximum of `horizon` draws.
pub fn mc_expected_max(dist: &ArmDistribution, horizon: u64, reps: u64, seed: u64) -> Estimate {
    let maxima = chunked(reps, seed, |rng| dist.sample_max(horizon, rng));
    let n = maxima.len() as f64;
    let mean = maxima.iter().sum::<f64>() / n;
    let var = maxima.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Estimate {
        value: mean,
        std_error: (var / n).sqrt(),
    }
}
