//! Trajectory execution and evaluation metrics.
//!
//! Rewards are drawn on demand from a per-trajectory ChaCha stream, so a
//! trajectory is fully determined by its [`TrajectorySeed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::ArmDistribution;
use crate::error::{Error, Result};
use crate::policies::PolicySpec;
use crate::qomax::quantile_rank;

pub type TrajectoryRng = ChaCha8Rng;

/// Percentiles reported in the summary tables.
pub const SUMMARY_LEVELS: [f64; 7] = [0.01, 0.10, 0.25, 0.50, 0.75, 0.90, 0.99];

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key and stream of one trajectory's random generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectorySeed {
    pub key: u64,
    pub stream: u64,
}

impl TrajectorySeed {
    /// Trajectory `index` of a run at `horizon` under `master_seed`.
    ///
    /// Each horizon gets its own key; the index selects the ChaCha stream.
    pub fn new(master_seed: u64, horizon: u64, index: u64) -> Self {
        Self {
            key: splitmix64(master_seed ^ splitmix64(horizon)),
            stream: index,
        }
    }

    pub fn rng(&self) -> TrajectoryRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(self.stream);
        rng
    }
}

/// Arms plus a pull budget.
pub struct Environment<'a> {
    arms: &'a [ArmDistribution],
    rng: TrajectoryRng,
    remaining: u64,
    pulls: Vec<u64>,
    max_reward: f64,
}

impl<'a> Environment<'a> {
    pub fn new(arms: &'a [ArmDistribution], horizon: u64, rng: TrajectoryRng) -> Self {
        Self {
            arms,
            rng,
            remaining: horizon,
            pulls: vec![0; arms.len()],
            max_reward: f64::NEG_INFINITY,
        }
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    /// Draws from `arm`, or `None` once the budget is spent.
    pub fn pull(&mut self, arm: usize) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        self.pulls[arm] += 1;
        let x = self.arms[arm].sample(&mut self.rng);
        self.max_reward = self.max_reward.max(x);
        Some(x)
    }

    pub fn rng(&mut self) -> &mut TrajectoryRng {
        &mut self.rng
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn max_reward(&self) -> f64 {
        self.max_reward
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryResult {
    pub pulls_per_arm: Vec<u64>,
    pub best_arm_fraction: f64,
    pub max_reward: f64,
    pub peak_memory_cells: usize,
    pub seed: u64,
    pub stream: u64,
}

/// Plays `policy` for `horizon` pulls; `dominant` is the 0-based best arm.
pub fn run_trajectory(
    arms: &[ArmDistribution],
    policy: &PolicySpec,
    horizon: u64,
    seed: TrajectorySeed,
    dominant: usize,
) -> Result<TrajectoryResult> {
    if arms.is_empty() {
        return Err(Error::invalid("arms", "need at least one arm"));
    }
    if horizon < arms.len() as u64 {
        return Err(Error::invalid(
            "horizon",
            format!("{horizon} is smaller than the number of arms"),
        ));
    }
    if dominant >= arms.len() {
        return Err(Error::invalid("dominant_arm", format!("no arm {}", dominant + 1)));
    }
    let mut env = Environment::new(arms, horizon, seed.rng());
    let mut player = policy.build(arms.len(), horizon)?;
    player.play(&mut env)?;
    debug_assert_eq!(env.remaining(), 0);
    let pulls_per_arm = env.pulls().to_vec();
    Ok(TrajectoryResult {
        best_arm_fraction: pulls_per_arm[dominant] as f64 / horizon as f64,
        pulls_per_arm,
        max_reward: env.max_reward(),
        peak_memory_cells: player.peak_memory_cells(),
        seed: seed.key,
        stream: seed.stream,
    })
}

/// Order-`q` empirical quantile of already sorted values (rank `⌈N q⌉`).
fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    sorted[quantile_rank(sorted.len(), q) - 1]
}

fn sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `(E[X⁺_T] − X̂_T(q̃)) / E[X⁺_T]` over per-trajectory maxima.
pub fn proxy_empirical_regret(max_rewards: &[f64], dominant: &ArmDistribution, horizon: u64) -> Result<f64> {
    if max_rewards.is_empty() {
        return Err(Error::invalid("max_rewards", "no trajectories"));
    }
    let expected = dominant.expected_max_approx(horizon)?;
    let level = dominant.per_quantile(horizon)?;
    let estimate = sorted_quantile(&sorted(max_rewards.iter().copied()), level);
    Ok((expected - estimate) / expected)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsSummary {
    pub trajectories: usize,
    pub mean_best_arm_fraction: f64,
    /// Best-arm fraction at [`SUMMARY_LEVELS`].
    pub best_arm_quantiles: [f64; 7],
    /// Trajectory maximum at [`SUMMARY_LEVELS`].
    pub max_reward_quantiles: [f64; 7],
    pub per: Option<f64>,
}

/// Aggregates trajectories. PER is reported when the dominant law supports it.
pub fn summarize(
    results: &[TrajectoryResult],
    dominant: Option<&ArmDistribution>,
    horizon: u64,
) -> Result<MetricsSummary> {
    if results.is_empty() {
        return Err(Error::invalid("results", "no trajectories"));
    }
    let fractions = sorted(results.iter().map(|r| r.best_arm_fraction));
    let maxima = sorted(results.iter().map(|r| r.max_reward));
    let per = dominant.and_then(|d| proxy_empirical_regret(&maxima, d, horizon).ok());
    Ok(MetricsSummary {
        trajectories: results.len(),
        mean_best_arm_fraction: fractions.iter().sum::<f64>() / fractions.len() as f64,
        best_arm_quantiles: SUMMARY_LEVELS.map(|q| sorted_quantile(&fractions, q)),
        max_reward_quantiles: SUMMARY_LEVELS.map(|q| sorted_quantile(&maxima, q)),
        per,
    })
}
