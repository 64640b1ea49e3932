//! MaxMedian: compares arms through the order statistic of rank `N_i / m`
//! counted from the top, with `m` the smallest pull count, plus `1/(t+1)`
//! uniform exploration.

use rand::Rng;

use crate::error::Result;
use crate::simulator::{Environment, TrajectoryRng};

use super::{argmax_lowest, play_stepwise, Policy, StepPolicy};

#[derive(Debug, Clone)]
pub struct MaxMedian {
    sorted_desc: Vec<Vec<f64>>,
}

impl MaxMedian {
    pub fn new(arms: usize) -> Self {
        Self {
            sorted_desc: vec![Vec::new(); arms],
        }
    }

    /// Seeds the per-arm histories directly (any order).
    pub fn from_rewards(rewards: Vec<Vec<f64>>) -> Self {
        let mut policy = Self::new(rewards.len());
        for (arm, values) in rewards.into_iter().enumerate() {
            for x in values {
                policy.record(arm, x);
            }
        }
        policy
    }

    pub fn pulls(&self) -> Vec<u64> {
        self.sorted_desc.iter().map(|v| v.len() as u64).collect()
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        let list = &mut self.sorted_desc[arm];
        let at = list.partition_point(|&v| v > reward);
        list.insert(at, reward);
    }

    /// `W_i`: the `⌊N_i/m⌋`-th largest reward of each arm.
    pub fn order_statistics(&self) -> Vec<f64> {
        let m = self.sorted_desc.iter().map(Vec::len).min().unwrap_or(0);
        assert!(m > 0, "every arm needs one pull first");
        self.sorted_desc.iter().map(|v| v[v.len() / m - 1]).collect()
    }

    /// Greedy choice on `W`, ignoring the exploration coin.
    pub fn greedy_arm(&self) -> usize {
        argmax_lowest(self.order_statistics())
    }

    pub fn select_arm<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if let Some(arm) = self.sorted_desc.iter().position(Vec::is_empty) {
            return arm;
        }
        let t: usize = self.sorted_desc.iter().map(Vec::len).sum();
        if rng.random::<f64>() < 1.0 / (t as f64 + 1.0) {
            return rng.random_range(0..self.sorted_desc.len());
        }
        self.greedy_arm()
    }
}

impl StepPolicy for MaxMedian {
    fn select(&mut self, rng: &mut TrajectoryRng) -> usize {
        self.select_arm(rng)
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        self.record(arm, reward);
    }
}

impl Policy for MaxMedian {
    fn play(&mut self, env: &mut Environment<'_>) -> Result<()> {
        play_stepwise(self, env);
        Ok(())
    }

    fn peak_memory_cells(&self) -> usize {
        self.sorted_desc.iter().map(Vec::len).sum()
    }
}
