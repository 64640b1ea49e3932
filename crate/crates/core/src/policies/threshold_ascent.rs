//! ThresholdAscent: a Chernoff-style index on the share of each arm's rewards
//! among the `s` largest rewards observed so far.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::simulator::{Environment, TrajectoryRng};

use super::{argmax_lowest, play_stepwise, Policy, StepPolicy};

#[derive(Debug, Clone, Copy)]
struct Entry {
    reward: f64,
    arm: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.reward
            .total_cmp(&other.reward)
            .then(self.arm.cmp(&other.arm))
    }
}

/// Upper confidence bound `μ + (α + √(2nμα + α²))/n`.
pub fn chernoff_index(mean: f64, n: u64, alpha: f64) -> f64 {
    let n = n as f64;
    mean + (alpha + (2.0 * n * mean * alpha + alpha * alpha).sqrt()) / n
}

#[derive(Debug, Clone)]
pub struct ThresholdAscent {
    s: usize,
    delta: f64,
    top: BinaryHeap<Reverse<Entry>>,
    above: Vec<u64>,
    pulls: Vec<u64>,
}

impl ThresholdAscent {
    pub fn new(arms: usize, s: usize, delta: f64) -> Result<Self> {
        if arms == 0 {
            return Err(Error::invalid("arms", "need at least one arm"));
        }
        if s == 0 {
            return Err(Error::invalid("s", "must be positive"));
        }
        Ok(Self {
            s,
            delta,
            top: BinaryHeap::with_capacity(s + 1),
            above: vec![0; arms],
            pulls: vec![0; arms],
        })
    }

    /// `S_i`: how many of the current top-`s` rewards came from each arm.
    pub fn threshold_counts(&self) -> &[u64] {
        &self.above
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    /// Smallest kept reward.
    pub fn threshold(&self) -> Option<f64> {
        self.top.peek().map(|Reverse(e)| e.reward)
    }

    pub fn select_arm(&self) -> usize {
        if let Some(arm) = self.pulls.iter().position(|&n| n == 0) {
            return arm;
        }
        let k = self.pulls.len() as f64;
        let total: u64 = self.pulls.iter().sum();
        let alpha = (2.0 * total as f64 * k / self.delta).ln();
        argmax_lowest(
            self.above
                .iter()
                .zip(&self.pulls)
                .map(|(&s_i, &n_i)| chernoff_index(s_i as f64 / n_i as f64, n_i, alpha)),
        )
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        self.pulls[arm] += 1;
        let entry = Entry { reward, arm };
        if self.top.len() < self.s {
            self.top.push(Reverse(entry));
            self.above[arm] += 1;
        } else if reward > self.threshold().expect("heap is full") {
            let Reverse(evicted) = self.top.pop().expect("heap is full");
            self.above[evicted.arm] -= 1;
            self.top.push(Reverse(entry));
            self.above[arm] += 1;
        }
    }
}

impl StepPolicy for ThresholdAscent {
    fn select(&mut self, _rng: &mut TrajectoryRng) -> usize {
        self.select_arm()
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        self.record(arm, reward);
    }
}

impl Policy for ThresholdAscent {
    fn play(&mut self, env: &mut Environment<'_>) -> Result<()> {
        play_stepwise(self, env);
        Ok(())
    }

    fn peak_memory_cells(&self) -> usize {
        self.top.len()
    }
}
