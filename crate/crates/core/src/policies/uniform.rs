//! Round-robin baseline.

use crate::error::Result;
use crate::simulator::{Environment, TrajectoryRng};

use super::{play_stepwise, Policy, StepPolicy};

pub fn uniform_select(round: u64, arms: usize) -> usize {
    (round % arms as u64) as usize
}

#[derive(Debug, Clone)]
pub struct Uniform {
    arms: usize,
    round: u64,
}

impl Uniform {
    pub fn new(arms: usize) -> Self {
        Self { arms, round: 0 }
    }
}

impl StepPolicy for Uniform {
    fn select(&mut self, _rng: &mut TrajectoryRng) -> usize {
        uniform_select(self.round, self.arms)
    }

    fn observe(&mut self, _arm: usize, _reward: f64) {
        self.round += 1;
    }
}

impl Policy for Uniform {
    fn play(&mut self, env: &mut Environment<'_>) -> Result<()> {
        play_stepwise(self, env);
        Ok(())
    }

    fn peak_memory_cells(&self) -> usize {
        0
    }
}
