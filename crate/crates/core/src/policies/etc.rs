//! QoMax Explore-Then-Commit.

use crate::error::{Error, Result};
use crate::qomax::qomax_of_maxima;
use crate::simulator::Environment;

use super::{argmax_lowest, Policy};

/// `(n_T, b_T) = (⌈ln T⌉, ⌈(ln T)²⌉)`, failing when `K n_T b_T > T`.
pub fn etc_exploration_lengths(horizon: u64, arms: usize) -> Result<(u64, u64)> {
    let log_t = (horizon.max(1) as f64).ln();
    let n_t = (log_t.ceil() as u64).max(1);
    let b_t = ((log_t * log_t).ceil() as u64).max(1);
    let required = arms as u64 * n_t * b_t;
    if required > horizon {
        return Err(Error::HorizonTooSmall { horizon, required });
    }
    Ok((n_t, b_t))
}

/// Like [`etc_exploration_lengths`], but on overflow keeps `n_T` and shrinks
/// `b_T` to the largest value with `K n_T b_T ≤ T/2`.
pub fn etc_harness_lengths(horizon: u64, arms: usize) -> Result<(u64, u64)> {
    match etc_exploration_lengths(horizon, arms) {
        Err(Error::HorizonTooSmall { .. }) => {
            let n_t = ((horizon.max(1) as f64).ln().ceil() as u64).max(1);
            let b_t = horizon / (2 * arms as u64 * n_t);
            if b_t == 0 {
                return Err(Error::HorizonTooSmall {
                    horizon,
                    required: 2 * arms as u64 * n_t,
                });
            }
            Ok((n_t, b_t))
        }
        other => other,
    }
}

/// Arm with the largest QoMax of its batch maxima; ties go to the lowest index.
pub fn etc_commit(batch_maxima: &[Vec<f64>], q: f64) -> Result<usize> {
    let values = batch_maxima
        .iter()
        .map(|maxima| qomax_of_maxima(maxima, q))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(argmax_lowest(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtcPhase {
    Explore,
    Commit(usize),
}

#[derive(Debug, Clone)]
pub struct QomaxEtc {
    arms: usize,
    n_t: u64,
    b_t: u64,
    q: f64,
    phase: EtcPhase,
    batch_maxima: Vec<Vec<f64>>,
}

impl QomaxEtc {
    pub fn new(arms: usize, n_t: u64, b_t: u64, q: f64) -> Result<Self> {
        if arms == 0 {
            return Err(Error::invalid("arms", "need at least one arm"));
        }
        if n_t == 0 || b_t == 0 {
            return Err(Error::invalid("n_t/b_t", "must be positive"));
        }
        Ok(Self {
            arms,
            n_t,
            b_t,
            q,
            phase: EtcPhase::Explore,
            batch_maxima: vec![Vec::new(); arms],
        })
    }

    pub fn phase(&self) -> EtcPhase {
        self.phase
    }

    pub fn exploration_pulls(&self) -> u64 {
        self.arms as u64 * self.n_t * self.b_t
    }
}

impl Policy for QomaxEtc {
    fn play(&mut self, env: &mut Environment<'_>) -> Result<()> {
        let required = self.exploration_pulls();
        if required > env.remaining() {
            return Err(Error::HorizonTooSmall {
                horizon: env.remaining(),
                required,
            });
        }
        for (arm, maxima) in self.batch_maxima.iter_mut().enumerate() {
            for _ in 0..self.b_t {
                let mut best = f64::NEG_INFINITY;
                for _ in 0..self.n_t {
                    best = best.max(env.pull(arm).expect("exploration fits the budget"));
                }
                maxima.push(best);
            }
        }
        let arm = etc_commit(&self.batch_maxima, self.q)?;
        self.phase = EtcPhase::Commit(arm);
        while env.pull(arm).is_some() {}
        Ok(())
    }

    fn peak_memory_cells(&self) -> usize {
        self.arms * self.b_t as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ArmDistribution;
    use crate::simulator::TrajectorySeed;

    #[test]
    fn lengths_follow_the_log_rule() {
        assert_eq!(etc_exploration_lengths(50_000, 5).unwrap(), (11, 118));
        assert!(matches!(
            etc_exploration_lengths(55, 1),
            Err(Error::HorizonTooSmall {
                horizon: 55,
                required: 85
            })
        ));
        assert!(matches!(
            etc_exploration_lengths(1000, 5),
            Err(Error::HorizonTooSmall {
                horizon: 1000,
                required: 1680
            })
        ));
    }

    #[test]
    fn harness_shrinks_batches() {
        assert_eq!(etc_harness_lengths(1000, 5).unwrap(), (7, 14));
        assert_eq!(etc_harness_lengths(50_000, 5).unwrap(), (11, 118));
        assert!(etc_harness_lengths(10, 5).is_err());
    }

    #[test]
    fn commit_ties_go_low() {
        let maxima = vec![vec![3.2], vec![7.1], vec![7.1]];
        assert_eq!(etc_commit(&maxima, 0.5).unwrap(), 1);
        assert_eq!(etc_commit(&[vec![1.0, 2.0]], 0.5).unwrap(), 0);
    }

    #[test]
    fn commit_is_scale_equivariant() {
        let maxima = vec![vec![1.0, 5.0, 2.0], vec![3.0, 0.5, 4.0], vec![2.5, 2.6, 0.1]];
        let scaled: Vec<Vec<f64>> = maxima
            .iter()
            .map(|m| m.iter().map(|x| x * 37.5).collect())
            .collect();
        assert_eq!(
            etc_commit(&maxima, 0.5).unwrap(),
            etc_commit(&scaled, 0.5).unwrap()
        );
    }

    #[test]
    fn consumes_exactly_the_horizon() {
        let arms = vec![
            ArmDistribution::pareto(1.0, 1.5).unwrap(),
            ArmDistribution::exponential(1.0).unwrap(),
        ];
        let mut env = Environment::new(&arms, 1234, TrajectorySeed::new(7, 1234, 0).rng());
        let mut policy = QomaxEtc::new(2, 3, 20, 0.5).unwrap();
        policy.play(&mut env).unwrap();
        assert_eq!(env.pulls().iter().sum::<u64>(), 1234);
        assert!(matches!(policy.phase(), EtcPhase::Commit(_)));
        assert_eq!(policy.peak_memory_cells(), 40);
    }

    #[test]
    fn oversized_exploration_is_rejected() {
        let arms = vec![ArmDistribution::exponential(1.0).unwrap()];
        let mut env = Environment::new(&arms, 10, TrajectorySeed::new(1, 10, 0).rng());
        let mut policy = QomaxEtc::new(1, 4, 4, 0.5).unwrap();
        assert!(matches!(
            policy.play(&mut env),
            Err(Error::HorizonTooSmall { required: 16, .. })
        ));
    }
}
