//! QoMax Subsampling Duelling Algorithm.
//!
//! Each round elects a leader (most queries), duels every challenger against
//! the leader's last-block subsample, then collects data for the selected set.
//! Challengers keep `⌈n^γ⌉` batches; the leader only grows batches to match the
//! largest challenger.

use crate::error::{Error, Result};
use crate::maxima_store::MaxRecord;
use crate::qomax::{qomax_full, qomax_subsample, ArmHistory};
use crate::simulator::Environment;

use super::Policy;

/// Sampling obligation `f(r) = (ln r)^(1/γ)`.
pub fn forced_exploration(round: u64, gamma: f64) -> f64 {
    (round.max(1) as f64).ln().powf(1.0 / gamma)
}

/// Batch count `⌈n^γ⌉` for an arm queried `n` times.
pub fn batch_target(queries: u64, gamma: f64) -> usize {
    if queries == 0 {
        return 0;
    }
    ((queries as f64).powf(gamma) - 1e-9).ceil().max(1.0) as usize
}

/// Outcome of a collection phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collection {
    Complete,
    /// The sample source ran dry mid-round.
    Exhausted,
}

#[derive(Debug, Clone)]
pub struct SdaState {
    histories: Vec<ArmHistory>,
    round: u64,
    q: f64,
    gamma: f64,
}

impl SdaState {
    pub fn new(arms: usize, q: f64, gamma: f64) -> Result<Self> {
        Self::from_histories((0..arms).map(ArmHistory::new).collect(), 0, q, gamma)
    }

    /// State after `round` completed rounds with the given histories.
    pub fn from_histories(histories: Vec<ArmHistory>, round: u64, q: f64, gamma: f64) -> Result<Self> {
        if histories.is_empty() {
            return Err(Error::invalid("arms", "need at least one arm"));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid("q", format!("{q} is outside (0, 1)")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::invalid("gamma", format!("{gamma} is outside (0, 1)")));
        }
        Ok(Self {
            histories,
            round,
            q,
            gamma,
        })
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn histories(&self) -> &[ArmHistory] {
        &self.histories
    }

    pub fn memory_cells(&self) -> usize {
        self.histories.iter().map(ArmHistory::memory_cells).sum()
    }

    /// Most queried arm; ties go to the larger full QoMax, then the lowest index.
    pub fn leader(&self) -> usize {
        let mut best = 0;
        let mut best_key = (0, f64::NEG_INFINITY);
        for (k, history) in self.histories.iter().enumerate() {
            let value = qomax_full(history, self.q).unwrap_or(f64::NEG_INFINITY);
            let key = (history.queries(), value);
            if k == 0 || key.0 > best_key.0 || (key.0 == best_key.0 && key.1 > best_key.1) {
                best = k;
                best_key = key;
            }
        }
        best
    }

    /// Returns the challenger if its QoMax beats the leader's subsample strictly.
    pub fn duel(&self, challenger: usize, leader: usize) -> Result<usize> {
        let c = &self.histories[challenger];
        let challenger_value = qomax_full(c, self.q)?;
        let leader_value =
            qomax_subsample(&self.histories[leader], c.queries(), c.batch_count(), self.q)?;
        Ok(if challenger_value > leader_value {
            challenger
        } else {
            leader
        })
    }

    /// Arms to pull in the next round, in ascending order.
    pub fn select_arms(&self, leader: usize) -> Result<Vec<usize>> {
        let round = self.round + 1;
        if round == 1 {
            return Ok((0..self.histories.len()).collect());
        }
        let obligation = forced_exploration(round, self.gamma);
        let mut active = Vec::new();
        for (k, history) in self.histories.iter().enumerate() {
            if k == leader {
                continue;
            }
            if (history.queries() as f64) < obligation || self.duel(k, leader)? == k {
                active.push(k);
            }
        }
        if active.is_empty() {
            active.push(leader);
        }
        Ok(active)
    }

    /// Collection phase for the arms in `active`.
    ///
    /// Selected arms gain one query (one sample per existing batch). Every
    /// challenger is then topped up to `⌈n_k^γ⌉` batches, and the leader last to
    /// the largest challenger batch count. `draw(arm)` returns `None` once the
    /// budget is spent; the interrupted query or batch is dropped.
    pub fn collect_data<D>(&mut self, active: &[usize], leader: usize, mut draw: D) -> Result<Collection>
    where
        D: FnMut(usize) -> Option<f64>,
    {
        let mut samples = Vec::new();
        for k in 0..self.histories.len() {
            let history = &mut self.histories[k];
            if active.contains(&k) {
                samples.clear();
                for _ in 0..history.batch_count() {
                    match draw(k) {
                        Some(x) => samples.push(x),
                        None => return Ok(Collection::Exhausted),
                    }
                }
                history.append_query(&samples)?;
            }
            if k != leader {
                let target = batch_target(history.queries(), self.gamma);
                if !fill_batches(history, target, k, &mut draw)? {
                    return Ok(Collection::Exhausted);
                }
            }
        }
        let target = self
            .histories
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != leader)
            .map(|(_, h)| h.batch_count())
            .max()
            .unwrap_or(0)
            .max(1);
        let history = &mut self.histories[leader];
        if history.queries() > 0 && !fill_batches(history, target, leader, &mut draw)? {
            return Ok(Collection::Exhausted);
        }
        Ok(Collection::Complete)
    }

    /// Plays one full round.
    pub fn step<D>(&mut self, draw: D) -> Result<Collection>
    where
        D: FnMut(usize) -> Option<f64>,
    {
        let leader = self.leader();
        let active = self.select_arms(leader)?;
        let outcome = self.collect_data(&active, leader, draw)?;
        self.round += 1;
        Ok(outcome)
    }
}

fn fill_batches<D>(history: &mut ArmHistory, target: usize, arm: usize, draw: &mut D) -> Result<bool>
where
    D: FnMut(usize) -> Option<f64>,
{
    while history.batch_count() < target {
        let mut batch = MaxRecord::new();
        for i in 1..=history.queries() {
            match draw(arm) {
                Some(x) => batch.efficient_update(i, x)?,
                None => return Ok(false),
            }
        }
        history.push_batch(batch)?;
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct QomaxSda {
    state: SdaState,
    peak_memory: usize,
}

impl QomaxSda {
    pub fn new(arms: usize, q: f64, gamma: f64) -> Result<Self> {
        Ok(Self {
            state: SdaState::new(arms, q, gamma)?,
            peak_memory: 0,
        })
    }

    pub fn state(&self) -> &SdaState {
        &self.state
    }
}

impl Policy for QomaxSda {
    fn play(&mut self, env: &mut Environment<'_>) -> Result<()> {
        while env.remaining() > 0 {
            let outcome = self.state.step(|arm| env.pull(arm))?;
            self.peak_memory = self.peak_memory.max(self.state.memory_cells());
            if outcome == Collection::Exhausted {
                break;
            }
        }
        Ok(())
    }

    fn peak_memory_cells(&self) -> usize {
        self.peak_memory
    }
}
