//! Quantile-of-maxima (QoMax) estimation.
//!
//! Data are split into `b` batches of equal size `n`; the estimator is the
//! empirical quantile of order `q` of the `b` batch maxima, taken as the
//! element of rank `⌈b q⌉` in ascending order.

use thiserror::Error;

use crate::maxima_store::{MaxRecord, StoreError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QoMaxError {
    #[error("QoMax over an empty list of maxima")]
    EmptyInput,
    #[error("quantile level {0} is outside (0, 1)")]
    InvalidQuantile(f64),
    #[error("arm has no batches yet")]
    EmptyHistory,
    #[error("subsample of {n_sub} queries x {b_sub} batches exceeds the history ({n} x {b})")]
    SubsampleTooLarge {
        n_sub: u64,
        b_sub: usize,
        n: u64,
        b: usize,
    },
    #[error("history update carries {got} samples for {expected} batches")]
    BatchMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Store(#[from] StoreError),
}

type Result<T> = std::result::Result<T, QoMaxError>;

/// 1-based rank `⌈len · q⌉`, nudged down by `1e-9` so that e.g. `10 · 0.9`
/// lands on rank 9 despite floating error.
pub fn quantile_rank(len: usize, q: f64) -> usize {
    let raw = (len as f64 * q - 1e-9).ceil();
    (raw.max(1.0) as usize).min(len)
}

fn check_quantile(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(QoMaxError::InvalidQuantile(q))
    }
}

/// Quantile of order `q` of a list of batch maxima.
pub fn qomax_of_maxima(maxima: &[f64], q: f64) -> Result<f64> {
    check_quantile(q)?;
    if maxima.is_empty() {
        return Err(QoMaxError::EmptyInput);
    }
    let rank = quantile_rank(maxima.len(), q);
    let mut work = maxima.to_vec();
    let (_, nth, _) = work.select_nth_unstable_by(rank - 1, f64::total_cmp);
    Ok(*nth)
}

/// History of one arm: `queries` samples in each of `batches.len()` batches.
///
/// Every batch holds one sample per query, indexed by the 1-based query number.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmHistory {
    arm_id: usize,
    queries: u64,
    batches: Vec<MaxRecord>,
}

impl ArmHistory {
    pub fn new(arm_id: usize) -> Self {
        Self {
            arm_id,
            queries: 0,
            batches: Vec::new(),
        }
    }

    /// Builds a history from an uncompressed table: `table[j]` is batch `j`,
    /// with one sample per query in query order.
    pub fn from_table(arm_id: usize, table: &[Vec<f64>]) -> Result<Self> {
        let queries = table.first().map_or(0, Vec::len);
        let batches = table
            .iter()
            .map(|column| {
                if column.len() != queries {
                    return Err(QoMaxError::BatchMismatch {
                        got: column.len(),
                        expected: queries,
                    });
                }
                let mut record = MaxRecord::new();
                for (i, &x) in column.iter().enumerate() {
                    record.efficient_update(i as u64 + 1, x)?;
                }
                Ok(record)
            })
            .collect::<Result<Vec<_>>>()?;
        if queries == 0 {
            return Ok(Self::new(arm_id));
        }
        Ok(Self {
            arm_id,
            queries: queries as u64,
            batches,
        })
    }

    pub fn arm_id(&self) -> usize {
        self.arm_id
    }

    /// Number of queries `n_k`.
    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Number of batches `b_k`.
    pub fn batch_count(&self) -> usize {
        self.batches.len()
    }

    pub fn batches(&self) -> &[MaxRecord] {
        &self.batches
    }

    /// Registers a new query, inserting `samples[j]` into batch `j`.
    ///
    /// `samples` must carry exactly one value per existing batch (none at all
    /// for an arm without batches).
    pub fn append_query(&mut self, samples: &[f64]) -> Result<()> {
        if samples.len() != self.batches.len() {
            return Err(QoMaxError::BatchMismatch {
                got: samples.len(),
                expected: self.batches.len(),
            });
        }
        let index = self.queries + 1;
        for (batch, &x) in self.batches.iter_mut().zip(samples) {
            batch.efficient_update(index, x)?;
        }
        self.queries = index;
        Ok(())
    }

    /// Appends a complete batch covering queries `1..=n_k`.
    pub fn push_batch(&mut self, batch: MaxRecord) -> Result<()> {
        if batch.last_index() != Some(self.queries) {
            return Err(QoMaxError::BatchMismatch {
                got: batch.last_index().unwrap_or(0) as usize,
                expected: self.queries as usize,
            });
        }
        self.batches.push(batch);
        Ok(())
    }

    pub fn memory_cells(&self) -> usize {
        self.batches.iter().map(MaxRecord::memory_cells).sum()
    }
}

/// QoMax of an arm over its whole history.
pub fn qomax_full(history: &ArmHistory, q: f64) -> Result<f64> {
    if history.batches.is_empty() {
        return Err(QoMaxError::EmptyHistory);
    }
    let maxima = history
        .batches
        .iter()
        .map(MaxRecord::batch_max)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    qomax_of_maxima(&maxima, q)
}

/// QoMax of the leader restricted to its last `n_sub` queries and first `b_sub` batches.
pub fn qomax_subsample(leader: &ArmHistory, n_sub: u64, b_sub: usize, q: f64) -> Result<f64> {
    if n_sub > leader.queries || b_sub > leader.batches.len() || n_sub == 0 || b_sub == 0 {
        return Err(QoMaxError::SubsampleTooLarge {
            n_sub,
            b_sub,
            n: leader.queries,
            b: leader.batches.len(),
        });
    }
    let cutoff = leader.queries - n_sub;
    let maxima = leader.batches[..b_sub]
        .iter()
        .map(|batch| batch.suffix_max(cutoff))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    qomax_of_maxima(&maxima, q)
}
