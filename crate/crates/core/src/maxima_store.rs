//! Compressed history of one batch: the running list of "suffix maxima".
//!
//! A batch receives one sample per query. Only samples that are strictly
//! larger than everything inserted after them can ever be the maximum of a
//! trailing block of queries, so everything else is dropped on insertion.
//! The kept values are strictly decreasing and their query indices strictly
//! increasing; on i.i.d. continuous data the expected length after `N`
//! inserts is the harmonic number `H_N`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("query index {index} does not follow the last stored index {last}")]
    OutOfOrderIndex { index: u64, last: u64 },
    #[error("no sample with query index above {cutoff}")]
    EmptySuffix { cutoff: u64 },
    #[error("the record is empty")]
    EmptyRecord,
    #[error("indices must increase and values must decrease")]
    Malformed,
}

/// Kept maxima of a batch with their 1-based query indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaxRecord {
    indices: Vec<u64>,
    values: Vec<f64>,
}

impl MaxRecord {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a record from already-compressed lists.
    pub fn from_parts(indices: Vec<u64>, values: Vec<f64>) -> Result<Self, StoreError> {
        let ordered = indices.len() == values.len()
            && indices.first().is_none_or(|&i| i >= 1)
            && indices.windows(2).all(|w| w[0] < w[1])
            && values.windows(2).all(|w| w[0] > w[1]);
        if !ordered {
            return Err(StoreError::Malformed);
        }
        Ok(Self { indices, values })
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last_index(&self) -> Option<u64> {
        self.indices.last().copied()
    }

    /// Inserts the sample of query `index`.
    ///
    /// Every stored value `<= value` is evicted (ties keep the fresher index),
    /// then the new pair is appended. The cut point is found by binary search.
    pub fn efficient_update(&mut self, index: u64, value: f64) -> Result<(), StoreError> {
        if let Some(last) = self.last_index() {
            if index <= last {
                return Err(StoreError::OutOfOrderIndex { index, last });
            }
        }
        let keep = self.values.partition_point(|&v| v > value);
        self.values.truncate(keep);
        self.indices.truncate(keep);
        self.values.push(value);
        self.indices.push(index);
        Ok(())
    }

    /// Maximum over all samples whose query index is `> cutoff`.
    pub fn suffix_max(&self, cutoff: u64) -> Result<f64, StoreError> {
        let first = self.indices.partition_point(|&i| i <= cutoff);
        self.values
            .get(first)
            .copied()
            .ok_or(StoreError::EmptySuffix { cutoff })
    }

    /// Maximum of everything ever inserted.
    pub fn batch_max(&self) -> Result<f64, StoreError> {
        self.values.first().copied().ok_or(StoreError::EmptyRecord)
    }

    /// Number of stored (index, value) pairs.
    pub fn memory_cells(&self) -> usize {
        self.values.len()
    }
}
