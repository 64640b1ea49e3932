//! Extreme bandits with quantile-of-maxima (QoMax) estimators.
//!
//! The crate is organised bottom-up:
//!
//! * [`distributions`]: reward laws, survival functions and expected-maximum approximations.
//! * [`maxima_store`]: the compressed per-batch list of running maxima.
//! * [`qomax`]: the quantile-of-maxima estimator over full histories and leader subsamples.
//! * [`policies`]: QoMax-ETC, QoMax-SDA and the distribution-free baselines.
//! * [`simulator`]: trajectory execution and the evaluation metrics.
//! * [`harness`]: experiment configuration, the built-in presets and CSV/JSONL output.
//! * [`oracle`]: brute-force references used to cross-check everything above.
//!
//! Arms are indexed from 0 throughout the library. Configuration files use
//! 1-based arm numbers where a human picks an arm (`dominant_arm`).

pub mod distributions;
mod error;
pub mod harness;
pub mod maxima_store;
pub mod oracle;
pub mod policies;
pub mod qomax;
mod quadrature;
pub mod simulator;

pub use distributions::{ArmDistribution, DistributionError};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, PolicySpec};
pub use maxima_store::{MaxRecord, StoreError};
pub use qomax::{qomax_full, qomax_of_maxima, qomax_subsample, ArmHistory, QoMaxError};
pub use simulator::{run_trajectory, MetricsSummary, TrajectoryResult, TrajectorySeed};
