//! Arm-selection policies.
//!
//! QoMax-ETC and QoMax-SDA are the quantile-of-maxima algorithms; ThresholdAscent,
//! MaxMedian and round-robin are distribution-free baselines. Every policy plays
//! against an [`Environment`] until its pull budget is exhausted.

pub mod etc;
pub mod max_median;
pub mod sda;
pub mod threshold_ascent;
pub mod uniform;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{Environment, TrajectoryRng};

pub use etc::{etc_commit, etc_exploration_lengths, etc_harness_lengths, EtcPhase, QomaxEtc};
pub use max_median::MaxMedian;
pub use sda::{QomaxSda, SdaState};
pub use threshold_ascent::ThresholdAscent;
pub use uniform::{uniform_select, Uniform};

pub trait Policy: Send {
    /// Pulls arms until `env` has no budget left.
    fn play(&mut self, env: &mut Environment<'_>) -> Result<()>;

    /// Largest number of stored reward cells at any point of the run.
    fn peak_memory_cells(&self) -> usize;
}

/// Policies that pick one arm at a time and observe one reward.
pub(crate) trait StepPolicy {
    fn select(&mut self, rng: &mut TrajectoryRng) -> usize;
    fn observe(&mut self, arm: usize, reward: f64);
}

pub(crate) fn play_stepwise<P: StepPolicy>(policy: &mut P, env: &mut Environment<'_>) {
    while env.remaining() > 0 {
        let arm = policy.select(env.rng());
        let reward = env.pull(arm).expect("budget checked above");
        policy.observe(arm, reward);
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax_lowest<I: IntoIterator<Item = f64>>(values: I) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if i == 0 || v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

fn half() -> f64 {
    0.5
}

fn two_thirds() -> f64 {
    2.0 / 3.0
}

fn default_s() -> usize {
    100
}

fn default_delta() -> f64 {
    0.1
}

/// A policy and its parameters, as named in configuration files and on the
/// command line (`qomax-sda:q=0.5,gamma=0.667`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicySpec {
    QomaxEtc {
        #[serde(default = "half")]
        q: f64,
        /// Batch size override; defaults to `⌈ln T⌉`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_t: Option<u64>,
        /// Batch count override; defaults to `⌈(ln T)²⌉`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b_t: Option<u64>,
    },
    QomaxSda {
        #[serde(default = "half")]
        q: f64,
        #[serde(default = "two_thirds")]
        gamma: f64,
    },
    ThresholdAscent {
        #[serde(default = "default_s")]
        s: usize,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    MaxMedian {},
    Uniform {},
}

impl PolicySpec {
    pub fn qomax_etc(q: f64) -> Self {
        PolicySpec::QomaxEtc {
            q,
            n_t: None,
            b_t: None,
        }
    }

    pub fn qomax_sda(q: f64, gamma: f64) -> Self {
        PolicySpec::QomaxSda { q, gamma }
    }

    pub fn threshold_ascent() -> Self {
        PolicySpec::ThresholdAscent {
            s: default_s(),
            delta: default_delta(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::QomaxEtc { .. } => "qomax-etc",
            PolicySpec::QomaxSda { .. } => "qomax-sda",
            PolicySpec::ThresholdAscent { .. } => "threshold-ascent",
            PolicySpec::MaxMedian {} => "max-median",
            PolicySpec::Uniform {} => "uniform",
        }
    }

    /// QoMax quantile level, for the policies that have one.
    pub fn quantile(&self) -> Option<f64> {
        match *self {
            PolicySpec::QomaxEtc { q, .. } | PolicySpec::QomaxSda { q, .. } => Some(q),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(q) = self.quantile() {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::invalid("q", format!("{q} is outside (0, 1)")));
            }
        }
        match *self {
            PolicySpec::QomaxEtc { n_t, b_t, .. } => {
                if n_t == Some(0) || b_t == Some(0) {
                    return Err(Error::invalid("n_t/b_t", "must be positive"));
                }
            }
            PolicySpec::QomaxSda { gamma, .. } => {
                if !(gamma > 0.0 && gamma < 1.0) {
                    return Err(Error::invalid("gamma", format!("{gamma} is outside (0, 1)")));
                }
            }
            PolicySpec::ThresholdAscent { s, delta } => {
                if s == 0 {
                    return Err(Error::invalid("s", "must be positive"));
                }
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(Error::invalid("delta", format!("{delta} is outside (0, 1)")));
                }
            }
            PolicySpec::MaxMedian {} | PolicySpec::Uniform {} => {}
        }
        Ok(())
    }

    /// Instantiates the policy for `arms` arms and a run of `horizon` pulls.
    pub fn build(&self, arms: usize, horizon: u64) -> Result<Box<dyn Policy>> {
        self.validate()?;
        Ok(match *self {
            PolicySpec::QomaxEtc { q, n_t, b_t } => {
                let (n_t, b_t) = match (n_t, b_t) {
                    (Some(n), Some(b)) => (n, b),
                    (n, b) => {
                        let (auto_n, auto_b) = etc_harness_lengths(horizon, arms)?;
                        (n.unwrap_or(auto_n), b.unwrap_or(auto_b))
                    }
                };
                Box::new(QomaxEtc::new(arms, n_t, b_t, q)?)
            }
            PolicySpec::QomaxSda { q, gamma } => Box::new(QomaxSda::new(arms, q, gamma)?),
            PolicySpec::ThresholdAscent { s, delta } => {
                Box::new(ThresholdAscent::new(arms, s, delta)?)
            }
            PolicySpec::MaxMedian {} => Box::new(MaxMedian::new(arms)),
            PolicySpec::Uniform {} => Box::new(Uniform::new(arms)),
        })
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::QomaxEtc { q, n_t, b_t } => {
                write!(f, "qomax-etc:q={q}")?;
                if let Some(n) = n_t {
                    write!(f, ",n_t={n}")?;
                }
                if let Some(b) = b_t {
                    write!(f, ",b_t={b}")?;
                }
                Ok(())
            }
            PolicySpec::QomaxSda { q, gamma } => write!(f, "qomax-sda:q={q},gamma={gamma}"),
            PolicySpec::ThresholdAscent { s, delta } => {
                write!(f, "threshold-ascent:s={s},delta={delta}")
            }
            PolicySpec::MaxMedian {} => f.write_str("max-median"),
            PolicySpec::Uniform {} => f.write_str("uniform"),
        }
    }
}

/// Parses `name[:key=value,...]`.
impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((name, params)) => (name.trim(), params),
            None => (s.trim(), ""),
        };
        let mut object = serde_json::Map::new();
        object.insert("name".into(), name.into());
        for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{pair}`")))?;
            let value: serde_json::Value = serde_json::from_str(value.trim())
                .map_err(|_| Error::Config(format!("`{key}` needs a numeric value")))?;
            object.insert(key.trim().to_string(), value);
        }
        let spec: PolicySpec = serde_json::from_value(object.into()).map_err(|e| {
            if ["qomax-etc", "qomax-sda", "threshold-ascent", "max-median", "uniform"]
                .contains(&name)
            {
                Error::Config(format!("policy `{name}`: {e}"))
            } else {
                Error::UnknownPolicy(name.to_string())
            }
        })?;
        spec.validate()?;
        Ok(spec)
    }
}
