//! Experiment configuration, built-in presets, parallel execution and output.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::ArmDistribution;
use crate::error::{Error, Result};
use crate::maxima_store::MaxRecord;
use crate::simulator::{run_trajectory, summarize, MetricsSummary, TrajectoryResult, TrajectorySeed};

pub use crate::policies::PolicySpec;

pub const DEFAULT_HORIZONS: [u64; 4] = [1_000, 5_000, 10_000, 20_000];
pub const DEFAULT_TRAJECTORIES: u64 = 500;
pub const DEFAULT_SEED: u64 = 42;

fn default_horizons() -> Vec<u64> {
    DEFAULT_HORIZONS.to_vec()
}

fn default_trajectories() -> u64 {
    DEFAULT_TRAJECTORIES
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub arms: Vec<ArmDistribution>,
    pub algorithms: Vec<PolicySpec>,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<u64>,
    #[serde(default = "default_trajectories")]
    pub trajectories: u64,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    /// 1-based index of the arm with the dominating tail.
    pub dominant_arm: usize,
}

fn default_algorithms() -> Vec<PolicySpec> {
    vec![
        PolicySpec::qomax_etc(0.5),
        PolicySpec::qomax_sda(0.5, 2.0 / 3.0),
        PolicySpec::threshold_ascent(),
        PolicySpec::MaxMedian {},
        PolicySpec::Uniform {},
    ]
}

fn paretos(lambdas: &[f64]) -> Vec<ArmDistribution> {
    lambdas
        .iter()
        .map(|&lambda| ArmDistribution::Pareto { scale_c: 1.0, lambda })
        .collect()
}

/// One of the eight built-in experiments, with every algorithm and the default horizons.
pub fn preset(id: u32) -> Result<ExperimentConfig> {
    let (arms, dominant_arm) = match id {
        1 => (paretos(&[2.1, 2.3, 1.3, 1.1, 1.9]), 4),
        2 => {
            let mut arms = paretos(&[2.5, 2.8, 4.0, 3.0, 1.4, 1.4, 1.9]);
            arms[4] = ArmDistribution::Pareto {
                scale_c: 1.1,
                lambda: 1.4,
            };
            (arms, 5)
        }
        3 => (
            [2.1, 2.4, 1.9, 1.3, 1.1, 2.9, 1.5, 2.2, 2.6, 1.4]
                .iter()
                .map(|&rate| ArmDistribution::Exponential { rate })
                .collect(),
            5,
        ),
        4 => (
            [
                1.64, 2.29, 1.79, 2.67, 1.70, 1.36, 1.90, 2.19, 0.80, 0.12, 1.65, 1.19, 1.88, 0.89,
                3.35, 1.5, 2.22, 3.03, 1.08, 0.48,
            ]
            .iter()
            .map(|&std| ArmDistribution::Gaussian { mean: 1.0, std })
            .collect(),
            15,
        ),
        5 => (paretos(&[5.0, 1.1, 2.0]), 2),
        6 => {
            let mut arms = paretos(&[1.5, 3.0]);
            arms.push(ArmDistribution::DiracParetoMixture {
                zero_prob: 0.8,
                lambda: 1.1,
            });
            (arms, 3)
        }
        7 => (
            [(1.0, 4.0), (1.5, 3.0), (2.0, 2.0), (3.0, 1.0), (3.5, 0.5)]
                .iter()
                .map(|&(mu, sigma)| ArmDistribution::LogNormal { mu, sigma })
                .collect(),
            1,
        ),
        8 => (
            (1..=8)
                .map(|i| ArmDistribution::GeneralizedGaussian {
                    beta: 0.2 * f64::from(i),
                })
                .collect(),
            1,
        ),
        other => return Err(Error::UnknownPreset(other)),
    };
    Ok(ExperimentConfig {
        name: format!("exp{id}"),
        arms,
        algorithms: default_algorithms(),
        horizons: default_horizons(),
        trajectories: DEFAULT_TRAJECTORIES,
        master_seed: DEFAULT_SEED,
        dominant_arm,
    })
}

impl ExperimentConfig {
    /// Parses a JSON or TOML document; `path` is only used for the format and messages.
    pub fn from_str_with_format(text: &str, toml_format: bool, origin: &str) -> Result<Self> {
        let config: Self = if toml_format {
            toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?
        } else {
            serde_json::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?
        };
        config.validate()?;
        Ok(config)
    }

    /// Loads `*.toml` as TOML and anything else as JSON.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let toml_format = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        Self::from_str_with_format(&text, toml_format, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, msg: String| Err(Error::Config(format!("field `{field}`: {msg}")));
        if self.arms.is_empty() {
            return fail("arms", "at least one arm is required".into());
        }
        for (i, arm) in self.arms.iter().enumerate() {
            if let Err(e) = arm.validate() {
                return fail(&format!("arms[{i}]"), e.to_string());
            }
        }
        if self.algorithms.is_empty() {
            return fail("algorithms", "at least one algorithm is required".into());
        }
        for (i, algo) in self.algorithms.iter().enumerate() {
            if let Err(e) = algo.validate() {
                return fail(&format!("algorithms[{i}]"), e.to_string());
            }
        }
        if self.horizons.is_empty() {
            return fail("horizons", "at least one horizon is required".into());
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return fail("horizons", "must be strictly ascending".into());
        }
        if self.horizons[0] < self.arms.len() as u64 {
            return fail("horizons", format!("{} is below the arm count", self.horizons[0]));
        }
        if self.trajectories == 0 {
            return fail("trajectories", "must be positive".into());
        }
        if self.dominant_arm == 0 || self.dominant_arm > self.arms.len() {
            return fail(
                "dominant_arm",
                format!("{} is outside 1..={}", self.dominant_arm, self.arms.len()),
            );
        }
        Ok(())
    }

    pub fn dominant(&self) -> &ArmDistribution {
        &self.arms[self.dominant_arm - 1]
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub algorithm: String,
    pub q: Option<f64>,
    pub horizon: u64,
    pub metrics: MetricsSummary,
}

/// One line of `trajectories.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub experiment: String,
    pub algorithm: String,
    pub horizon: u64,
    pub trajectory: u64,
    #[serde(flatten)]
    pub result: TrajectoryResult,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub rows: Vec<SummaryRow>,
    pub trajectories: Vec<TrajectoryRecord>,
}

/// Runs every (algorithm, horizon) pair. Trajectory `i` at horizon `T` uses the
/// same seed for all algorithms; output order is independent of scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let dominant = config.dominant_arm - 1;
    let mut output = ExperimentOutput::default();
    for algorithm in &config.algorithms {
        let label = algorithm.to_string();
        for &horizon in &config.horizons {
            let results = (0..config.trajectories)
                .into_par_iter()
                .map(|i| {
                    let seed = TrajectorySeed::new(config.master_seed, horizon, i);
                    run_trajectory(&config.arms, algorithm, horizon, seed, dominant)
                })
                .collect::<Result<Vec<_>>>()?;
            let metrics = summarize(&results, Some(config.dominant()), horizon)?;
            output.rows.push(SummaryRow {
                experiment: config.name.clone(),
                algorithm: label.clone(),
                q: algorithm.quantile(),
                horizon,
                metrics,
            });
            output
                .trajectories
                .extend(results.into_iter().enumerate().map(|(i, result)| TrajectoryRecord {
                    experiment: config.name.clone(),
                    algorithm: label.clone(),
                    horizon,
                    trajectory: i as u64,
                    result,
                }));
        }
    }
    Ok(output)
}

fn level_tag(level: f64) -> String {
    format!("{:02}", (level * 100.0).round() as u32)
}

pub fn summary_header() -> Vec<String> {
    let mut header: Vec<String> = [
        "experiment",
        "algorithm",
        "q",
        "horizon",
        "mean_best_arm_frac",
        "per",
    ]
    .map(String::from)
    .to_vec();
    for prefix in ["pulls", "max"] {
        for level in crate::simulator::SUMMARY_LEVELS {
            header.push(format!("{prefix}_q{}", level_tag(level)));
        }
    }
    header
}

fn opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(summary_header())?;
    for row in rows {
        let m = &row.metrics;
        let mut record = vec![
            row.experiment.clone(),
            row.algorithm.clone(),
            opt(row.q),
            row.horizon.to_string(),
            m.mean_best_arm_fraction.to_string(),
            opt(m.per),
        ];
        record.extend(m.best_arm_quantiles.iter().map(f64::to_string));
        record.extend(m.max_reward_quantiles.iter().map(f64::to_string));
        writer.write_record(record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_trajectories_jsonl<W: Write>(records: &[TrajectoryRecord], mut out: W) -> Result<()> {
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `summary.csv`, plus `trajectories.jsonl` when `raw` is set, into `dir`.
pub fn write_outputs(dir: &Path, output: &ExperimentOutput, raw: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    let summary = std::io::BufWriter::new(fs::File::create(dir.join("summary.csv"))?);
    write_summary_csv(&output.rows, summary)?;
    if raw {
        let file = std::io::BufWriter::new(fs::File::create(dir.join("trajectories.jsonl"))?);
        write_trajectories_jsonl(&output.trajectories, file)?;
    }
    Ok(())
}

/// Stored cells after streaming `n` draws through one [`MaxRecord`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StorageStats {
    pub n: u64,
    pub reps: u64,
    pub mean_cells: f64,
    pub max_cells: usize,
}

pub fn storage_bench(dist: &ArmDistribution, n: u64, reps: u64, seed: u64) -> Result<StorageStats> {
    if n == 0 || reps == 0 {
        return Err(Error::invalid("n/reps", "must be positive"));
    }
    let cells = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep);
            let mut record = MaxRecord::new();
            for i in 1..=n {
                record.efficient_update(i, dist.sample(&mut rng))?;
            }
            Ok(record.memory_cells())
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(StorageStats {
        n,
        reps,
        mean_cells: cells.iter().sum::<usize>() as f64 / reps as f64,
        max_cells: cells.iter().copied().max().unwrap_or(0),
    })
}
