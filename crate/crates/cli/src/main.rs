use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use extreme_bandits::harness::{self, preset, ExperimentConfig};
use extreme_bandits::oracle::{harmonic, mc_comparison_prob, mc_expected_max};
use extreme_bandits::{ArmDistribution, PolicySpec};

/// Extreme bandit experiments: QoMax-ETC, QoMax-SDA and baselines.
#[derive(Debug, Parser)]
#[command(name = "extreme-bandits", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write summary.csv (and trajectories.jsonl with --raw).
    Run(RunArgs),
    /// Mean and maximum stored cells of the rolling-maxima list.
    StorageBench(StorageArgs),
    /// Monte Carlo probability that QoMax of the first law does not exceed the second's.
    Concentration(ConcentrationArgs),
    /// Expected maximum of T draws: closed form, quadrature and Monte Carlo.
    ExpectedMax(ExpectedMaxArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Built-in experiment 1..=8.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<u32>,
    /// JSON or TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Policy such as `qomax-sda:q=0.5,gamma=0.667`; repeat to run several.
    #[arg(long = "algo")]
    algorithms: Vec<String>,
    /// Horizons, comma separated or repeated.
    #[arg(long = "horizon", value_delimiter = ',')]
    horizons: Vec<u64>,
    #[arg(long)]
    trajectories: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(short, long)]
    output: PathBuf,
    /// Also write one JSON record per trajectory.
    #[arg(long)]
    raw: bool,
}

#[derive(Debug, Args)]
struct StorageArgs {
    #[arg(long, default_value_t = 10_000)]
    n: u64,
    #[arg(long, default_value_t = 1_000)]
    reps: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "exponential:1")]
    dist: ArmDistribution,
}

#[derive(Debug, Args)]
struct ConcentrationArgs {
    /// Dominant law first, e.g. `--pair pareto:1,1.5 pareto:1,2`.
    #[arg(long, num_args = 2, required = true)]
    pair: Vec<ArmDistribution>,
    #[arg(long, default_value_t = 30)]
    n: u64,
    #[arg(long, value_delimiter = ',', default_value = "10,40,160")]
    batches: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ExpectedMaxArgs {
    #[arg(long)]
    dist: ArmDistribution,
    #[arg(long, default_value_t = 10_000)]
    horizon: u64,
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("EB_THREADS") {
        let threads: usize = value
            .parse()
            .with_context(|| format!("EB_THREADS must be a positive integer, got `{value}`"))?;
        if threads == 0 {
            bail!("EB_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let mut config = match (&args.config, args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(id)) => preset(id)?,
        (None, None) => unreachable!("clap requires one of --preset/--config"),
    };
    if !args.algorithms.is_empty() {
        config.algorithms = args
            .algorithms
            .iter()
            .map(|s| s.parse::<PolicySpec>())
            .collect::<Result<_, _>>()?;
    }
    if !args.horizons.is_empty() {
        let mut horizons = args.horizons.clone();
        horizons.sort_unstable();
        horizons.dedup();
        config.horizons = horizons;
    }
    if let Some(t) = args.trajectories {
        config.trajectories = t;
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    config.validate()?;
    let output = harness::run_experiment(&config)?;
    harness::write_outputs(&args.output, &output, args.raw)
        .with_context(|| format!("writing to {}", args.output.display()))?;
    eprintln!(
        "{}: {} rows written to {}",
        config.name,
        output.rows.len(),
        args.output.join("summary.csv").display()
    );
    Ok(())
}

fn storage(args: StorageArgs) -> Result<()> {
    let stats = harness::storage_bench(&args.dist, args.n, args.reps, args.seed)?;
    println!("n={} reps={} dist={}", stats.n, stats.reps, args.dist);
    println!("mean_cells={:.4}", stats.mean_cells);
    println!("max_cells={}", stats.max_cells);
    println!("harmonic={:.4}", harmonic(args.n));
    Ok(())
}

fn concentration(args: ConcentrationArgs) -> Result<()> {
    let (d1, d2) = (&args.pair[0], &args.pair[1]);
    println!("b,p_fail,std_error");
    for &b in &args.batches {
        if b == 0 {
            bail!("batch counts must be positive");
        }
        let e = mc_comparison_prob(d1, d2, args.n, b, args.q, args.reps, args.seed);
        println!("{b},{},{}", e.value, e.std_error);
    }
    Ok(())
}

fn expected_max(args: ExpectedMaxArgs) -> Result<()> {
    let d = &args.dist;
    let t = args.horizon;
    println!("dist={d} horizon={t}");
    match d.expected_max_approx(t) {
        Ok(v) => println!("approx={v}"),
        Err(e) => println!("approx=unavailable ({e})"),
    }
    if let Ok(v) = d.expected_max_numeric(t) {
        println!("numeric={v}");
    }
    if let Some(v) = d.expected_max_exact(t) {
        println!("exact={v}");
    }
    if let Ok(q) = d.per_quantile(t) {
        println!("per_quantile={q}");
    }
    let mc = mc_expected_max(d, t, args.reps, args.seed);
    println!("monte_carlo={} std_error={}", mc.value, mc.std_error);
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    configure_threads()?;
    match cli.command {
        Command::Run(args) => run(args),
        Command::StorageBench(args) => storage(args),
        Command::Concentration(args) => concentration(args),
        Command::ExpectedMax(args) => expected_max(args),
    }
}
