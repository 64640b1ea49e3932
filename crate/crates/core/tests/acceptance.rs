//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p extreme-bandits-core --test acceptance`.

use std::time::{Duration, Instant};

use extreme_bandits::harness::{self, preset, ExperimentConfig};
use extreme_bandits::oracle::{harmonic, mc_comparison_prob, mc_expected_max, naive_qomax};
use extreme_bandits::{
    qomax_full, qomax_subsample, run_trajectory, ArmDistribution, ArmHistory, PolicySpec,
    TrajectorySeed,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_time(outcome: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    let timing = format!("{:.1}s of {}s", elapsed.as_secs_f64(), limit.as_secs());
    match outcome {
        Ok(d) if elapsed <= limit => Ok(format!("{d}; {timing}")),
        Ok(d) => Err(format!("{d}; too slow: {timing}")),
        Err(d) => Err(format!("{d}; {timing}")),
    }
}

fn pareto(lambda: f64) -> ArmDistribution {
    ArmDistribution::pareto(1.0, lambda).unwrap()
}

fn qomax_oracle_equivalence() -> Outcome {
    let laws = [
        pareto(1.5),
        ArmDistribution::exponential(1.0).unwrap(),
        ArmDistribution::gaussian(0.0, 1.0).unwrap(),
        ArmDistribution::log_normal(0.0, 2.0).unwrap(),
        ArmDistribution::generalized_gaussian(0.6).unwrap(),
        ArmDistribution::dirac_pareto(0.8, 1.1).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let law = laws[rng.random_range(0..laws.len())];
        let n = rng.random_range(1..=20usize);
        let b = rng.random_range(1..=20usize);
        let q = rng.random_range(0.01..0.99);
        let table: Vec<Vec<f64>> = (0..b)
            .map(|_| (0..n).map(|_| law.sample(&mut rng)).collect())
            .collect();
        let history = ArmHistory::from_table(0, &table).unwrap();
        if qomax_full(&history, q).ok() != naive_qomax(&table, q) {
            mismatches += 1;
        }
        let n_sub = rng.random_range(1..=n);
        let b_sub = rng.random_range(1..=b);
        let block: Vec<Vec<f64>> = table[..b_sub].iter().map(|c| c[n - n_sub..].to_vec()).collect();
        if qomax_subsample(&history, n_sub as u64, b_sub, q).ok() != naive_qomax(&block, q) {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("{mismatches} mismatches over 1000 instances"))
}

fn storage_law() -> Outcome {
    let h = harmonic(10_000);
    let laws = [
        pareto(1.1),
        pareto(3.0),
        ArmDistribution::exponential(1.0).unwrap(),
        ArmDistribution::gaussian(0.0, 1.0).unwrap(),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (i, law) in laws.iter().enumerate() {
        let stats = harness::storage_bench(law, 10_000, 1000, 70 + i as u64).unwrap();
        let rel = (stats.mean_cells - h).abs() / h;
        ok &= rel < 0.05 && stats.max_cells < 30;
        details.push(format!("{law}: mean {:.3} max {}", stats.mean_cells, stats.max_cells));
    }
    check(ok, format!("H = {h:.4}; {}", details.join(", ")))
}

/// Weighted least-squares slope of `ln p̂` against `b`, with `(hits + ½)/(reps + 1)`
/// and delta-method variances.
fn log_slope(points: &[(f64, f64)], reps: f64) -> (f64, f64) {
    let rows: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|&(b, p)| {
            let hits = p * reps;
            let y = ((hits + 0.5) / (reps + 1.0)).ln();
            let var = 1.0 / (hits + 0.5) - 1.0 / (reps + 1.0);
            (b, y, 1.0 / var)
        })
        .collect();
    let sw: f64 = rows.iter().map(|r| r.2).sum();
    let xbar = rows.iter().map(|r| r.2 * r.0).sum::<f64>() / sw;
    let ybar = rows.iter().map(|r| r.2 * r.1).sum::<f64>() / sw;
    let sxx: f64 = rows.iter().map(|r| r.2 * (r.0 - xbar).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| r.2 * (r.0 - xbar) * (r.1 - ybar)).sum();
    (sxy / sxx, (1.0 / sxx).sqrt())
}

fn concentration_in_batches() -> Outcome {
    let reps = 10_000;
    let estimates: Vec<(f64, f64)> = [10usize, 40, 160]
        .iter()
        .map(|&b| {
            let e = mc_comparison_prob(&pareto(1.5), &pareto(2.0), 30, b, 0.5, reps, 31);
            (b as f64, e.value)
        })
        .collect();
    let decreasing = estimates.windows(2).all(|w| w[1].1 < w[0].1);
    let (slope, se) = log_slope(&estimates, reps as f64);
    check(
        decreasing && slope < 0.0 && -slope > 3.0 * se,
        format!("P(fail) at b=10,40,160: {estimates:?}; slope {slope:.4} (SE {se:.4})"),
    )
}

fn maxima_comparison_rate() -> Outcome {
    let exponent = 2.0 / 1.5;
    let mut last = f64::INFINITY;
    let mut ok = true;
    let mut details = Vec::new();
    for n in [100u64, 1_000, 10_000] {
        let e = mc_comparison_prob(&pareto(1.5), &pareto(2.0), n, 1, 0.5, 100_000, 47);
        let floor = 0.1 * (n as f64).powf(-exponent);
        ok &= e.value < last && e.value > floor;
        last = e.value;
        details.push(format!("n={n}: {:.4} (floor {floor:.2e})", e.value));
    }
    check(ok, details.join(", "))
}

fn etc_small_batches() -> Outcome {
    let arms = [pareto(1.5), pareto(2.0)];
    let spec = PolicySpec::QomaxEtc {
        q: 0.5,
        n_t: Some(3),
        b_t: Some(200),
    };
    let horizon = 1300;
    let wrong = (0..2000)
        .filter(|&i| {
            let r = run_trajectory(&arms, &spec, horizon, TrajectorySeed::new(5, horizon, i), 0)
                .unwrap();
            r.pulls_per_arm[1] > 600
        })
        .count();
    let freq = wrong as f64 / 2000.0;
    check(freq < 0.05, format!("wrong commits {wrong}/2000 = {freq:.4}"))
}

fn experiment_one() -> Outcome {
    let mut config = preset(1).unwrap();
    config.horizons = vec![10_000];
    config.trajectories = 500;
    config.algorithms = vec![
        PolicySpec::qomax_sda(0.5, 2.0 / 3.0),
        PolicySpec::Uniform {},
        PolicySpec::threshold_ascent(),
    ];
    let out = harness::run_experiment(&config).unwrap();
    let frac: Vec<f64> = out.rows.iter().map(|r| r.metrics.mean_best_arm_fraction).collect();
    check(
        frac[0] >= 0.70 && (frac[1] - 0.20).abs() <= 0.02 && frac[2] > 0.35 && frac[2] < 0.70,
        format!(
            "best-arm fraction: qomax-sda {:.4}, uniform {:.4}, threshold-ascent {:.4}",
            frac[0], frac[1], frac[2]
        ),
    )
}

fn per_sanity() -> Outcome {
    let single = ExperimentConfig {
        name: "oracle".into(),
        arms: vec![ArmDistribution::exponential(1.0).unwrap()],
        algorithms: vec![PolicySpec::Uniform {}],
        horizons: vec![10_000],
        trajectories: 10_000,
        master_seed: 3,
        dominant_arm: 1,
    };
    let oracle_per = harness::run_experiment(&single).unwrap().rows[0].metrics.per.unwrap();

    let mut config = preset(3).unwrap();
    config.horizons = vec![10_000];
    config.trajectories = 2000;
    config.algorithms = vec![PolicySpec::qomax_sda(0.5, 2.0 / 3.0), PolicySpec::Uniform {}];
    let rows = harness::run_experiment(&config).unwrap().rows;
    let (sda, uniform) = (rows[0].metrics.per.unwrap(), rows[1].metrics.per.unwrap());
    check(
        oracle_per.abs() < 0.05 && uniform - sda >= 0.02,
        format!("oracle PER {oracle_per:.4}; preset 3 PER qomax-sda {sda:.4} vs uniform {uniform:.4}"),
    )
}

fn expected_max_formulas() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();

    let e = mc_expected_max(&ArmDistribution::exponential(1.0).unwrap(), 100_000, 10_000, 8);
    let target = (1e5f64).ln();
    ok &= (e.value - target).abs() / target < 0.10;
    details.push(format!("exp(1) T=1e5: {:.4} vs {target:.4}", e.value));

    let e = mc_expected_max(&pareto(2.0), 100, 100_000, 9);
    let target = 10.0 * std::f64::consts::PI.sqrt();
    ok &= (e.value - target).abs() / target < 0.05;
    details.push(format!("pareto(2) T=100: {:.4} vs {target:.4}", e.value));

    for (law, mean) in [
        (ArmDistribution::exponential(1.0).unwrap(), 1.0),
        (pareto(3.0), 1.5),
        (ArmDistribution::gaussian(1.0, 2.0).unwrap(), 1.0),
        (ArmDistribution::log_normal(0.0, 1.0).unwrap(), 0.5f64.exp()),
    ] {
        let e = mc_expected_max(&law, 1, 10_000, 10);
        ok &= (e.value - mean).abs() < 3.0 * e.std_error;
        details.push(format!("{law} T=1: {:.4}±{:.4} vs {mean:.4}", e.value, e.std_error));
    }
    check(ok, details.join(", "))
}

fn determinism_and_memory() -> Outcome {
    let mut config = preset(1).unwrap();
    config.horizons = vec![1_000, 5_000];
    config.trajectories = 40;
    let csv = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let out = pool.install(|| harness::run_experiment(&config)).unwrap();
        let mut buf = Vec::new();
        harness::write_summary_csv(&out.rows, &mut buf).unwrap();
        buf
    };
    let first = csv(1);
    let identical = first == csv(1) && first == csv(3);

    let horizon = 20_000;
    let bound = 50.0 * (horizon as f64).ln().powi(2);
    let sda = PolicySpec::qomax_sda(0.5, 2.0 / 3.0);
    let peak = (0..100)
        .map(|i| {
            run_trajectory(&config.arms, &sda, horizon, TrajectorySeed::new(9, horizon, i), 3)
                .unwrap()
                .peak_memory_cells
        })
        .max()
        .unwrap();
    check(
        identical && (peak as f64) < bound,
        format!(
            "byte-identical CSV: {identical}; peak cells {peak} vs bound {bound:.0}"
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, u64);
    let criteria: [Criterion; 9] = [
        ("qomax oracle equivalence", qomax_oracle_equivalence, 10),
        ("storage law", storage_law, 30),
        ("concentration in the number of batches", concentration_in_batches, 120),
        ("maxima comparison polynomial rate", maxima_comparison_rate, 120),
        ("etc with three samples per batch", etc_small_batches, 600),
        ("experiment 1 desk scale", experiment_one, 900),
        ("proxy empirical regret sanity", per_sanity, 900),
        ("expected maximum formulas", expected_max_formulas, 600),
        ("determinism and memory", determinism_and_memory, 600),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = within_time(run(), start.elapsed(), Duration::from_secs(*limit));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {tag} {name}: {detail}", i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
