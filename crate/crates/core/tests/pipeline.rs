use std::fs;

use extreme_bandits::harness::{self, preset, ExperimentConfig};
use extreme_bandits::{ArmDistribution, PolicySpec};

fn small(id: u32) -> ExperimentConfig {
    let mut config = preset(id).unwrap();
    config.horizons = vec![500, 1000];
    config.trajectories = 8;
    config
}

#[test]
fn every_preset_runs_every_algorithm() {
    for id in 1..=8 {
        let config = small(id);
        let out = harness::run_experiment(&config).unwrap();
        assert_eq!(out.rows.len(), 5 * 2, "preset {id}");
        assert_eq!(out.trajectories.len(), 5 * 2 * 8);
        for record in &out.trajectories {
            assert_eq!(record.result.pulls_per_arm.iter().sum::<u64>(), record.horizon);
            assert_eq!(record.result.pulls_per_arm.len(), config.arms.len());
        }
        for row in &out.rows {
            assert!(row.metrics.per.is_some(), "preset {id} {}", row.algorithm);
            let fractions = row.metrics.best_arm_quantiles;
            assert!(fractions.windows(2).all(|w| w[0] <= w[1]));
            assert!((0.0..=1.0).contains(&row.metrics.mean_best_arm_fraction));
        }
    }
}

#[test]
fn trajectory_seeds_are_shared_across_algorithms() {
    let out = harness::run_experiment(&small(1)).unwrap();
    let by_algo: Vec<Vec<(u64, u64)>> = out
        .trajectories
        .chunks(16)
        .map(|c| c.iter().map(|r| (r.result.seed, r.result.stream)).collect())
        .collect();
    assert!(by_algo.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("tiny.toml");
    fs::write(
        &config_path,
        r#"
name = "tiny"
dominant_arm = 2
trajectories = 5
horizons = [300]
master_seed = 11

[[arms]]
kind = "exponential"
lambda = 2.0

[[arms]]
kind = "pareto"
lambda = 0.8

[[algorithms]]
name = "qomax-sda"

[[algorithms]]
name = "max-median"
"#,
    )
    .unwrap();
    let config = ExperimentConfig::load(&config_path).unwrap();
    let out = harness::run_experiment(&config).unwrap();
    let out_dir = dir.path().join("out");
    harness::write_outputs(&out_dir, &out, true).unwrap();

    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 3);
    // No finite expected maximum for the dominant arm: the PER column stays empty.
    for line in &lines[1..] {
        let fields: Vec<&str> = line.rsplitn(15, ',').collect();
        assert_eq!(fields[14].rsplit(',').next().unwrap(), "");
    }

    let raw = fs::read_to_string(out_dir.join("trajectories.jsonl")).unwrap();
    let records: Vec<serde_json::Value> = raw.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 10);
    assert_eq!(records[0]["algorithm"], "qomax-sda:q=0.5,gamma=0.6666666666666666");
    assert_eq!(records[0]["trajectory"], 0);
    assert_eq!(records[9]["pulls_per_arm"].as_array().unwrap().len(), 2);
}

#[test]
fn json_config_reports_the_offending_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(
        &path,
        r#"{
  "name": "broken",
  "arms": [{"kind": "pareto", "lambda": 1.5}],
  "algorithms": [{"name": "qomax-sda", "gama": 0.5}],
  "dominant_arm": 1
}"#,
    )
    .unwrap();
    let err = ExperimentConfig::load(&path).unwrap_err().to_string();
    assert!(err.contains("broken.json") && err.contains("line 4") && err.contains("gama"), "{err}");
}

#[test]
fn etc_is_shrunk_at_short_horizons() {
    let mut config = small(1);
    config.horizons = vec![1000];
    config.algorithms = vec![PolicySpec::qomax_etc(0.5)];
    let out = harness::run_experiment(&config).unwrap();
    // K n b = 5 * 7 * 14 = 490 exploration pulls, 98 per arm.
    for record in &out.trajectories {
        assert!(record.result.pulls_per_arm.iter().all(|&p| p >= 98));
        assert_eq!(record.result.peak_memory_cells, 5 * 14);
    }
}

#[test]
fn single_arm_play_matches_the_law() {
    let config = ExperimentConfig {
        name: "single".into(),
        arms: vec![ArmDistribution::pareto(1.0, 3.0).unwrap()],
        algorithms: vec![PolicySpec::Uniform {}],
        horizons: vec![1],
        trajectories: 20_000,
        master_seed: 1,
        dominant_arm: 1,
    };
    let out = harness::run_experiment(&config).unwrap();
    let mean = out.trajectories.iter().map(|r| r.result.max_reward).sum::<f64>() / 20_000.0;
    assert!((mean - 1.5).abs() < 0.03, "{mean}");
}
