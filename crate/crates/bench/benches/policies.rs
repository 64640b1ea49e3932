use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use extreme_bandits::harness::preset;
use extreme_bandits::{run_trajectory, PolicySpec, TrajectorySeed};
use std::hint::black_box;

fn trajectories(c: &mut Criterion) {
    let config = preset(1).unwrap();
    let horizon = 10_000;
    let mut group = c.benchmark_group("trajectory_exp1_T1e4");
    group.sample_size(20);
    for spec in [
        PolicySpec::qomax_sda(0.5, 2.0 / 3.0),
        PolicySpec::qomax_etc(0.5),
        PolicySpec::threshold_ascent(),
        PolicySpec::MaxMedian {},
        PolicySpec::Uniform {},
    ] {
        let mut index = 0;
        group.bench_with_input(BenchmarkId::from_parameter(spec.name()), &spec, |b, spec| {
            b.iter(|| {
                index += 1;
                let seed = TrajectorySeed::new(config.master_seed, horizon, index);
                black_box(run_trajectory(&config.arms, spec, horizon, seed, 3).unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, trajectories);
criterion_main!(benches);
