use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use extreme_bandits::{qomax_full, qomax_subsample, ArmDistribution, ArmHistory, MaxRecord};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn draws(n: usize, seed: u64) -> Vec<f64> {
    let d = ArmDistribution::pareto(1.0, 1.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| d.sample(&mut rng)).collect()
}

fn efficient_update(c: &mut Criterion) {
    let mut group = c.benchmark_group("efficient_update");
    for n in [1_000usize, 10_000, 100_000] {
        let xs = draws(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &xs, |b, xs| {
            b.iter(|| {
                let mut record = MaxRecord::new();
                for (i, &x) in xs.iter().enumerate() {
                    record.efficient_update(i as u64 + 1, x).unwrap();
                }
                black_box(record.memory_cells())
            })
        });
    }
    group.finish();
}

fn history(n: usize, b: usize) -> ArmHistory {
    let table: Vec<Vec<f64>> = (0..b).map(|j| draws(n, j as u64)).collect();
    ArmHistory::from_table(0, &table).unwrap()
}

fn qomax(c: &mut Criterion) {
    let mut group = c.benchmark_group("qomax");
    for (n, b) in [(100usize, 22usize), (1_000, 100), (10_000, 465)] {
        let h = history(n, b);
        group.bench_with_input(BenchmarkId::new("full", format!("{n}x{b}")), &h, |bench, h| {
            bench.iter(|| black_box(qomax_full(h, 0.5).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("subsample", format!("{n}x{b}")), &h, |bench, h| {
            bench.iter(|| black_box(qomax_subsample(h, n as u64 / 10, b / 3, 0.5).unwrap()))
        });
    }
    group.bench_function("append_query_465_batches", |bench| {
        let sample = draws(465, 99);
        bench.iter_batched(
            || history(50, 465),
            |mut h| {
                h.append_query(&sample).unwrap();
                h
            },
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

criterion_group!(benches, efficient_update, qomax);
criterion_main!(benches);
