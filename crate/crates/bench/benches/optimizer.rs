use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use taea_core::problems::benchmark;
use taea_core::{run, Algorithm, Problem, RunConfig};

fn bench_lsmop(c: &mut Criterion) {
    let mut group = c.benchmark_group("lsmop_evaluate");
    for name in ["LSMOP1", "LSMOP5", "LSMOP9"] {
        let problem = benchmark(name, 2, 500).unwrap();
        let b = problem.bounds().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..500).map(|j| rng.random_range(b.lower()[j]..=b.upper()[j])).collect();
        group.bench_with_input(BenchmarkId::from_parameter(name), &x, |bench, x| {
            bench.iter(|| problem.evaluate(black_box(x)))
        });
    }
    group.finish();
}

/// Ten generations at the benchmark scale, so one iteration approximates
/// the per-generation cost times ten plus setup.
fn bench_generations(c: &mut Criterion) {
    let mut group = c.benchmark_group("ten_generations");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    let problem = benchmark("LSMOP1", 2, 500).unwrap();
    for algorithm in [Algorithm::TrustTaea, Algorithm::VanillaTaea] {
        let config = RunConfig {
            generations: 10,
            metric_interval: 5,
            algorithm,
            ..Default::default()
        };
        group.bench_function(BenchmarkId::from_parameter(format!("{algorithm:?}")), |b| {
            b.iter(|| run(black_box(&config), &problem).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_lsmop, bench_generations);
criterion_main!(benches);
