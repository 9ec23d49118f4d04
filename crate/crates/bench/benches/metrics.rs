use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use taea_core::metrics::{hypervolume, igd_plus};
use taea_core::pareto::{nondominated_indices, nondominated_sort_objectives};
use taea_core::Solution;

/// Mutually nondominated points near the unit sphere.
fn front(m: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
            let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            raw.iter().map(|v| v / norm).collect()
        })
        .collect()
}

fn random_set(m: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..m).map(|_| rng.random::<f64>()).collect()).collect()
}

fn bench_hypervolume(c: &mut Criterion) {
    let mut group = c.benchmark_group("hypervolume");
    for (m, n) in [(2, 100), (3, 100), (3, 200)] {
        let pts = front(m, n, 1);
        let reference = vec![1.1; m];
        group.bench_with_input(BenchmarkId::new(format!("m{m}"), n), &pts, |b, pts| {
            b.iter(|| hypervolume(black_box(pts), &reference).unwrap())
        });
    }
    group.finish();
}

fn bench_igd_plus(c: &mut Criterion) {
    let approx = front(2, 100, 2);
    let reference = front(2, 1000, 3);
    c.bench_function("igd_plus/100x1000", |b| {
        b.iter(|| igd_plus(black_box(&approx), black_box(&reference)).unwrap())
    });
}

fn bench_sorting(c: &mut Criterion) {
    let mut group = c.benchmark_group("nondominated");
    for m in [2, 3] {
        let set = random_set(m, 200, 4);
        group.bench_with_input(BenchmarkId::new("sort", m), &set, |b, set| {
            b.iter(|| nondominated_sort_objectives(black_box(set)).unwrap())
        });
        let sols: Vec<Solution> = set.iter().map(|f| Solution::unconstrained(vec![], f.clone())).collect();
        group.bench_with_input(BenchmarkId::new("first_front", m), &sols, |b, sols| {
            b.iter(|| nondominated_indices(black_box(sols)))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_hypervolume, bench_igd_plus, bench_sorting);
criterion_main!(benches);
