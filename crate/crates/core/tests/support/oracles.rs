//! Brute-force reference implementations shared by oracle tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn brute_dominates(a: &[f64], b: &[f64]) -> bool {
    let mut better = false;
    for k in 0..a.len() {
        if a[k] > b[k] {
            return false;
        }
        if a[k] < b[k] {
            better = true;
        }
    }
    better
}

/// Front index of each point: 0 when undominated, otherwise one more than
/// the deepest front among its dominators.
pub fn brute_fronts(set: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = set.len();
    let mut rank = vec![usize::MAX; n];
    let mut assigned = 0;
    let mut level = 0;
    while assigned < n {
        let current: Vec<usize> = (0..n)
            .filter(|&i| rank[i] == usize::MAX)
            .filter(|&i| {
                !(0..n).any(|j| (rank[j] == usize::MAX || rank[j] == level) && j != i && brute_dominates(&set[j], &set[i]))
            })
            .collect();
        for &i in &current {
            rank[i] = level;
        }
        assigned += current.len();
        level += 1;
    }
    (0..level)
        .map(|l| (0..n).filter(|&i| rank[i] == l).collect())
        .collect()
}

/// Monte Carlo estimate of the dominated volume and its standard error.
pub fn monte_carlo_hv(points: &[Vec<f64>], reference: &[f64], samples: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let m = reference.len();
    let lo: Vec<f64> = (0..m)
        .map(|k| points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let volume: f64 = (0..m).map(|k| reference[k] - lo[k]).product();
    let mut hits = 0usize;
    let mut z = vec![0.0; m];
    for _ in 0..samples {
        for k in 0..m {
            z[k] = rng.random_range(lo[k]..reference[k]);
        }
        if points.iter().any(|p| p.iter().zip(&z).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    (frac * volume, volume * (frac * (1.0 - frac) / samples as f64).sqrt())
}

pub fn random_front(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
            let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
            raw.iter().map(|v| v / norm + 0.05 * rng.random::<f64>()).collect()
        })
        .collect()
}

/// Exact p-value by enumerating every split of the pooled sample.
pub fn enumerated_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let ranks: Vec<f64> = pooled
        .iter()
        .map(|v| {
            let below = pooled.iter().filter(|w| *w < v).count() as f64;
            let equal = pooled.iter().filter(|w| *w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = ranks[..a.len()].iter().sum();
    let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        total += 1;
        if w <= observed + 1e-9 {
            le += 1;
        }
        if w >= observed - 1e-9 {
            ge += 1;
        }
    }
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}
