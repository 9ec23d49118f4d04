//! Second, deliberately literal implementation of the LSMOP suite written with
//! 1-based indices and explicit loops, compared against the library version.

use std::f64::consts::{E, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taea_core::problems::benchmark;
use taea_core::Problem;

fn sphere(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 1..=x.len() {
        s += x[i - 1] * x[i - 1];
    }
    s
}

fn griewank(x: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut p = 1.0;
    for i in 1..=x.len() {
        s += x[i - 1] * x[i - 1];
        p *= (x[i - 1] / (i as f64).sqrt()).cos();
    }
    s / 4000.0 - p + 1.0
}

fn schwefel(x: &[f64]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 1..=x.len() {
        m = m.max(x[i - 1].abs());
    }
    m
}

fn rastrigin(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 1..=x.len() {
        s += x[i - 1] * x[i - 1] - 10.0 * (2.0 * PI * x[i - 1]).cos() + 10.0;
    }
    s
}

fn rosenbrock(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 1..x.len() {
        let a = x[i - 1];
        let b = x[i];
        s += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
    }
    s
}

fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut sq = 0.0;
    let mut cs = 0.0;
    for i in 1..=x.len() {
        sq += x[i - 1] * x[i - 1];
        cs += (2.0 * PI * x[i - 1]).cos();
    }
    20.0 - 20.0 * (-0.2 * (sq / n).sqrt()).exp() - (cs / n).exp() + E
}

type Landscape = fn(&[f64]) -> f64;

fn landscapes(id: usize) -> (Landscape, Landscape) {
    match id {
        1 | 5 => (sphere, sphere),
        2 => (griewank, schwefel),
        3 => (rastrigin, rosenbrock),
        4 => (ackley, griewank),
        6 => (rosenbrock, schwefel),
        7 => (ackley, rosenbrock),
        8 => (griewank, sphere),
        9 => (sphere, ackley),
        _ => unreachable!(),
    }
}

fn oracle(id: usize, m: usize, x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let nk = 5usize;
    // chaotic split of the D-M+1 linked variables over the M objectives
    let mut c = vec![3.8 * 0.1 * (1.0 - 0.1)];
    for _ in 1..m {
        let last = c[c.len() - 1];
        c.push(3.8 * last * (1.0 - last));
    }
    let csum: f64 = c.iter().sum();
    let sublen: Vec<usize> = c
        .iter()
        .map(|ci| (ci / csum * (d - m + 1) as f64 / nk as f64).floor() as usize)
        .collect();
    let mut len = vec![0usize];
    for i in 1..=m {
        len.push(len[i - 1] + sublen[i - 1] * nk);
    }

    // x(:, M:D) after linkage, stored in a 1-based copy
    let mut y = vec![0.0; d + 1];
    for j in 1..=d {
        y[j] = x[j - 1];
    }
    for j in m..=d {
        let r = j as f64 / d as f64;
        let mult = if id <= 4 { 1.0 + r } else { 1.0 + (r * PI / 2.0).cos() };
        y[j] = mult * x[j - 1] - 10.0 * x[0];
    }

    let (odd, even) = landscapes(id);
    let mut g = vec![0.0; m + 1];
    for i in 1..=m {
        let f: Landscape = if i % 2 == 1 { odd } else { even };
        for j in 1..=nk {
            let lo = len[i - 1] + m - 1 + (j - 1) * sublen[i - 1] + 1;
            let hi = len[i - 1] + m - 1 + j * sublen[i - 1];
            g[i] += f(&y[lo..=hi]);
        }
        g[i] /= (sublen[i - 1] * nk) as f64;
    }

    let mut out = vec![0.0; m + 1];
    match id {
        1..=4 => {
            for i in 1..=m {
                let mut v = 1.0 + g[i];
                for k in 1..=(m - i) {
                    v *= y[k];
                }
                if i > 1 {
                    v *= 1.0 - y[m - i + 1];
                }
                out[i] = v;
            }
        }
        5..=8 => {
            for i in 1..=m {
                let next = if i < m { g[i + 1] } else { 0.0 };
                let mut v = 1.0 + g[i] + next;
                for k in 1..=(m - i) {
                    v *= (y[k] * PI / 2.0).cos();
                }
                if i > 1 {
                    v *= (y[m - i + 1] * PI / 2.0).sin();
                }
                out[i] = v;
            }
        }
        9 => {
            let mut gg = 1.0;
            for i in 1..=m {
                gg += g[i];
            }
            let mut h = 0.0;
            for i in 1..m {
                out[i] = y[i];
                h += out[i] / (1.0 + gg) * (1.0 + (3.0 * PI * out[i]).sin());
            }
            out[m] = (1.0 + gg) * (m as f64 - h);
        }
        _ => unreachable!(),
    }
    out[1..].to_vec()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn random_points_match_literal_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for id in 1..=9 {
        for (m, d) in [(2, 100), (3, 100), (2, 500)] {
            let p = benchmark(&format!("LSMOP{id}"), m, d).unwrap();
            let b = p.bounds().clone();
            for _ in 0..100 {
                let x: Vec<f64> = (0..d)
                    .map(|j| rng.random_range(b.lower()[j]..=b.upper()[j]))
                    .collect();
                let (f, v) = p.evaluate(&x);
                assert_eq!(v, 0.0);
                let o = oracle(id, m, &x);
                for (a, e) in f.iter().zip(&o) {
                    assert!(close(*a, *e), "LSMOP{id} M={m} D={d}: {f:?} vs {o:?}");
                }
            }
        }
    }
}

#[test]
fn box_corners_match_literal_oracle() {
    for id in 1..=9 {
        for m in [2, 3] {
            let d = 100;
            let p = benchmark(&format!("LSMOP{id}"), m, d).unwrap();
            let b = p.bounds().clone();
            let mid: Vec<f64> = (0..d).map(|j| b.midpoint(j)).collect();
            for x in [b.lower().to_vec(), b.upper().to_vec(), mid] {
                let (f, _) = p.evaluate(&x);
                let o = oracle(id, m, &x);
                for (a, e) in f.iter().zip(&o) {
                    assert!(close(*a, *e), "LSMOP{id} M={m}: {f:?} vs {o:?}");
                }
            }
        }
    }
}

#[test]
fn front_corners_are_exact() {
    // all linked variables at zero with the first variable at zero: no distance term
    let p = benchmark("LSMOP1", 2, 100).unwrap();
    let x = vec![0.0; 100];
    assert_eq!(p.evaluate(&x).0, vec![0.0, 1.0]);
    let p = benchmark("LSMOP5", 2, 100).unwrap();
    assert_eq!(p.evaluate(&x).0, vec![1.0, 0.0]);
    let p = benchmark("LSMOP9", 2, 100).unwrap();
    // distance term of the sphere part vanishes; Ackley at the origin is zero up to rounding
    let (f, _) = p.evaluate(&x);
    assert_eq!(f[0], 0.0);
    assert!((f[1] - 4.0).abs() < 1e-12);
}
