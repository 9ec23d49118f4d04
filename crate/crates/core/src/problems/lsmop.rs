use std::f64::consts::PI;
use std::sync::Arc;

use crate::directions::{divisions_at_most, simplex_lattice};
use crate::error::{config, Result};
use crate::pareto::nondominated_indices;
use crate::solution::{Bounds, Solution};
use crate::structure::{TargetProvider, VariableStructure};

use super::Problem;

const SUBCOMPONENTS: usize = 5;
const CONVERGENCE_GROUPS: usize = 5;

/// Disconnected pieces of the LSMOP9 front in each front coordinate.
const LSMOP9_INTERVALS: [(f64, f64); 2] = [(0.0, 0.251_412), (0.631_627, 0.859_401)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Landscape {
    Sphere,
    Griewank,
    Schwefel,
    Rastrigin,
    Rosenbrock,
    Ackley,
}

impl Landscape {
    fn eval(self, y: &[f64]) -> f64 {
        let n = y.len() as f64;
        match self {
            Landscape::Sphere => y.iter().map(|v| v * v).sum(),
            Landscape::Griewank => {
                let sum: f64 = y.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = y
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                sum - prod + 1.0
            }
            Landscape::Schwefel => y.iter().fold(0.0, |m, v| f64::max(m, v.abs())),
            Landscape::Rastrigin => y.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0).sum(),
            Landscape::Rosenbrock => y
                .windows(2)
                .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
                .sum(),
            Landscape::Ackley => {
                let sq = (y.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
                let cs = y.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                20.0 - 20.0 * (-0.2 * sq).exp() - cs.exp() + std::f64::consts::E
            }
        }
    }

    /// Value of every linked variable at the landscape's minimum.
    fn optimum(self) -> f64 {
        if self == Landscape::Rosenbrock {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Linear,
    Spherical,
    Disconnected,
}

/// One LSMOP instance with `m` objectives and `d` decision variables.
#[derive(Debug, Clone)]
pub struct Lsmop {
    id: usize,
    m: usize,
    bounds: Bounds,
    landscapes: [Landscape; 2],
    shape: Shape,
    nonlinear_linkage: bool,
    sublen: Vec<usize>,
    offsets: Vec<usize>,
    /// Linkage multiplier of each variable (1 for front variables).
    link: Vec<f64>,
    /// Linked-variable optimum of each variable.
    optimum: Vec<f64>,
}

impl Lsmop {
    pub fn new(id: usize, m: usize, d: usize) -> Result<Self> {
        use Landscape::*;
        let (landscapes, shape) = match id {
            1 => ([Sphere, Sphere], Shape::Linear),
            2 => ([Griewank, Schwefel], Shape::Linear),
            3 => ([Rastrigin, Rosenbrock], Shape::Linear),
            4 => ([Ackley, Griewank], Shape::Linear),
            5 => ([Sphere, Sphere], Shape::Spherical),
            6 => ([Rosenbrock, Schwefel], Shape::Spherical),
            7 => ([Ackley, Rosenbrock], Shape::Spherical),
            8 => ([Griewank, Sphere], Shape::Spherical),
            9 => ([Sphere, Ackley], Shape::Disconnected),
            _ => return Err(config(format!("LSMOP id must be 1..=9, got {id}"))),
        };
        if m < 2 {
            return Err(config("LSMOP needs at least two objectives"));
        }
        if d < m {
            return Err(config(format!("LSMOP needs D >= M, got D={d}, M={m}")));
        }
        let mut chaos = vec![3.8 * 0.1 * 0.9];
        for _ in 1..m {
            let c = *chaos.last().expect("nonempty");
            chaos.push(3.8 * c * (1.0 - c));
        }
        let total: f64 = chaos.iter().sum();
        let free = (d - m + 1) as f64;
        let sublen: Vec<usize> = chaos
            .iter()
            .map(|c| (c / total * free / SUBCOMPONENTS as f64).floor() as usize)
            .collect();
        let mut offsets = vec![0];
        for s in &sublen {
            offsets.push(offsets.last().expect("nonempty") + s * SUBCOMPONENTS);
        }
        let nonlinear_linkage = id >= 5;
        let link: Vec<f64> = (0..d)
            .map(|j| {
                if j < m - 1 {
                    return 1.0;
                }
                let r = (j + 1) as f64 / d as f64;
                if nonlinear_linkage {
                    1.0 + (0.5 * PI * r).cos()
                } else {
                    1.0 + r
                }
            })
            .collect();
        let optimum: Vec<f64> = (0..d)
            .map(|j| {
                let rel = j.saturating_sub(m - 1);
                let obj = (0..m).find(|&i| j >= m - 1 && rel < offsets[i + 1]);
                obj.map_or(0.0, |i| landscapes[i % 2].optimum())
            })
            .collect();
        let mut upper = vec![1.0; m - 1];
        upper.extend(std::iter::repeat_n(10.0, d - m + 1));
        Ok(Self {
            id,
            m,
            bounds: Bounds::new(vec![0.0; d], upper)?,
            landscapes,
            shape,
            nonlinear_linkage,
            sublen,
            offsets,
            link,
            optimum,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn has_nonlinear_linkage(&self) -> bool {
        self.nonlinear_linkage
    }

    /// Per-objective distance terms of `x`.
    fn distance_terms(&self, x: &[f64]) -> Vec<f64> {
        let m = self.m;
        let shift = 10.0 * x[0];
        let linked: Vec<f64> = (m - 1..x.len()).map(|j| self.link[j] * x[j] - shift).collect();
        (0..m)
            .map(|i| {
                let len = self.sublen[i];
                if len == 0 {
                    // too few variables to give this objective a subcomponent
                    return 0.0;
                }
                let base = self.offsets[i];
                let sum: f64 = (0..SUBCOMPONENTS)
                    .map(|k| {
                        let start = base + k * len;
                        self.landscapes[i % 2].eval(&linked[start..start + len])
                    })
                    .sum();
                sum / (len * SUBCOMPONENTS) as f64
            })
            .collect()
    }

    /// Front-shape value for front coordinates `u` and distance terms `g`.
    fn shape_value(&self, u: &[f64], g: &[f64]) -> Vec<f64> {
        let m = self.m;
        match self.shape {
            Shape::Linear => (0..m)
                .map(|i| {
                    let mut v = 1.0 + g[i];
                    v *= u[..m - 1 - i].iter().product::<f64>();
                    if i > 0 {
                        v *= 1.0 - u[m - 1 - i];
                    }
                    v
                })
                .collect(),
            Shape::Spherical => (0..m)
                .map(|i| {
                    let next = if i + 1 < m { g[i + 1] } else { 0.0 };
                    let mut v = 1.0 + g[i] + next;
                    v *= u[..m - 1 - i].iter().map(|a| (a * PI / 2.0).cos()).product::<f64>();
                    if i > 0 {
                        v *= (u[m - 1 - i] * PI / 2.0).sin();
                    }
                    v
                })
                .collect(),
            Shape::Disconnected => {
                let scale = 1.0 + (1.0 + g.iter().sum::<f64>());
                let mut f: Vec<f64> = u[..m - 1].to_vec();
                let h: f64 = f.iter().map(|fi| fi / scale * (1.0 + (3.0 * PI * fi).sin())).sum();
                f.push(scale * (m as f64 - h));
                f
            }
        }
    }

    /// Residual of the front's defining equation at `f`; zero on the front.
    pub fn front_equation_residual(&self, f: &[f64]) -> f64 {
        let m = self.m as f64;
        match self.shape {
            Shape::Linear => f.iter().sum::<f64>() - 1.0,
            Shape::Spherical => f.iter().map(|v| v * v).sum::<f64>() - 1.0,
            Shape::Disconnected => {
                let (last, head) = f.split_last().expect("nonempty");
                let h: f64 = head.iter().map(|v| v / 2.0 * (1.0 + (3.0 * PI * v).sin())).sum();
                last - 2.0 * (m - h)
            }
        }
    }

    fn front_coordinates(&self, n: usize) -> Vec<Vec<f64>> {
        let k = self.m - 1;
        if self.shape == Shape::Disconnected {
            let per_dim = if k == 1 { n } else { ((n as f64).powf(1.0 / k as f64).floor() as usize).max(2) };
            let [a, b] = LSMOP9_INTERVALS;
            let split = (a.1 - a.0) / (a.1 - a.0 + b.1 - b.0);
            let grid: Vec<f64> = (0..per_dim)
                .map(|i| {
                    let s = i as f64 / (per_dim - 1).max(1) as f64;
                    if s <= split {
                        a.0 + s / split * (a.1 - a.0)
                    } else {
                        b.0 + (s - split) / (1.0 - split) * (b.1 - b.0)
                    }
                })
                .collect();
            let total = per_dim.pow(k as u32);
            return (0..total)
                .map(|mut code| {
                    (0..k)
                        .map(|_| {
                            let v = grid[code % per_dim];
                            code /= per_dim;
                            v
                        })
                        .collect()
                })
                .collect();
        }
        let weights = if self.m == 2 {
            (0..n)
                .map(|i| {
                    let a = i as f64 / (n - 1).max(1) as f64;
                    vec![a, 1.0 - a]
                })
                .collect()
        } else {
            simplex_lattice(self.m, divisions_at_most(self.m, n))
        };
        match self.shape {
            Shape::Linear => weights,
            _ => weights
                .into_iter()
                .map(|w| {
                    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                    w.into_iter().map(|v| v / norm).collect()
                })
                .collect(),
        }
    }
}

impl Problem for Lsmop {
    fn name(&self) -> String {
        format!("LSMOP{}", self.id)
    }

    fn objectives(&self) -> usize {
        self.m
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let g = self.distance_terms(x);
        (self.shape_value(&x[..self.m - 1], &g), 0.0)
    }

    fn structure(&self) -> VariableStructure {
        let targets = LsmopTargets {
            front: self.m - 1,
            link: self.link.clone(),
            optimum: self.optimum.clone(),
        };
        VariableStructure::contiguous(self.bounds.clone(), self.m - 1, CONVERGENCE_GROUPS, Arc::new(targets))
            .expect("LSMOP bounds admit a contiguous split")
    }

    /// Up to `n` mutually nondominated points on the analytic front.
    fn front_sample(&self, n: usize) -> Option<Vec<Vec<f64>>> {
        let n = n.max(self.m);
        let points = self.front_coordinates(n);
        let points: Vec<Vec<f64>> = if self.shape == Shape::Disconnected {
            let zero = vec![0.0; self.m];
            points.into_iter().map(|u| self.shape_value(&u, &zero)).collect()
        } else {
            points
        };
        let as_solutions: Vec<Solution> = points.iter().map(|f| Solution::unconstrained(Vec::new(), f.clone())).collect();
        let keep = nondominated_indices(&as_solutions);
        Some(keep.into_iter().map(|i| points[i].clone()).collect())
    }
}

/// Variable values that zero the distance terms: each linked variable sits
/// where its landscape is minimal given the first front variable.
#[derive(Debug, Clone)]
pub struct LsmopTargets {
    front: usize,
    link: Vec<f64>,
    optimum: Vec<f64>,
}

impl TargetProvider for LsmopTargets {
    fn target(&self, j: usize, x: &[f64]) -> f64 {
        if j < self.front {
            return 0.5;
        }
        (self.optimum[j] + 10.0 * x[0]) / self.link[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn optimal_point(p: &Lsmop, front: &[f64]) -> Vec<f64> {
        let s = p.structure();
        let mut x = vec![0.0; p.dim()];
        x[..front.len()].copy_from_slice(front);
        for &j in s.convergence() {
            x[j] = s.target(j, &x);
        }
        x
    }

    #[test]
    fn shape_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for id in 1..=9 {
            for m in [2, 3] {
                let p = Lsmop::new(id, m, 100).unwrap();
                let x: Vec<f64> = (0..100).map(|j| rng.random::<f64>() * p.bounds().range(j)).collect();
                let (f, v) = p.evaluate(&x);
                assert_eq!(f.len(), m);
                assert!(f.iter().all(|v| v.is_finite() && *v >= 0.0));
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn optimal_construction_lands_on_front() {
        for id in 1..=9 {
            for m in [2, 3] {
                let p = Lsmop::new(id, m, 300).unwrap();
                for front in [[0.1, 0.7], [0.5, 0.2], [0.85, 0.9]] {
                    let x = optimal_point(&p, &front[..m - 1]);
                    let (f, _) = p.evaluate(&x);
                    assert!(p.front_equation_residual(&f).abs() < 1e-6, "LSMOP{id} M={m}: {f:?}");
                }
            }
        }
    }

    #[test]
    fn front_samples_satisfy_equation() {
        for id in 1..=9 {
            for m in [2, 3] {
                let p = Lsmop::new(id, m, 100).unwrap();
                let s = p.front_sample(200).unwrap();
                assert!(!s.is_empty() && s.len() <= 200);
                for f in &s {
                    assert!(p.front_equation_residual(f).abs() < 1e-9);
                }
            }
        }
        let ends = Lsmop::new(1, 2, 100).unwrap().front_sample(2).unwrap();
        assert!(ends.contains(&vec![0.0, 1.0]) && ends.contains(&vec![1.0, 0.0]));
    }

    #[test]
    fn invalid_configurations() {
        assert!(Lsmop::new(0, 2, 100).is_err());
        assert!(Lsmop::new(10, 2, 100).is_err());
        assert!(Lsmop::new(1, 3, 2).is_err());
    }
}
