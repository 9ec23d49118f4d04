//! Trust-guided variable-grouping sparse search.
//!
//! Each generation samples a subset of variable groups, builds one trial per
//! parent with a dual-mode differential mutant, lets only active coordinates
//! inherit from the mutant and pulls active convergence-related coordinates
//! toward their structural targets.

use log::debug;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{config, Result};
use crate::pareto::{crowding_distance, nondominated_indices, unique_mask};
use crate::rng::{Role, SeedTree, Stream};
use crate::solution::{Bounds, Solution};
use crate::structure::VariableStructure;
use crate::trust::SearchControls;

#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionParams {
    /// Differential scaling factor.
    pub f: f64,
    /// Binomial crossover rate.
    pub cr: f64,
    /// Weight of the differential term in the guided branch.
    pub lambda: f64,
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
    /// Fraction of the archive capacity used as the elite subset.
    pub elite_fraction: f64,
}

impl Default for ReproductionParams {
    fn default() -> Self {
        Self {
            f: 0.5,
            cr: 0.9,
            lambda: 0.5,
            omega0: 0.4,
            omega1: 0.3,
            omega2: 0.3,
            elite_fraction: 0.2,
        }
    }
}

impl ReproductionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.f >= 0.0) || !(0.0..=1.0).contains(&self.cr) || !(self.lambda >= 0.0) {
            return Err(config("reproduction requires F >= 0, CR in [0,1], lambda >= 0"));
        }
        let w = [self.omega0, self.omega1, self.omega2];
        if !(self.omega0 > 0.0) || w.iter().any(|&v| v < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(config("group weights require omega0 > 0, omega1, omega2 >= 0, sum 1"));
        }
        if !(self.elite_fraction > 0.0 && self.elite_fraction <= 1.0) {
            return Err(config("elite fraction must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Elite subset: the most crowded-apart members of ND(archive), at most
/// `ceil(fraction * capacity)` of them. Falls back to the whole archive when
/// it has no nondominated members.
pub fn select_elite(archive: &[Solution], capacity: usize, fraction: f64) -> Vec<usize> {
    let nd = nondominated_indices(archive);
    let pool: Vec<usize> = if nd.is_empty() {
        (0..archive.len()).collect()
    } else {
        nd
    };
    let want = ((fraction * capacity as f64).ceil() as usize).max(1);
    if pool.len() <= want {
        return pool;
    }
    let objs: Vec<Vec<f64>> = pool.iter().map(|&i| archive[i].f.clone()).collect();
    let cd = crowding_distance(&objs);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]).then(a.cmp(&b)));
    order.truncate(want);
    order.sort_unstable();
    order.into_iter().map(|o| pool[o]).collect()
}

/// Dispersion and structural residual per variable group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub spr: Vec<f64>,
    pub res: Vec<f64>,
}

/// Activity weights and sampling probabilities per group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupWeights {
    pub weight: Vec<f64>,
    pub prob: Vec<f64>,
}

/// Per-group dispersion (population standard deviation over the elite,
/// relative to the bound range) and mean absolute structural residual.
pub fn group_statistics(elite: &[&[f64]], structure: &VariableStructure) -> GroupStats {
    let bounds = structure.bounds();
    let n = elite.len();
    let groups = structure.groups();
    let mut spr = vec![0.0; groups.len()];
    let mut res = vec![0.0; groups.len()];
    for (k, g) in groups.iter().enumerate() {
        if n >= 2 {
            let mut acc = 0.0;
            for &j in g {
                let mean = elite.iter().map(|x| x[j]).sum::<f64>() / n as f64;
                let var = elite.iter().map(|x| (x[j] - mean).powi(2)).sum::<f64>() / n as f64;
                acc += var.sqrt() / bounds.range(j);
            }
            spr[k] = acc / g.len() as f64;
        }
        if n >= 1 && k > 0 {
            let mut acc = 0.0;
            for x in elite {
                let target = structure.group_target(k, x).unwrap_or(0.0);
                acc += g
                    .iter()
                    .map(|&j| (structure.transform(j, x) - target).abs())
                    .sum::<f64>();
            }
            res[k] = acc / (n * g.len()) as f64;
        }
    }
    GroupStats { spr, res }
}

fn max_normalized(v: &[f64]) -> Vec<f64> {
    let max = v.iter().copied().fold(0.0f64, f64::max);
    if max > 0.0 {
        v.iter().map(|x| x / max).collect()
    } else {
        vec![0.0; v.len()]
    }
}

pub fn group_weights(stats: &GroupStats, params: &ReproductionParams) -> GroupWeights {
    let spr = max_normalized(&stats.spr);
    let res = max_normalized(&stats.res);
    let weight: Vec<f64> = spr
        .iter()
        .zip(&res)
        .map(|(s, r)| params.omega0 + params.omega1 * s + params.omega2 * r)
        .collect();
    let total: f64 = weight.iter().sum();
    let prob = weight.iter().map(|w| w / total).collect();
    GroupWeights { weight, prob }
}

/// Draws `k_active` distinct groups without replacement, proportionally to
/// `prob`. Returns the sorted active groups and the sorted active dimensions.
pub fn group_sampling(
    weights: &GroupWeights,
    structure: &VariableStructure,
    k_active: usize,
    rng: &mut Stream,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let k = weights.prob.len();
    if k_active == 0 || k_active > k {
        return Err(config(format!("cannot activate {k_active} of {k} groups")));
    }
    let mut remaining: Vec<usize> = (0..k).collect();
    let mut chosen = Vec::with_capacity(k_active);
    for _ in 0..k_active {
        let total: f64 = remaining.iter().map(|&g| weights.prob[g]).sum();
        let mut r = rng.random::<f64>() * total;
        let mut pick = remaining.len() - 1;
        for (pos, &g) in remaining.iter().enumerate() {
            r -= weights.prob[g];
            if r < 0.0 {
                pick = pos;
                break;
            }
        }
        chosen.push(remaining.remove(pick));
    }
    chosen.sort_unstable();
    let mut dims: Vec<usize> = chosen
        .iter()
        .flat_map(|&g| structure.groups()[g].iter().copied())
        .collect();
    dims.sort_unstable();
    Ok((chosen, dims))
}

/// The two branches of the dual-mode mutant, clipped to `bounds`.
///
/// Exploration: `a + F (b - c)`. Guided: `x + F (g - x) + lambda F (b - c)`.
#[allow(clippy::too_many_arguments)]
pub fn dual_mode_mutant(
    parent: &[f64],
    a: &[f64],
    b: &[f64],
    c: &[f64],
    guide: &[f64],
    explore: bool,
    params: &ReproductionParams,
    bounds: &Bounds,
) -> Vec<f64> {
    let f = params.f;
    (0..parent.len())
        .map(|j| {
            let v = if explore {
                a[j] + f * (b[j] - c[j])
            } else {
                parent[j] + f * (guide[j] - parent[j]) + params.lambda * f * (b[j] - c[j])
            };
            bounds.clip(j, v)
        })
        .collect()
}

/// Mutant vector for one parent. `pool` must hold pairwise-distinct decision
/// vectors; with fewer than three the parent is perturbed by Gaussian noise
/// of one percent of each range instead.
pub fn generate_mutant(
    parent: &[f64],
    pool: &[&[f64]],
    elite: &[&[f64]],
    p_explore: f64,
    params: &ReproductionParams,
    bounds: &Bounds,
    rng: &mut Stream,
) -> Vec<f64> {
    if pool.len() < 3 || elite.is_empty() {
        debug!("mutation pool has {} distinct members; using Gaussian fallback", pool.len());
        return gaussian_perturbation(parent, 0.01, bounds, rng);
    }
    let explore = rng.random::<f64>() < p_explore;
    let ia = rng.random_range(0..pool.len());
    let mut ib = rng.random_range(0..pool.len() - 1);
    if ib >= ia {
        ib += 1;
    }
    let mut ic = rng.random_range(0..pool.len() - 2);
    for used in sorted_pair(ia, ib) {
        if ic >= used {
            ic += 1;
        }
    }
    let guide = elite[rng.random_range(0..elite.len())];
    dual_mode_mutant(parent, pool[ia], pool[ib], pool[ic], guide, explore, params, bounds)
}

fn sorted_pair(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

pub(crate) fn gaussian_perturbation(x: &[f64], sigma_frac: f64, bounds: &Bounds, rng: &mut Stream) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(j, &v)| {
            let noise = Normal::new(0.0, sigma_frac * bounds.range(j))
                .map(|d| d.sample(rng))
                .unwrap_or(0.0);
            bounds.clip(j, v + noise)
        })
        .collect()
}

/// Convex pull of `value` toward `target`, kept inside the segment between them.
#[inline]
pub fn repair_toward(value: f64, target: f64, rho: f64) -> f64 {
    let v = (1.0 - rho) * value + rho * target;
    v.clamp(value.min(target), value.max(target))
}

/// Sparse binomial crossover restricted to `active_dims`, followed by
/// structural repair of the active convergence-related coordinates.
pub fn sparse_crossover_repair(
    parent: &[f64],
    mutant: &[f64],
    active_dims: &[usize],
    rho: f64,
    structure: &VariableStructure,
    params: &ReproductionParams,
    rng: &mut Stream,
) -> Vec<f64> {
    let mut trial = parent.to_vec();
    if active_dims.is_empty() {
        return trial;
    }
    let forced = active_dims[rng.random_range(0..active_dims.len())];
    for &j in active_dims {
        let take = rng.random::<f64>() < params.cr;
        if take || j == forced {
            trial[j] = mutant[j];
        }
    }
    let targets: Vec<(usize, f64)> = active_dims
        .iter()
        .filter(|&&j| structure.is_convergence(j))
        .map(|&j| (j, structure.target(j, &trial)))
        .collect();
    let bounds = structure.bounds();
    for (j, target) in targets {
        trial[j] = bounds.clip(j, repair_toward(trial[j], target, rho));
    }
    for &j in active_dims {
        trial[j] = bounds.clip(j, trial[j]);
    }
    trial
}

/// Output of one sparse-search generation.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSearchOutput {
    pub trials: Vec<Vec<f64>>,
    pub active_groups: Vec<usize>,
    pub active_dims: Vec<usize>,
    pub weights: GroupWeights,
}

/// Everything the sparse search reads from the current generation.
pub struct SearchContext<'a> {
    pub population: &'a [Solution],
    pub convergence: &'a [Solution],
    pub preference: &'a [Solution],
    pub capacity: usize,
    pub structure: &'a VariableStructure,
    pub params: &'a ReproductionParams,
    pub seeds: &'a SeedTree,
    pub generation: usize,
}

/// One trial per parent. The active groups are sampled once per generation
/// and shared by all parents; each parent draws from its own derived stream.
pub fn sparse_search_offspring(ctx: &SearchContext<'_>, controls: &SearchControls) -> Result<SparseSearchOutput> {
    let structure = ctx.structure;
    let gen = ctx.generation as u64;
    let elite_idx = select_elite(ctx.convergence, ctx.capacity, ctx.params.elite_fraction);
    let elite: Vec<&[f64]> = if elite_idx.is_empty() {
        ctx.population.iter().map(|s| s.x.as_slice()).collect()
    } else {
        elite_idx.iter().map(|&i| ctx.convergence[i].x.as_slice()).collect()
    };
    let stats = group_statistics(&elite, structure);
    let weights = group_weights(&stats, ctx.params);
    let mut sampler = ctx.seeds.stream(gen, Role::GroupSampling, 0);
    let (active_groups, active_dims) = group_sampling(&weights, structure, controls.k_active, &mut sampler)?;

    let all: Vec<&[f64]> = ctx
        .population
        .iter()
        .chain(ctx.convergence)
        .chain(ctx.preference)
        .map(|s| s.x.as_slice())
        .collect();
    let pool: Vec<&[f64]> = all
        .iter()
        .zip(unique_mask(&all))
        .filter_map(|(x, k)| k.then_some(*x))
        .collect();

    let trials: Vec<Vec<f64>> = ctx
        .population
        .par_iter()
        .enumerate()
        .map(|(i, parent)| {
            let mut rng = ctx.seeds.stream(gen, Role::Offspring, i as u64);
            let mutant = generate_mutant(
                &parent.x,
                &pool,
                &elite,
                controls.p_explore,
                ctx.params,
                structure.bounds(),
                &mut rng,
            );
            sparse_crossover_repair(&parent.x, &mutant, &active_dims, controls.rho, structure, ctx.params, &mut rng)
        })
        .collect();
    Ok(SparseSearchOutput {
        trials,
        active_groups,
        active_dims,
        weights,
    })
}
