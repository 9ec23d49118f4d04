//! Anchor-probing compensatory search: late-stage probes that pull elite
//! front-related components toward isolated anchors in front-variable space.

use log::{debug, warn};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{config, Result};
use crate::pareto::nondominated_indices;
use crate::rng::{Role, SeedTree, Stream};
use crate::solution::Solution;
use crate::sparse_search::repair_toward;
use crate::structure::VariableStructure;
use crate::trust::SearchControls;

/// Repair strength used for probe convergence components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeRepair {
    /// Follow the current sparse-search repair strength.
    EqualToRho,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeParams {
    /// Normalized progress below which no probes are generated.
    pub p_start: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta_max: f64,
    /// Interval from which each probe's anchor-expansion coefficient is drawn.
    pub beta_range: (f64, f64),
    /// Full repair by default: a probe moves the front variables far, and a
    /// partial pull leaves the convergence variables tied to the old front position.
    pub repair: ProbeRepair,
    /// Standard deviation of the convergence perturbation, as a fraction of each range.
    pub noise: f64,
}

impl Default for ProbeParams {
    fn default() -> Self {
        Self {
            p_start: 0.12,
            delta0: 0.05,
            delta1: 0.2,
            delta2: 0.2,
            delta_max: 0.5,
            beta_range: (0.3, 0.8),
            repair: ProbeRepair::Fixed(1.0),
            noise: 0.05,
        }
    }
}

impl ProbeParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.p_start) {
            return Err(config("p_start must lie in [0, 1)"));
        }
        if [self.delta0, self.delta1, self.delta2].iter().any(|&d| !(d >= 0.0)) {
            return Err(config("probe intensity coefficients must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.delta_max) {
            return Err(config("delta_max must lie in [0, 1]"));
        }
        let (lo, hi) = self.beta_range;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(config("beta range must be an interval inside [0, 1]"));
        }
        if let ProbeRepair::Fixed(r) = self.repair {
            if !(0.0..=1.0).contains(&r) {
                return Err(config("fixed probe repair strength must lie in [0, 1]"));
            }
        }
        if !(self.noise >= 0.0) {
            return Err(config("probe noise must be nonnegative"));
        }
        Ok(())
    }

    fn repair_strength(&self, controls: &SearchControls) -> f64 {
        match self.repair {
            ProbeRepair::EqualToRho => controls.rho,
            ProbeRepair::Fixed(r) => r,
        }
    }
}

/// Probe share of the population and the resulting probe count.
pub fn compensation_intensity(trust: f64, p: f64, nd_ratio: f64, n: usize, params: &ProbeParams) -> (f64, usize) {
    if p < params.p_start {
        return (0.0, 0);
    }
    let raw = params.delta0 + params.delta1 * (1.0 - trust) + params.delta2 * (1.0 - nd_ratio);
    let delta = raw.clamp(0.0, params.delta_max);
    // The small guard keeps products such as 100 * 0.29 from rounding up to 30.
    let count = (n as f64 * delta - 1e-9).ceil().max(0.0) as usize;
    (delta, count)
}

const MAX_LATTICE: usize = 200;

fn lattice_levels(dim: usize, count: usize) -> usize {
    let wanted = ((count as f64).powf(1.0 / dim as f64).ceil() as usize).max(11);
    let cap = (MAX_LATTICE as f64).powf(1.0 / dim as f64).floor() as usize;
    wanted.min(cap).max(2)
}

/// Candidate anchors in front-variable space, most isolated first.
///
/// Small front groups get a full tensor lattice (which contains every bound
/// corner); large ones get a diagonal lattice of constant-level profiles.
/// Isolation is the normalized distance to the nearest front-variable
/// projection of a nondominated archive member; ties keep lattice order.
pub fn build_anchor_set(structure: &VariableStructure, archive: &[Solution], count: usize) -> Vec<Vec<f64>> {
    let front = structure.front();
    let bounds = structure.bounds();
    let dim = front.len();
    let levels_for = |levels: usize| -> Vec<f64> { (0..levels).map(|i| i as f64 / (levels - 1) as f64).collect() };

    let unit: Vec<Vec<f64>> = if dim <= 7 && (1usize << dim) <= MAX_LATTICE {
        let levels = levels_for(lattice_levels(dim, count.max(1)));
        let total = levels.len().pow(dim as u32);
        (0..total)
            .map(|mut code| {
                let mut point = vec![0.0; dim];
                for slot in point.iter_mut() {
                    *slot = levels[code % levels.len()];
                    code /= levels.len();
                }
                point
            })
            .collect()
    } else {
        let levels = levels_for(count.clamp(11, MAX_LATTICE));
        levels.iter().map(|&u| vec![u; dim]).collect()
    };

    let projections: Vec<Vec<f64>> = nondominated_indices(archive)
        .into_iter()
        .map(|i| front.iter().map(|&j| bounds.normalize(j, archive[i].x[j])).collect())
        .collect();
    let isolation: Vec<f64> = unit
        .iter()
        .map(|a| {
            projections
                .iter()
                .map(|p| a.iter().zip(p).map(|(u, v)| (u - v).powi(2)).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut order: Vec<usize> = (0..unit.len()).collect();
    order.sort_by(|&a, &b| isolation[b].total_cmp(&isolation[a]).then(a.cmp(&b)));
    order
        .into_iter()
        .map(|i| {
            unit[i]
                .iter()
                .zip(front)
                .map(|(&u, &j)| bounds.lower()[j] + u * bounds.range(j))
                .collect()
        })
        .collect()
}

/// One probe: the elite's front component blended toward `anchor` by `beta`,
/// and its convergence component perturbed then pulled toward the targets.
pub fn generate_probe(
    elite: &[f64],
    anchor: &[f64],
    beta: f64,
    rho_probe: f64,
    noise: f64,
    structure: &VariableStructure,
    rng: &mut Stream,
) -> Vec<f64> {
    let bounds = structure.bounds();
    let mut probe = elite.to_vec();
    for (&j, &a) in structure.front().iter().zip(anchor) {
        let e = elite[j];
        let v = (1.0 - beta) * e + beta * a;
        probe[j] = bounds.clip(j, v.clamp(e.min(a), e.max(a)));
    }
    for &j in structure.convergence() {
        let sd = noise * bounds.range(j);
        let n = Normal::new(0.0, sd).map(|d| d.sample(rng)).unwrap_or(0.0);
        probe[j] = bounds.clip(j, elite[j] + n);
    }
    let targets: Vec<f64> = structure.convergence().iter().map(|&j| structure.target(j, &probe)).collect();
    for (&j, t) in structure.convergence().iter().zip(targets) {
        probe[j] = bounds.clip(j, repair_toward(probe[j], t, rho_probe));
    }
    probe
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbeOutput {
    pub probes: Vec<Vec<f64>>,
    pub delta: f64,
}

/// Trust-guided probe batch for one generation. Empty before `p_start` or
/// when the intensity rounds to zero probes.
#[allow(clippy::too_many_arguments)]
pub fn probe_offspring(
    archive: &[Solution],
    trust: f64,
    p: f64,
    controls: &SearchControls,
    structure: &VariableStructure,
    params: &ProbeParams,
    n: usize,
    seeds: &SeedTree,
    generation: usize,
) -> ProbeOutput {
    if archive.is_empty() {
        return ProbeOutput::default();
    }
    let nd = nondominated_indices(archive);
    let nd_ratio = nd.len() as f64 / archive.len() as f64;
    let (delta, count) = compensation_intensity(trust, p, nd_ratio, n, params);
    if count == 0 {
        return ProbeOutput { probes: Vec::new(), delta };
    }
    let elites: Vec<usize> = if nd.is_empty() {
        warn!("no nondominated archive members; probe elites drawn from the whole archive");
        (0..archive.len()).collect()
    } else {
        nd
    };
    let anchors = build_anchor_set(structure, archive, 2 * count);
    let rho = params.repair_strength(controls);
    let (lo, hi) = params.beta_range;
    debug!("generation {generation}: {count} probes over {} anchors", anchors.len());
    let probes = (0..count)
        .into_par_iter()
        .map(|q| {
            let mut rng = seeds.stream(generation as u64, Role::Probe, q as u64);
            let beta = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            let elite = &archive[elites[rng.random_range(0..elites.len())]];
            generate_probe(&elite.x, &anchors[q % anchors.len()], beta, rho, params.noise, structure, &mut rng)
        })
        .collect();
    ProbeOutput { probes, delta }
}
