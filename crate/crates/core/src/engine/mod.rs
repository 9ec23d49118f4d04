//! The generation loop for the trust-guided optimizer and its vanilla
//! two-archive baseline.

mod archive;

pub use archive::{
    rebuild_population, select_convergence, select_preference, update_convergence_archive,
    update_preference_archive,
};

use std::time::Instant;

use log::{info, warn};
use rand::Rng;
use rayon::prelude::*;

use crate::anchor_probe::{probe_offspring, ProbeParams};
use crate::checkpoint::{archive_score, seed_checkpoint, stabilize, CheckpointEvent, CheckpointParams, ScoreContext};
use crate::error::{config, Error, Result};
use crate::metrics::{igd_plus, normalized_hypervolume};
use crate::pareto::{deduplicate, nondominated_indices, ObjectiveScale};
use crate::problems::Problem;
use crate::rng::{Role, SeedTree};
use crate::solution::{Population, Solution};
use crate::sparse_search::{sparse_search_offspring, ReproductionParams, SearchContext};
use crate::structure::VariableStructure;
use crate::trust::{bin_directions, derive_controls, evaluate_trust, SearchControls, TrustParams, TrustState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    TrustTaea,
    VanillaTaea,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::TrustTaea => "trust_taea",
            Algorithm::VanillaTaea => "vanilla_taea",
        }
    }

    /// Accepts both `trust_taea` and `trust-taea` spellings.
    pub fn parse(s: &str) -> Option<Self> {
        match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "trust_taea" => Some(Algorithm::TrustTaea),
            "vanilla_taea" => Some(Algorithm::VanillaTaea),
            _ => None,
        }
    }
}

/// Size of the true-front sample used for IGD+.
pub const REFERENCE_SAMPLE: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub population: usize,
    pub generations: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub trust: TrustParams,
    pub reproduction: ReproductionParams,
    pub probe: ProbeParams,
    pub checkpoint: CheckpointParams,
    /// Generations between metric snapshots; 0 records only the final generation.
    pub metric_interval: usize,
    /// Stop before a generation whose offspring would exceed this many evaluations.
    pub max_evaluations: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            population: 100,
            generations: 500,
            seed: 1,
            algorithm: Algorithm::TrustTaea,
            trust: TrustParams::default(),
            reproduction: ReproductionParams::default(),
            probe: ProbeParams::default(),
            checkpoint: CheckpointParams::default(),
            metric_interval: 10,
            max_evaluations: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self, groups: usize) -> Result<()> {
        if self.population < 4 {
            return Err(config(format!("population must be at least 4, got {}", self.population)));
        }
        if self.generations < 2 {
            return Err(config(format!("at least two generations required, got {}", self.generations)));
        }
        self.trust.validate(groups)?;
        self.reproduction.validate()?;
        self.probe.validate()?;
        self.checkpoint.validate()
    }
}

/// One metrics snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub generation: usize,
    pub evaluations: usize,
    pub hv: Option<f64>,
    pub igd_plus: Option<f64>,
    pub trust: f64,
    pub phi: f64,
    pub maturity: f64,
    pub delta: f64,
    pub nd_ratio: f64,
    pub event: CheckpointEvent,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub convergence: Population,
    pub preference: Population,
    pub population: Population,
    pub rows: Vec<MetricRow>,
    pub evaluations: usize,
    pub generations_run: usize,
    pub seconds: f64,
}

impl RunResult {
    pub fn final_row(&self) -> Option<&MetricRow> {
        self.rows.last()
    }

    pub fn events(&self) -> impl Iterator<Item = (usize, CheckpointEvent)> + '_ {
        self.rows
            .iter()
            .filter(|r| r.event != CheckpointEvent::None)
            .map(|r| (r.generation, r.event))
    }
}

/// Per-generation view handed to an observer after the population rebuild.
#[derive(Debug)]
pub struct GenerationReport<'a> {
    pub generation: usize,
    pub state: TrustState,
    pub controls: SearchControls,
    pub active_groups: &'a [usize],
    pub probes: usize,
    pub delta: f64,
    pub event: CheckpointEvent,
    pub convergence: &'a [Solution],
    pub preference: &'a [Solution],
    pub population: &'a [Solution],
    pub evaluations: usize,
}

/// Reference data for HV and IGD+ when the true front is known.
struct FrontReference {
    sample: Vec<Vec<f64>>,
    scale: ObjectiveScale,
}

impl FrontReference {
    fn for_problem(problem: &dyn Problem) -> Option<Self> {
        let sample = problem.front_sample(REFERENCE_SAMPLE)?;
        let scale = ObjectiveScale::from_points(sample.iter().map(Vec::as_slice))?;
        Some(Self { sample, scale })
    }

    fn measure(&self, archive: &[Solution]) -> (Option<f64>, Option<f64>) {
        let front: Vec<Vec<f64>> = nondominated_indices(archive)
            .into_iter()
            .filter(|&i| archive[i].is_feasible())
            .map(|i| archive[i].f.clone())
            .collect();
        if front.is_empty() {
            return (None, None);
        }
        (normalized_hypervolume(&front, &self.scale).ok(), igd_plus(&front, &self.sample).ok())
    }
}

fn evaluate_batch(problem: &dyn Problem, xs: Vec<Vec<f64>>, generation: usize) -> Result<Vec<Solution>> {
    let solutions: Vec<Solution> = xs
        .into_par_iter()
        .map(|x| {
            let (f, violation) = problem.evaluate(&x);
            Solution::new(x, f, violation)
        })
        .collect();
    if let Some((index, s)) = solutions
        .iter()
        .enumerate()
        .find(|(_, s)| s.f.iter().any(|v| !v.is_finite()) || s.violation.is_nan())
    {
        return Err(Error::NonFinite {
            generation,
            index,
            detail: format!("{} returned f = {:?}, violation = {}", problem.name(), s.f, s.violation),
        });
    }
    Ok(solutions)
}

fn measured(mut row: MetricRow, reference: Option<&FrontReference>, archive: &[Solution]) -> MetricRow {
    if let Some(r) = reference {
        (row.hv, row.igd_plus) = r.measure(archive);
    }
    row
}

fn current_scale(set: &[Solution]) -> ObjectiveScale {
    ObjectiveScale::from_nondominated(set)
        .or_else(|| ObjectiveScale::from_points(set.iter().map(|s| s.f.as_slice())))
        .expect("archives are nonempty")
}

fn nd_ratio(set: &[Solution]) -> f64 {
    if set.is_empty() {
        0.0
    } else {
        nondominated_indices(set).len() as f64 / set.len() as f64
    }
}

/// Best value of each objective over the given sets.
fn objective_best<'a>(sets: impl IntoIterator<Item = &'a [Solution]>, m: usize) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; m];
    for s in sets.into_iter().flatten().filter(|s| s.is_feasible()) {
        for (b, v) in best.iter_mut().zip(&s.f) {
            *b = b.min(*v);
        }
    }
    best
}

pub fn run(config: &RunConfig, problem: &dyn Problem) -> Result<RunResult> {
    run_with_observer(config, problem, |_| {})
}

/// Runs the optimizer, calling `observer` once per completed generation.
pub fn run_with_observer(
    config: &RunConfig,
    problem: &dyn Problem,
    mut observer: impl FnMut(&GenerationReport<'_>),
) -> Result<RunResult> {
    let started = Instant::now();
    let structure: VariableStructure = problem.structure();
    let groups = structure.group_count();
    config.validate(groups)?;
    let n = config.population;
    let m = problem.objectives();
    let seeds = SeedTree::new(config.seed);
    let trust_mode = config.algorithm == Algorithm::TrustTaea;
    let reference = FrontReference::for_problem(problem);
    let dirs = bin_directions(m, &config.trust, n);
    let bounds = problem.bounds();

    let mut init_rng = seeds.stream(0, Role::Init, 0);
    let initial: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..bounds.dim())
                .map(|j| bounds.lower()[j] + init_rng.random::<f64>() * bounds.range(j))
                .collect()
        })
        .collect();
    let mut population = Population::new(evaluate_batch(problem, initial, 0)?, n);
    let mut evaluations = n;
    let unique = deduplicate(population.members.clone());
    let mut convergence = update_convergence_archive(&unique, n)?;
    let mut preference = update_preference_archive(&unique, &convergence.members, n, &dirs);

    let mut checkpoint = if trust_mode {
        let scale = current_scale(&convergence.members);
        let ctx = ScoreContext {
            structure: &structure,
            params: &config.checkpoint,
            trust: &config.trust,
            scale: &scale,
        };
        Some(seed_checkpoint(&convergence, &ctx)?)
    } else {
        None
    };

    let mut rows = Vec::new();
    let mut best = objective_best([convergence.members.as_slice()], m);
    let mut generations_run = 0;
    let mut unrecorded: Option<MetricRow> = None;
    for t in 0..config.generations {
        let scale = current_scale(&convergence.members);
        let state = evaluate_trust(t, config.generations, &convergence, &config.trust, &scale)?;
        let controls = if trust_mode {
            derive_controls(state.trust, &config.trust, groups)
        } else {
            SearchControls {
                p_explore: derive_controls(state.phi, &config.trust, groups).p_explore,
                k_active: groups,
                rho: 0.0,
            }
        };
        let ctx = SearchContext {
            population: &population.members,
            convergence: &convergence.members,
            preference: &preference.members,
            capacity: n,
            structure: &structure,
            params: &config.reproduction,
            seeds: &seeds,
            generation: t,
        };
        let sgs = sparse_search_offspring(&ctx, &controls)?;
        let probe = if trust_mode {
            probe_offspring(
                &convergence.members,
                state.trust,
                state.p,
                &controls,
                &structure,
                &config.probe,
                n,
                &seeds,
                t,
            )
        } else {
            Default::default()
        };
        let probes = probe.probes.len();
        let mut candidates = sgs.trials;
        candidates.extend(probe.probes);
        if let Some(cap) = config.max_evaluations {
            if evaluations + candidates.len() > cap {
                info!("evaluation budget of {cap} reached before generation {t}");
                break;
            }
        }
        evaluations += candidates.len();
        let offspring = evaluate_batch(problem, candidates, t + 1)?;

        let mut union = population.members;
        union.extend(offspring);
        union.extend(convergence.members.iter().cloned());
        union.extend(preference.members.iter().cloned());
        let union = deduplicate(union);
        let intermediate = update_convergence_archive(&union, n)?;

        let mut event = CheckpointEvent::None;
        convergence = match checkpoint.take() {
            Some(mut ckpt) => {
                let scale = current_scale(&union);
                let ctx = ScoreContext {
                    structure: &structure,
                    params: &config.checkpoint,
                    trust: &config.trust,
                    scale: &scale,
                };
                // Both archives are scored under the same normalization.
                ckpt.score = archive_score(&ckpt.archive, &ctx)?;
                let (next, kept, ev) = stabilize(intermediate, ckpt, state.p, &ctx)?;
                checkpoint = Some(kept);
                event = ev;
                next
            }
            None => intermediate,
        };
        preference = update_preference_archive(&union, &convergence.members, n, &dirs);
        let mut rebuild_rng = seeds.stream(t as u64, Role::Rebuild, 0);
        population = rebuild_population(&convergence.members, &preference.members, n, &mut rebuild_rng)?;
        generations_run = t + 1;

        let stored: &[Solution] = checkpoint.as_ref().map_or(&[], |c| c.archive.members.as_slice());
        let now = objective_best([convergence.members.as_slice(), stored], m);
        if now.iter().zip(&best).any(|(a, b)| a > b) {
            warn!("generation {t}: best objective values regressed from {best:?} to {now:?}");
        }
        best = now;

        let last = t + 1 == config.generations;
        let snapshot = (config.metric_interval > 0 && t % config.metric_interval == 0) || last;
        let row = MetricRow {
            generation: t,
            evaluations,
            hv: None,
            igd_plus: None,
            trust: state.trust,
            phi: state.phi,
            maturity: state.maturity,
            delta: probe.delta,
            nd_ratio: nd_ratio(&convergence.members),
            event,
        };
        if snapshot {
            rows.push(measured(row, reference.as_ref(), &convergence.members));
        } else if event != CheckpointEvent::None {
            rows.push(row);
        } else {
            unrecorded = Some(row);
        }
        observer(&GenerationReport {
            generation: t,
            state,
            controls,
            active_groups: &sgs.active_groups,
            probes,
            delta: probe.delta,
            event,
            convergence: &convergence.members,
            preference: &preference.members,
            population: &population.members,
            evaluations,
        });
    }
    // A budget stop leaves the last generation without its metrics.
    match rows.last_mut() {
        Some(r) if r.generation + 1 == generations_run => {
            if r.hv.is_none() && r.igd_plus.is_none() {
                *r = measured(r.clone(), reference.as_ref(), &convergence.members);
            }
        }
        _ => {
            if let Some(row) = unrecorded.filter(|r| r.generation + 1 == generations_run) {
                rows.push(measured(row, reference.as_ref(), &convergence.members));
            }
        }
    }
    Ok(RunResult {
        convergence,
        preference,
        population,
        rows,
        evaluations,
        generations_run,
        seconds: started.elapsed().as_secs_f64(),
    })
}
