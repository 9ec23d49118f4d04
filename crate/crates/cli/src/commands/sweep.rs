use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::commands::run::{execute, read_manifest};
use crate::config::{parse_pairs, Settings};
use crate::error::{format_error, usage, CliError};
use crate::io::MANIFEST_FILE;

pub const RUNS_FILE: &str = "runs.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    LambdaExp,
    PStart,
}

impl SweepParam {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "lambda_exp" => Ok(SweepParam::LambdaExp),
            "p_start" => Ok(SweepParam::PStart),
            _ => Err(usage(format!("unknown sweep parameter '{s}' (expected lambda_exp or p_start)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::LambdaExp => "lambda_exp",
            SweepParam::PStart => "p_start",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            SweepParam::LambdaExp => "trust.lambda_exp",
            SweepParam::PStart => "probe.p_start",
        }
    }

    /// Values swept when none are given; both include the default setting.
    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepParam::LambdaExp => vec![0.75, 1.0, 1.25],
            SweepParam::PStart => vec![0.05, 0.12, 0.30],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub problems: Vec<String>,
    /// Runs use seeds `1..=seeds`.
    pub seeds: u64,
    pub base: Settings,
    /// Reuse a run directory whose manifest records the same configuration.
    pub resume: bool,
}

/// Final metrics of one sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub value: f64,
    pub problem: String,
    pub seed: u64,
    pub igd_plus: Option<f64>,
    pub hv: Option<f64>,
    pub evaluations: usize,
    pub dir: PathBuf,
}

/// Mean, sample standard deviation and median of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
        Some(Self { mean, std, median })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub value: f64,
    pub problem: String,
    pub runs: usize,
    pub igd_plus: Option<Summary>,
    pub hv: Option<Summary>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub runs: Vec<RunRecord>,
    pub aggregate: Vec<AggregateRow>,
}

pub fn run_dir(out: &Path, param: SweepParam, value: f64, problem: &str, seed: u64) -> PathBuf {
    out.join("runs")
        .join(format!("{}-{}={}-seed{}", problem, param.name(), value, seed))
}

/// Runs the full (value x problem x seed) grid. Results are ordered by the
/// grid position regardless of completion order.
pub fn execute_sweep(spec: &SweepSpec, out: &Path) -> Result<SweepOutcome, CliError> {
    if spec.values.is_empty() || spec.problems.is_empty() || spec.seeds == 0 {
        return Err(usage("a sweep needs at least one value, problem and seed"));
    }
    let mut jobs = Vec::new();
    for &value in &spec.values {
        for problem in &spec.problems {
            for seed in 1..=spec.seeds {
                let mut s = spec.base.clone();
                s.problem = problem.clone();
                s.run.seed = seed;
                s.set(spec.param.key(), &value.to_string())?;
                jobs.push((value, seed, s));
            }
        }
    }
    let runs: Vec<RunRecord> = jobs
        .into_par_iter()
        .map(|(value, seed, s)| {
            let dir = run_dir(out, spec.param, value, &s.problem, seed);
            if spec.resume {
                if let Some(record) = recorded_run(&s, &dir)? {
                    return Ok(RunRecord { value, seed, ..record });
                }
            }
            let result = execute(&s, &dir)?;
            let last = result.final_row();
            Ok(RunRecord {
                value,
                problem: s.problem.clone(),
                seed,
                igd_plus: last.and_then(|r| r.igd_plus),
                hv: last.and_then(|r| r.hv),
                evaluations: result.evaluations,
                dir,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let mut aggregate = Vec::new();
    for &value in &spec.values {
        for problem in &spec.problems {
            let cell: Vec<&RunRecord> = runs
                .iter()
                .filter(|r| r.value == value && &r.problem == problem)
                .collect();
            let collect = |get: fn(&RunRecord) -> Option<f64>| -> Vec<f64> { cell.iter().filter_map(|r| get(r)).collect() };
            aggregate.push(AggregateRow {
                value,
                problem: problem.clone(),
                runs: cell.len(),
                igd_plus: Summary::of(&collect(|r| r.igd_plus)),
                hv: Summary::of(&collect(|r| r.hv)),
            });
        }
    }
    write_runs(&out.join(RUNS_FILE), spec.param, &runs, out)?;
    write_aggregate(&out.join(AGGREGATE_FILE), spec.param, &aggregate)?;
    Ok(SweepOutcome { runs, aggregate })
}

/// Final metrics stored in `dir` when its manifest matches `settings`.
fn recorded_run(settings: &Settings, dir: &Path) -> Result<Option<RunRecord>, CliError> {
    let path = dir.join(MANIFEST_FILE);
    if !path.is_file() || read_manifest(&path)?.config_hash() != settings.config_hash() {
        return Ok(None);
    }
    let pairs = parse_pairs(&std::fs::read_to_string(&path)?)?;
    let get = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let metric = |key: &str| -> Result<Option<f64>, CliError> {
        match get(key) {
            None | Some("") => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| format_error(&path, format!("invalid {key}"))),
        }
    };
    let evaluations = get("result.evaluations")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format_error(&path, "missing result.evaluations"))?;
    Ok(Some(RunRecord {
        value: 0.0,
        problem: settings.problem.clone(),
        seed: settings.run.seed,
        igd_plus: metric("result.igd_plus")?,
        hv: metric("result.hv")?,
        evaluations,
        dir: dir.to_path_buf(),
    }))
}

fn opt_text(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn write_runs(path: &Path, param: SweepParam, runs: &[RunRecord], out: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["param", "value", "problem", "seed", "igd_plus", "hv", "evaluations", "dir"])?;
    for r in runs {
        let rel = r.dir.strip_prefix(out).unwrap_or(&r.dir);
        w.write_record([
            param.name().to_string(),
            r.value.to_string(),
            r.problem.clone(),
            r.seed.to_string(),
            opt_text(r.igd_plus),
            opt_text(r.hv),
            r.evaluations.to_string(),
            rel.display().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const AGGREGATE_HEADER: [&str; 11] = [
    "param",
    "value",
    "problem",
    "runs",
    "igd_plus_mean",
    "igd_plus_std",
    "igd_plus_median",
    "hv_mean",
    "hv_std",
    "hv_median",
    "cell",
];

fn write_aggregate(path: &Path, param: SweepParam, rows: &[AggregateRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(AGGREGATE_HEADER)?;
    for r in rows {
        let parts = |s: Option<Summary>| match s {
            Some(s) => [s.mean.to_string(), s.std.to_string(), s.median.to_string()],
            None => Default::default(),
        };
        let [im, is, imed] = parts(r.igd_plus);
        let [hm, hs, hmed] = parts(r.hv);
        let cell = match r.igd_plus {
            Some(s) => format!("{:.4e}({:.2e})", s.mean, s.std),
            None => String::new(),
        };
        w.write_record([
            param.name().to_string(),
            r.value.to_string(),
            r.problem.clone(),
            r.runs.to_string(),
            im,
            is,
            imed,
            hm,
            hs,
            hmed,
            cell,
        ])?;
    }
    w.flush()?;
    Ok(())
}
