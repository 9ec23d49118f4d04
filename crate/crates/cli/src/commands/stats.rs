use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use taea_core::metrics::{wilcoxon_rank_sum, Verdict};

use crate::commands::run::read_manifest;
use crate::error::{usage, CliError};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    IgdPlus,
    Hv,
}

impl Metric {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "igd_plus" | "igd+" => Ok(Metric::IgdPlus),
            "hv" => Ok(Metric::Hv),
            _ => Err(usage(format!("unknown metric '{s}' (expected igd_plus or hv)"))),
        }
    }

    pub fn lower_is_better(self) -> bool {
        matches!(self, Metric::IgdPlus)
    }
}

/// Final metric value of every run below `dir`, keyed by problem instance.
pub fn load_run_set(dir: &Path, metric: Metric) -> Result<BTreeMap<String, Vec<f64>>, CliError> {
    let mut run_dirs = Vec::new();
    collect_run_dirs(dir, &mut run_dirs)?;
    if run_dirs.is_empty() {
        return Err(usage(format!("no runs found under {}", dir.display())));
    }
    run_dirs.sort();
    let mut cells: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for run in run_dirs {
        let settings = read_manifest(&run.join(io::MANIFEST_FILE))?;
        let rows = io::read_metrics(&run.join(io::METRICS_FILE))?;
        let last = rows
            .last()
            .ok_or_else(|| usage(format!("empty metrics in {}", run.display())))?;
        let value = match metric {
            Metric::IgdPlus => last.igd_plus,
            Metric::Hv => last.hv,
        }
        .ok_or_else(|| usage(format!("final row of {} has no value for the metric", run.display())))?;
        let key = format!("{} M={} D={}", settings.problem, settings.objectives, settings.variables);
        cells.entry(key).or_default().push(value);
    }
    Ok(cells)
}

fn collect_run_dirs(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    if dir.join(io::MANIFEST_FILE).is_file() && dir.join(io::METRICS_FILE).is_file() {
        out.push(dir.to_path_buf());
        return Ok(());
    }
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_run_dirs(&path, out)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub cell: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub p_value: f64,
    pub verdict: Verdict,
}

/// Rank-sum comparison of every problem instance; `+` means set A is better.
pub fn compare(
    a: &BTreeMap<String, Vec<f64>>,
    b: &BTreeMap<String, Vec<f64>>,
    metric: Metric,
    alpha: f64,
) -> Result<Vec<ComparisonRow>, CliError> {
    if a.keys().ne(b.keys()) {
        let only_a: Vec<&String> = a.keys().filter(|k| !b.contains_key(*k)).collect();
        let only_b: Vec<&String> = b.keys().filter(|k| !a.contains_key(*k)).collect();
        return Err(usage(format!(
            "run sets cover different problems (only in A: {only_a:?}, only in B: {only_b:?})"
        )));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    a.iter()
        .map(|(cell, xs)| {
            let ys = &b[cell];
            let test = wilcoxon_rank_sum(xs, ys, alpha, metric.lower_is_better())?;
            Ok(ComparisonRow {
                cell: cell.clone(),
                mean_a: mean(xs),
                mean_b: mean(ys),
                p_value: test.p_value,
                verdict: test.verdict,
            })
        })
        .collect()
}

/// Counts of `+`, `-` and `≈` verdicts.
pub fn verdict_counts(rows: &[ComparisonRow]) -> (usize, usize, usize) {
    let count = |v: Verdict| rows.iter().filter(|r| r.verdict == v).count();
    (count(Verdict::Plus), count(Verdict::Minus), count(Verdict::Approx))
}

pub fn render_table(rows: &[ComparisonRow]) -> String {
    let width = rows.iter().map(|r| r.cell.len()).max().unwrap_or(0).max(7);
    let mut s = String::new();
    let _ = writeln!(s, "{:<width$}  {:>12}  {:>12}  {:>10}  verdict", "problem", "mean A", "mean B", "p");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<width$}  {:>12.4e}  {:>12.4e}  {:>10.4}  {}",
            r.cell,
            r.mean_a,
            r.mean_b,
            r.p_value,
            r.verdict.symbol()
        );
    }
    let (plus, minus, approx) = verdict_counts(rows);
    let _ = writeln!(s, "{:<width$}  {plus}/{minus}/{approx}", "+/-/≈");
    s
}
