use std::path::Path;

use log::warn;
use taea_core::problems::{MicrogridProblem, ViolationBreakdown};
use taea_core::{ObjectiveScale, Solution};

use crate::commands::run::{execute_with, final_front, load_scenario, MICROGRID};
use crate::config::Settings;
use crate::error::{usage, CliError};
use crate::io;

/// Outcome of a dispatch run: the front and the schedule picked from it.
#[derive(Debug, Clone)]
pub struct DispatchReport {
    pub front: Vec<Solution>,
    pub feasible: usize,
    /// Index into `front` of the reported schedule.
    pub selected: usize,
    pub violations: ViolationBreakdown,
}

/// Feasible member with the smallest normalized objective norm, or `None`
/// when nothing is feasible.
pub fn knee_point(front: &[Solution]) -> Option<usize> {
    let feasible: Vec<usize> = (0..front.len()).filter(|&i| front[i].is_feasible()).collect();
    let scale = ObjectiveScale::from_points(feasible.iter().map(|&i| front[i].f.as_slice()))?;
    let norm = |i: usize| scale.normalize(&front[i].f).iter().map(|v| v * v).sum::<f64>();
    feasible
        .into_iter()
        .min_by(|&a, &b| norm(a).total_cmp(&norm(b)).then(a.cmp(&b)))
}

/// Solves the dispatch problem and writes run files plus the selected
/// schedule and its feasibility report. Returns [`CliError::Infeasible`]
/// after writing everything when no feasible solution was found.
pub fn execute(settings: &Settings, out: &Path) -> Result<DispatchReport, CliError> {
    let source = settings
        .scenario
        .as_deref()
        .ok_or_else(|| usage("--scenario is required"))?;
    let problem = MicrogridProblem::new(load_scenario(source)?)?;
    let mut settings = settings.clone();
    settings.problem = MICROGRID.into();
    settings.objectives = 3;
    settings.variables = taea_core::Problem::dim(&problem);
    let result = execute_with(&settings, &problem, out)?;

    let front = final_front(&result);
    let feasible = front.iter().filter(|s| s.is_feasible()).count();
    let selected = knee_point(&front).unwrap_or_else(|| {
        (0..front.len())
            .min_by(|&a, &b| front[a].violation.total_cmp(&front[b].violation))
            .expect("nonempty front")
    });
    let dispatch = problem.decode(&front[selected].x)?;
    let violations = problem.violations_of(&dispatch);
    io::write_schedule(&out.join(io::SCHEDULE_FILE), &io::schedule_rows(&dispatch))?;

    let s = problem.scenario();
    let terminal_gap = (dispatch.soc.last().copied().unwrap_or(s.soc_initial) - s.soc_initial).abs();
    let mut pairs: Vec<(String, String)> = vec![
        ("front_size".into(), front.len().to_string()),
        ("feasible_solutions".into(), feasible.to_string()),
        ("selected".into(), selected.to_string()),
        ("selected_feasible".into(), front[selected].is_feasible().to_string()),
    ];
    for (k, f) in front[selected].f.iter().enumerate() {
        pairs.push((format!("f{}", k + 1), f.to_string()));
    }
    for (name, v) in violations.entries() {
        pairs.push((name.into(), v.to_string()));
    }
    pairs.push(("total".into(), violations.total().to_string()));
    pairs.push(("terminal_soc_gap".into(), terminal_gap.to_string()));
    pairs.push(("soc_tolerance".into(), s.soc_tolerance.to_string()));
    io::write_pairs(&out.join(io::FEASIBILITY_FILE), &pairs)?;

    let report = DispatchReport {
        front,
        feasible,
        selected,
        violations,
    };
    if feasible == 0 {
        warn!("no feasible dispatch found; reporting the least-violating schedule");
        return Err(CliError::Infeasible(format!(
            "least total violation {}",
            violations.total()
        )));
    }
    Ok(report)
}
