use std::fs;
use std::path::Path;

use log::info;
use taea_core::pareto::nondominated_indices;
use taea_core::problems::{benchmark, generate_scenario, MicrogridProblem, MicrogridScenario, ScenarioParams};
use taea_core::{run, Problem, RunResult, Solution};

use crate::config::Settings;
use crate::error::{usage, CliError};
use crate::io::{self, FrontTable};

pub const MICROGRID: &str = "MICROGRID";

/// Resolves `synthetic:<seed>` or a scenario CSV path.
pub fn load_scenario(source: &str) -> Result<MicrogridScenario, CliError> {
    match source.strip_prefix("synthetic:") {
        Some(seed) => {
            let seed = seed
                .parse()
                .map_err(|_| usage(format!("invalid synthetic scenario seed '{seed}'")))?;
            Ok(generate_scenario(&ScenarioParams::default(), seed)?)
        }
        None => io::read_scenario(Path::new(source)),
    }
}

pub fn build_problem(settings: &Settings) -> Result<Box<dyn Problem>, CliError> {
    if settings.problem.eq_ignore_ascii_case(MICROGRID) {
        let source = settings
            .scenario
            .as_deref()
            .ok_or_else(|| usage("the microgrid problem needs a scenario"))?;
        return Ok(Box::new(MicrogridProblem::new(load_scenario(source)?)?));
    }
    Ok(Box::new(benchmark(&settings.problem, settings.objectives, settings.variables)?))
}

/// Nondominated members of the convergence archive.
pub fn final_front(result: &RunResult) -> Vec<Solution> {
    let members = &result.convergence.members;
    nondominated_indices(members)
        .into_iter()
        .map(|i| members[i].clone())
        .collect()
}

/// Runs `problem` with `settings` and writes metrics, the final convergence
/// archive and the manifest to `out`.
pub fn execute_with(settings: &Settings, problem: &dyn Problem, out: &Path) -> Result<RunResult, CliError> {
    let result = run(&settings.run, problem)?;
    fs::create_dir_all(out)?;
    io::write_metrics(&out.join(io::METRICS_FILE), &result.rows)?;
    io::write_front(
        &out.join(io::FRONT_FILE),
        &FrontTable::from_solutions(&result.convergence.members, settings.x_dump),
    )?;
    write_manifest(&out.join(io::MANIFEST_FILE), settings, &result)?;
    info!(
        "{} seed {}: {} evaluations in {:.1}s -> {}",
        settings.problem,
        settings.run.seed,
        result.evaluations,
        result.seconds,
        out.display()
    );
    Ok(result)
}

pub fn execute(settings: &Settings, out: &Path) -> Result<RunResult, CliError> {
    let problem = build_problem(settings)?;
    execute_with(settings, problem.as_ref(), out)
}

pub fn write_manifest(path: &Path, settings: &Settings, result: &RunResult) -> Result<(), CliError> {
    let mut pairs: Vec<(String, String)> = settings
        .entries()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    pairs.push(("config_hash".into(), settings.config_hash()));
    let last = result.final_row();
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    pairs.extend([
        ("result.evaluations".into(), result.evaluations.to_string()),
        ("result.generations".into(), result.generations_run.to_string()),
        ("result.front_size".into(), final_front(result).len().to_string()),
        ("result.igd_plus".into(), opt(last.and_then(|r| r.igd_plus))),
        ("result.hv".into(), opt(last.and_then(|r| r.hv))),
        ("result.seconds".into(), format!("{:.3}", result.seconds)),
    ]);
    io::write_pairs(path, &pairs)
}

/// Settings recorded in a manifest, checked against its stored hash.
pub fn read_manifest(path: &Path) -> Result<Settings, CliError> {
    let text = fs::read_to_string(path)?;
    let settings = Settings::from_text(&text)?;
    let stored = crate::config::parse_pairs(&text)?
        .into_iter()
        .find(|(k, _)| k == "config_hash")
        .map(|(_, v)| v);
    if let Some(hash) = stored {
        if hash != settings.config_hash() {
            return Err(crate::error::format_error(path, "config_hash does not match the recorded settings"));
        }
    }
    Ok(settings)
}
