use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};
use taea_cli::commands::{microgrid, run, stats, sweep};
use taea_cli::{init_threads, io, CliError, Settings};
use taea_core::problems::{generate_scenario, ScenarioParams};

#[derive(Parser)]
#[command(name = "trust-taea", version, about = "Trust-guided two-archive evolutionary optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimization and write metrics, front and manifest.
    Run {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Sweep one parameter over problems and seeds.
    Sweep {
        /// lambda_exp or p_start
        #[arg(long)]
        param: String,
        /// Comma-separated values; defaults to the standard grid for the parameter.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Comma-separated problem names.
        #[arg(long, value_delimiter = ',', default_value = "LSMOP1")]
        problems: Vec<String>,
        /// Number of seeds; runs use seeds 1..=N.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
        /// Skip runs whose directory already holds a manifest with the same settings.
        #[arg(long)]
        resume: bool,
    },
    /// Solve the microgrid day-ahead dispatch problem.
    Microgrid {
        /// Scenario CSV path or synthetic:<seed>.
        #[arg(long)]
        scenario: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "microgrid")]
        out: PathBuf,
    },
    /// Compare two run sets with the rank-sum test.
    Stats {
        a: PathBuf,
        b: PathBuf,
        /// igd_plus or hv
        #[arg(long, default_value = "igd_plus")]
        metric: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Write a synthetic microgrid scenario file.
    Scenario {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 96)]
        periods: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args)]
struct SolverArgs {
    /// key=value configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    gens: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// trust-taea or vanilla-taea
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    p_start: Option<f64>,
    #[arg(long)]
    lambda_exp: Option<f64>,
    #[arg(long)]
    metric_interval: Option<usize>,
    #[arg(long)]
    max_evals: Option<usize>,
    /// Write decision vectors into the front CSV.
    #[arg(long)]
    x_dump: bool,
    /// Extra configuration entry, e.g. --set trust.tau_s=0.15 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl SolverArgs {
    fn apply(&self, s: &mut Settings) -> Result<(), CliError> {
        if let Some(path) = &self.config {
            s.apply_text(&std::fs::read_to_string(path)?)?;
        }
        let flags = [
            ("pop", self.pop.map(|v| v.to_string())),
            ("gens", self.gens.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("algorithm", self.algo.clone()),
            ("probe.p_start", self.p_start.map(|v| v.to_string())),
            ("trust.lambda_exp", self.lambda_exp.map(|v| v.to_string())),
            ("metric_interval", self.metric_interval.map(|v| v.to_string())),
            ("max_evaluations", self.max_evals.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, &v)?;
            }
        }
        if self.x_dump {
            s.x_dump = true;
        }
        for entry in &self.overrides {
            let (k, v) = entry
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got '{entry}'")))?;
            s.set(k, v)?;
        }
        Ok(())
    }
}

fn apply_instance(s: &mut Settings, problem: Option<String>, m: Option<usize>, d: Option<usize>) {
    if let Some(p) = problem {
        s.problem = p;
    }
    if let Some(m) = m {
        s.objectives = m;
    }
    if let Some(d) = d {
        s.variables = d;
    }
}

/// Instance flags win over the config file, like every other flag.
fn resolve(solver: &SolverArgs, instance: impl FnOnce(&mut Settings)) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    solver.apply(&mut s)?;
    instance(&mut s);
    Ok(s)
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { instance, solver, out } => {
            let s = resolve(&solver, |s| apply_instance(s, instance.problem, instance.m, instance.d))?;
            let result = run::execute(&s, &out)?;
            if let Some(last) = result.final_row() {
                println!(
                    "{} generations, {} evaluations, IGD+ {}, HV {}",
                    result.generations_run,
                    result.evaluations,
                    last.igd_plus.map_or("-".into(), |v| format!("{v:.6e}")),
                    last.hv.map_or("-".into(), |v| format!("{v:.6}")),
                );
            }
        }
        Command::Sweep {
            param,
            values,
            problems,
            seeds,
            m,
            d,
            solver,
            out,
            resume,
        } => {
            let param = sweep::SweepParam::parse(&param)?;
            let base = resolve(&solver, |s| apply_instance(s, None, m, d))?;
            let values = if values.is_empty() { param.default_values() } else { values };
            let spec = sweep::SweepSpec {
                param,
                values,
                problems,
                seeds,
                base,
                resume,
            };
            let outcome = sweep::execute_sweep(&spec, &out)?;
            println!("{} runs, {} aggregate rows -> {}", outcome.runs.len(), outcome.aggregate.len(), out.display());
        }
        Command::Microgrid { scenario, solver, out } => {
            let mut s = Settings::default();
            s.run.generations = 1000;
            s.run.max_evaluations = Some(100_000);
            solver.apply(&mut s)?;
            s.scenario = Some(scenario);
            let report = microgrid::execute(&s, &out);
            print_feasibility(&out);
            let report = report?;
            println!(
                "{} front members, {} feasible, schedule from member {}",
                report.front.len(),
                report.feasible,
                report.selected
            );
        }
        Command::Stats { a, b, metric, alpha } => {
            let metric = stats::Metric::parse(&metric)?;
            let sa = stats::load_run_set(&a, metric)?;
            let sb = stats::load_run_set(&b, metric)?;
            let rows = stats::compare(&sa, &sb, metric, alpha)?;
            print!("{}", stats::render_table(&rows));
        }
        Command::Scenario { seed, periods, out } => {
            let s = generate_scenario(&ScenarioParams { periods, ..Default::default() }, seed)?;
            io::write_scenario(&out, &s)?;
            info!(
                "daily load {:.1} kWh, renewable {:.1} kWh -> {}",
                s.total_load(),
                s.total_renewable(),
                out.display()
            );
        }
    }
    Ok(())
}

fn print_feasibility(out: &Path) {
    if let Ok(pairs) = io::read_pairs(&out.join(io::FEASIBILITY_FILE)) {
        for (k, v) in pairs {
            println!("{k}={v}");
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = init_threads().and_then(|_| dispatch(cli.command)) {
        error!("{e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    ExitCode::SUCCESS
}
