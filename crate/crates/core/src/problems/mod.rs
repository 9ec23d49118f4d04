//! Optimization problems: the LSMOP benchmark suite and a microgrid
//! day-ahead dispatch model.

mod lsmop;
mod microgrid;

pub use lsmop::{Lsmop, LsmopTargets};
pub use microgrid::{
    generate_scenario, Dispatch, MicrogridProblem, MicrogridScenario, ScenarioParams, ViolationBreakdown,
};

use crate::error::{usage, Result};
use crate::solution::Bounds;
use crate::structure::VariableStructure;

/// A box-bounded multi-objective minimization problem.
pub trait Problem: Send + Sync {
    fn name(&self) -> String;

    fn objectives(&self) -> usize;

    fn bounds(&self) -> &Bounds;

    fn dim(&self) -> usize {
        self.bounds().dim()
    }

    /// Objective vector and total constraint violation of `x`.
    fn evaluate(&self, x: &[f64]) -> (Vec<f64>, f64);

    /// Front/convergence variable split with the problem's target provider.
    fn structure(&self) -> VariableStructure;

    /// Points on the analytic Pareto front, when one is known.
    fn front_sample(&self, _n: usize) -> Option<Vec<Vec<f64>>> {
        None
    }
}

/// Looks up a benchmark by name, e.g. `LSMOP3` (case-insensitive).
pub fn benchmark(name: &str, m: usize, d: usize) -> Result<Lsmop> {
    let upper = name.to_ascii_uppercase();
    let id = upper
        .strip_prefix("LSMOP")
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| usage(format!("unknown problem '{name}'")))?;
    Lsmop::new(id, m, d)
}
