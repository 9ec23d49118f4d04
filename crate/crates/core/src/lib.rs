//! Trustworthiness-guided two-archive evolutionary optimization for
//! large-scale multi-objective problems.
//!
//! A run keeps a convergence archive and a preference archive. Each
//! generation measures how trustworthy the convergence archive is (progress
//! times maturity) and uses that signal to steer a grouped sparse search,
//! late-stage anchor probes and checkpoint-based archive stabilization.
//!
//! ```no_run
//! use taea_core::{engine, problems};
//!
//! let problem = problems::benchmark("LSMOP1", 2, 500)?;
//! let result = engine::run(&engine::RunConfig::default(), &problem)?;
//! println!("{:?}", result.final_row());
//! # Ok::<(), taea_core::Error>(())
//! ```

pub mod anchor_probe;
pub mod checkpoint;
pub mod directions;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod pareto;
pub mod problems;
pub mod rng;
pub mod solution;
pub mod sparse_search;
pub mod structure;
pub mod trust;

pub use anchor_probe::{ProbeParams, ProbeRepair};
pub use checkpoint::{CheckpointEvent, CheckpointParams};
pub use engine::{run, run_with_observer, Algorithm, MetricRow, RunConfig, RunResult};
pub use error::{Error, Result};
pub use pareto::ObjectiveScale;
pub use problems::Problem;
pub use rng::SeedTree;
pub use solution::{Bounds, Population, Solution};
pub use sparse_search::ReproductionParams;
pub use structure::VariableStructure;
pub use trust::{SearchControls, TrustParams};
