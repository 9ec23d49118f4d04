//! Experiment harness around `taea-core`: configuration files, run outputs,
//! parameter sweeps, rank-sum statistics and the microgrid dispatch workflow.
//!
//! The `trust-taea` binary is a thin argument layer over [`commands`].

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use config::Settings;
pub use error::CliError;

/// Environment variable capping worker threads; `0` or unset leaves the default.
pub const THREADS_ENV: &str = "TRUST_TAEA_THREADS";

/// Applies [`THREADS_ENV`] to the global thread pool. Call once, before any work.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a nonnegative integer, got '{raw}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}
