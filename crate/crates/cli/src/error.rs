use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] taea_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed file {path}: {detail}")]
    Format { path: String, detail: String },
    /// The run finished but produced no feasible solution.
    #[error("no feasible solution: {0}")]
    Infeasible(String),
}

impl CliError {
    /// Process exit status: 2 for usage and configuration problems, 3 for an
    /// infeasible result, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::Core(taea_core::Error::Usage(_))
            | CliError::Core(taea_core::Error::Config(_)) => 2,
            CliError::Infeasible(_) => 3,
            _ => 1,
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub(crate) fn format_error(path: &std::path::Path, detail: impl Into<String>) -> CliError {
    CliError::Format {
        path: path.display().to_string(),
        detail: detail.into(),
    }
}
