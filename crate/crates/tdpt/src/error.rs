use tdpt_core::Error as CoreError;

/// Runner errors, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid configuration, missing inputs or unwritable outputs.
    #[error("configuration error: {0}")]
    Config(String),
    /// Resonant or rank-deficient systems.
    #[error("solver error: {0}")]
    Solver(String),
    /// Size, contrast, ellipse or shape estimation failed.
    #[error("estimation error: {0}")]
    Estimation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Estimation(_) => 4,
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{}: {e}", path.display()))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Validation(_) | CoreError::Domain(_) => CliError::Config(msg),
            CoreError::Singularity(_)
            | CoreError::Resonance { .. }
            | CoreError::IllPosed { .. } => CliError::Solver(msg),
            CoreError::Estimation(_) | CoreError::StepFailure(_) => CliError::Estimation(msg),
        }
    }
}
