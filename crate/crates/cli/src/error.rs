use std::fmt;
use std::path::PathBuf;

use ringfactor_core::Error as CoreError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const SOLVER: i32 = 4;
}

/// Every problem found in a configuration file, not just the first.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for e in &self.0 {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigErrors),

    #[error("{context}: {source}")]
    Core { context: String, source: CoreError },

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn core(context: impl Into<String>, source: CoreError) -> Self {
        CliError::Core { context: context.into(), source }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::VALIDATION,
            CliError::NotConverged(_) => exit::SOLVER,
            CliError::Core { source, .. } => match source {
                CoreError::InvalidOrder(_)
                | CoreError::InvalidRing(_)
                | CoreError::InvalidHalfGap { .. }
                | CoreError::InvalidMass(_)
                | CoreError::Collision(_)
                | CoreError::InvalidPotential(_)
                | CoreError::InvalidIndex(_)
                | CoreError::NotSymmetric(_) => exit::VALIDATION,
                CoreError::SolverStalled(_) => exit::SOLVER,
                _ => exit::NUMERICAL,
            },
            // Unreadable inputs and unwritable output paths are usage errors.
            CliError::Io { .. } => exit::VALIDATION,
            CliError::Output(_) => exit::NUMERICAL,
        }
    }
}
