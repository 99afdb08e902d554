use gaia_core::GaiaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error(transparent)]
    Gaia(#[from] GaiaError),
    #[error("cannot write output: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    /// Output was written but some rows failed.
    #[error("{failed} of {total} rows failed: {first}")]
    PartialFailure { failed: usize, total: usize, first: GaiaError },
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } => 1,
            CliError::Gaia(e) if e.is_validation() => 2,
            _ => 3,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Read { .. } => "Read",
            CliError::Gaia(e) => e.code(),
            CliError::Csv(_) | CliError::Io(_) => "Write",
            CliError::PartialFailure { first, .. } => first.code(),
            CliError::ChecksFailed { .. } => "CheckFailed",
        }
    }

    /// One-line JSON record for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.code(), "message": self.to_string(), "exit": self.exit_code() }).to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
