use thiserror::Error;

/// Failures raised while building models or evaluating S-matrices.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaiaError {
    #[error("offsets a[{first}] and a[{second}] coincide ({value})")]
    DuplicateOffset { first: usize, second: usize, value: f64 },

    #[error("parameter `{name}` must be positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("coupled pair ({i}, {j}) has offset gap {gap} >= 2, so it never crosses")]
    RealityViolation { i: usize, j: usize, gap: f64 },

    #[error("zero offset difference in the non-local phase of pair ({i}, {j})")]
    DegenerateOffset { i: usize, j: usize },

    #[error("crossings ({}, {}) and ({}, {}) coincide at t = {time} and share a level", first.0, first.1, second.0, second.1)]
    DegenerateCrossing {
        first: (usize, usize),
        second: (usize, usize),
        time: f64,
    },

    #[error("eigenvalue branches are ambiguous at t = {time} (gap {gap})")]
    BranchTrackingFailure { time: f64, gap: f64 },

    #[error("step limit of {steps} reached at t = {time}")]
    StepLimitExceeded { steps: usize, time: f64 },

    #[error("Hamiltonian is not Hermitian (residual {residual})")]
    NonHermitianInput { residual: f64 },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("({i}, {j}) is not a down/up level pair")]
    InvalidPair { i: usize, j: usize },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl GaiaError {
    /// Stable identifier used in machine-readable error reports.
    pub fn code(&self) -> &'static str {
        match self {
            GaiaError::DuplicateOffset { .. } => "DuplicateOffset",
            GaiaError::NonPositiveParameter { .. } => "NonPositiveParameter",
            GaiaError::RealityViolation { .. } => "RealityViolation",
            GaiaError::DegenerateOffset { .. } => "DegenerateOffset",
            GaiaError::DegenerateCrossing { .. } => "DegenerateCrossing",
            GaiaError::BranchTrackingFailure { .. } => "BranchTrackingFailure",
            GaiaError::StepLimitExceeded { .. } => "StepLimitExceeded",
            GaiaError::NonHermitianInput { .. } => "NonHermitianInput",
            GaiaError::ShapeMismatch { .. } => "ShapeMismatch",
            GaiaError::InvalidPair { .. } => "InvalidPair",
            GaiaError::UnsupportedModel(_) => "UnsupportedModel",
            GaiaError::InvalidConfig(_) => "InvalidConfig",
        }
    }

    /// True for errors caused by the input model rather than by a computation.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            GaiaError::BranchTrackingFailure { .. } | GaiaError::StepLimitExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, GaiaError>;
