use thiserror::Error;

/// Errors raised across the geometry, dynamics and coordinate layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("point is not on both circles (residual {residual:.3e})")]
    NotOnCircle { residual: f64 },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("forge did not converge after {iterations} iterations (residual {residual:.3e})")]
    ForgeFailed { iterations: usize, residual: f64 },

    #[error("forge converged to a degenerate pattern: {0}")]
    ForgeDegenerate(String),

    #[error("degenerate mutation{}: {reason}", time.map(|t| format!(" at t={t}")).unwrap_or_default())]
    DegenerateMutation { time: Option<i64>, reason: String },

    #[error("condition violated: {label} (residual {residual:.3e})")]
    ConditionViolation { label: String, residual: f64 },

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("non-generic pattern: {0}")]
    NonGeneric(String),

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("point is off the equilateral hyperbola (residual {residual:.3e})")]
    NotOnHyperbola { residual: f64 },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("inconsistent pattern: {0}")]
    InconsistentPattern(String),

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
