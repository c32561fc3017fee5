use thiserror::Error;

pub type Result<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("body left the workspace bounds at step {step}")]
    Diverged { step: usize },
    #[error("teacher made no progress for more than {seconds} s (at t = {t:.3} s)")]
    TeacherStuck { t: f64, seconds: f64 },
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Core(#[from] compliant_core::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
