use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid coupling distance {0}: distances start at 1")]
    InvalidDistance(usize),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("eigensolver did not converge after {restarts} restarts (worst residual {residual:.3e})")]
    Solver { restarts: usize, residual: f64 },

    #[error("no interior gap minimum in [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("degenerate level: vanishing denominator at site {site}")]
    DegenerateLevel { site: usize },

    #[error("norm drift {drift:.3e} exceeds tolerance {tol:.3e} at t = {t}")]
    NormDrift { drift: f64, tol: f64, t: f64 },

    #[error("propagation failed: {0}")]
    Propagation(String),

    #[error("undefined estimate: {0}")]
    UndefinedEstimate(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 1 for validation problems, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::Domain(_)
            | Error::InvalidDistance(_)
            | Error::LengthMismatch { .. }
            | Error::Unsupported(_)
            | Error::Resource(_) => 1,
            _ => 2,
        }
    }
}
