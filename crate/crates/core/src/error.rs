use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value {value} at node {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("point `{which}` lies outside the effective domain of `{energy}`")]
    OutsideDomain { which: String, energy: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Moreau-Yosida quotients did not converge after {} refinements (last quotients: {history:?})", history.len())]
    SlopeNotConverged { history: Vec<f64> },

    #[error("proximal iteration stalled after {} iterations (last residuals: {residuals:?})", residuals.len())]
    ProxNotConverged { residuals: Vec<f64> },

    #[error("certified inclusion violated by {violation:e} at probe `{probe}`")]
    InclusionViolated { violation: f64, probe: String },

    #[error("infeasible constraint witness: {0}")]
    Infeasible(String),

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("KL fit unreliable: {0}")]
    FitUnreliable(String),

    #[error("tail window holds {have} recorded states, need at least {need}")]
    TailTooShort { have: usize, need: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Last refinement history of a stalled quotient ladder, if any.
    pub fn quotient_history(&self) -> Option<&[f64]> {
        match self {
            Error::SlopeNotConverged { history } => Some(history),
            _ => None,
        }
    }
}
