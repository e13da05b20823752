use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("critical state: contour passes within {distance:e} of the origin at u = {u}")]
    CriticalState { u: f64, distance: f64 },

    #[error("winding number not resolved (accumulated {turns} turns)")]
    Unresolved { turns: f64 },

    #[error("solver error: {0}")]
    Solver(String),

    #[error("diffeomorphism condition violated: min(1 + a s') = {0}")]
    Diffeomorphism(f64),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("fixture construction failed: {0}")]
    Fixture(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
