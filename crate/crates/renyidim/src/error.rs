use thiserror::Error;

/// Errors produced by measure construction, evaluation, and estimation.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation
    /// (e.g. `q <= 0`, `q == 1`, a weight outside `[0, 1]`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested resolution exceeds what the constructed object supports.
    #[error("depth error: requested {requested}, available {available}")]
    Depth { requested: usize, available: usize },

    /// The operation would exceed a configured work or memory cap.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A guard that keeps discretization error subdominant was violated.
    #[error("precision guard: {0}")]
    Precision(String),

    /// The input table lacks rows the estimator needs.
    #[error("missing rows: {0}")]
    MissingRows(String),

    /// Not enough usable data points for the estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Adaptive quadrature failed to stabilize within its refinement cap.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// A mathematical invariant that should hold by construction was
    /// observed to fail; signals a bug upstream, not a user error.
    #[error("invariant failure: {0}")]
    Invariant(String),

    /// A config or descriptor file failed to parse.
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
