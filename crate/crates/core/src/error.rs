use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Every variant maps to a stable machine-readable reason code, which the
/// CLI writes into its reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A quantity left the open branch `Q < π` (or `Q < Θ`) it needs.
    #[error("phase branch violated: {0}")]
    Branch(String),

    #[error("phase branch violated at node {node}: Q = {q}")]
    NodeBranch { node: usize, q: f64 },

    #[error("configuration error [{reason}]: {detail}")]
    Config { reason: &'static str, detail: String },

    #[error("linear solve failed after {iterations} iterations (relative residual {residual:e})")]
    LinearSolve { iterations: usize, residual: f64 },

    #[error("damped step stalled below minimum step {min_step:e}")]
    Stall { min_step: f64 },

    #[error("Newton iteration did not converge in {iterations} steps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(reason: &'static str, detail: impl Into<String>) -> Self {
        Error::Config {
            reason,
            detail: detail.into(),
        }
    }

    /// Stable reason code for reports.
    pub fn reason_code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Branch(_) | Error::NodeBranch { .. } => "branch",
            Error::Config { reason, .. } => reason,
            Error::LinearSolve { .. } => "linear-solve",
            Error::Stall { .. } => "stall",
            Error::NotConverged { .. } => "newton-not-converged",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
