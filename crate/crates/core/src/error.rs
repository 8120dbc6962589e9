use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no evaluation method reached tolerance {tol:e}; best bound {best_bound:e}")]
    NonConvergence { tol: f64, best_bound: f64 },

    #[error("asymptotic expansion not valid at x = {x} with {n_terms} terms")]
    AsymptoticRegime { x: f64, n_terms: usize },

    #[error("eigenvalue positivity violated: lambda_1 = {lambda_1}")]
    PositivityViolation { lambda_1: f64 },

    #[error("eigen-solver failed to converge for eigenvalue {index}")]
    ConvergenceFailure { index: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate mode k = {k}: |delta| = {delta:e}")]
    DegenerateMode { k: usize, delta: f64 },

    #[error("problem is infeasible: orthogonality violated for modes {:?}", .violations.iter().map(|v| v.0).collect::<Vec<_>>())]
    Infeasible { violations: Vec<(usize, f64)> },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
