use thiserror::Error;

/// Errors raised across the crate.
///
/// The CLI maps [`Error::Usage`], [`Error::Config`] and [`Error::NotFound`] to exit
/// code 2 and everything else to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not found: {0}")]
    NotFound(String),

    #[error("invalid subdivision rule: {0}")]
    InvalidRule(String),

    #[error("resource budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("graph is not strongly connected: stranded component {component:?}")]
    NotStronglyConnected { component: Vec<usize> },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("normalized potential has positive entry {value:e} at node {node}")]
    Positivity { node: usize, value: f64 },

    #[error("maximizing set is empty at tolerance {tol:e}")]
    EmptyMaximizingSet { tol: f64 },

    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
