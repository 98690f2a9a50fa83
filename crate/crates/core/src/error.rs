use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context} at line {line}, column {column}: {message}")]
    Parse { context: String, line: usize, column: usize, message: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("no road path from vertex {from} to vertex {to}")]
    Unreachable { from: usize, to: usize },

    #[error("vertex {0} is not a distance source")]
    NotASource(usize),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("backend {backend} failed (budget {budget_s}s): {reason}")]
    Backend { backend: String, budget_s: f64, reason: String },

    #[error("invalid solver output: {0}")]
    InvalidSolverOutput(String),

    #[error("horizon T={given} too small; at least {required} required")]
    HorizonTooSmall { given: usize, required: usize },

    #[error("brute force caps exceeded: {0}")]
    CapsExceeded(String),

    #[error("{phase}: {source}")]
    Phase {
        phase: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("solution failed validation with {} finding(s)", .0.len())]
    Validation(Vec<String>),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn in_phase(self, phase: &'static str) -> Self {
        Error::Phase { phase, source: Box::new(self) }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
