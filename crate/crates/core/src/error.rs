//! Crate-wide error type and result alias.

use thiserror::Error;

/// Errors produced by analysis, simulation, and I/O paths.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix/vector dimensions incompatible with the requested operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An iterative solver exhausted its sweep budget.
    #[error("eigenvalue iteration did not converge: residual {residual:.3e} after {sweeps} sweeps")]
    NonConvergence { residual: f64, sweeps: usize },

    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Agent is not passifiable (assumption A1 violated).
    #[error("A1 violated: {0}")]
    Passifiability(String),

    /// Digraph has no directed spanning tree (assumption A2 violated).
    #[error("A2 violated: {0}")]
    Topology(String),

    /// Zero eigenvalue of a Laplace-type matrix is not simple.
    #[error("zero eigenvalue is not simple (multiplicity {0})")]
    Multiplicity(usize),

    /// Argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bisection bracket does not straddle a verdict flip.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// Simulation state exceeded the overflow guard.
    #[error("divergence: state norm exceeded {guard:.1e} at t = {t:.6} s")]
    Diverged { t: f64, guard: f64 },

    /// Network file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code convention: 1 usage/parse, 2 assumption violation,
    /// 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::InvalidInput(_) | Error::Io(_) => 1,
            Error::Passifiability(_) | Error::Topology(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
