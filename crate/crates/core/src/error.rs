use thiserror::Error;

/// Errors raised by the model, the verification engine and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the model (non-positive temperature, density, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A tensor or vector failed a structural validation (symmetry, trace, length).
    #[error("validation error: {0}")]
    Validation(String),

    /// Newton inversion from conserved to main-field variables failed.
    #[error("inversion failed in cell {cell:?} after {iterations} iterations (residual {residual:.3e}): {reason}")]
    Inversion {
        cell: Option<usize>,
        iterations: usize,
        residual: f64,
        reason: String,
    },

    /// A dense linear-algebra kernel failed (Cholesky breakdown, non-convergence).
    #[error("numerical error: {0}")]
    Numeric(String),

    /// An operation was called on an input outside its stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A structural property required as a precondition does not hold.
    #[error("structural error: {0}")]
    Structural(String),

    /// Invalid run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// The time integration produced an invalid state.
    #[error("solver aborted at t = {time:.6e}: {reason}")]
    Abort { time: f64, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Attach a cell index to an inversion failure.
    pub fn in_cell(self, index: usize) -> Self {
        match self {
            Error::Inversion {
                iterations,
                residual,
                reason,
                ..
            } => Error::Inversion {
                cell: Some(index),
                iterations,
                residual,
                reason,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
