use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, solver or problem configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Caller passed inconsistent arguments (length mismatch, unknown kind, ...).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("singular cyclic tridiagonal system: pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    #[error(
        "fixed-point iteration did not converge after {iters} sweeps (last update {residual:e})"
    )]
    NoConvergence { iters: usize, residual: f64 },

    #[error("fixed-point iteration diverged (non-finite iterate) after {iters} sweeps")]
    Divergence { iters: usize },

    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    /// A quantity that is real (or imaginary) by construction was not.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("problem `{0}` has no exact solution")]
    MissingExact(String),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }

    /// The innermost error, unwrapping step context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            other => other,
        }
    }
}
