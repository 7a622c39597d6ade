use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error(
        "quadrature exceeded its refinement budget: estimate {estimate:e}, error bound {error_bound:e} (tolerance {tolerance:e})"
    )]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        tolerance: f64,
    },

    #[error(
        "controllability Gramian is ill-conditioned at horizon t_f = {horizon} (condition estimate {condition:e})"
    )]
    IllConditioned { horizon: f64, condition: f64 },

    #[error("pair (A, B) is not controllable: controllability matrix has rank {rank}, state dimension {n}")]
    Uncontrollable { rank: usize, n: usize },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors that originate in a numerical routine rather than in user input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::Quadrature { .. } | Error::IllConditioned { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
