use thiserror::Error;

use crate::param::LatticeClassification;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {err_estimate:e})")]
    Convergence {
        subdivisions: usize,
        err_estimate: f64,
    },

    /// An infinite product did not reach its tail tolerance within the term budget.
    #[error("product did not converge within {max_terms} terms")]
    NonConvergence { max_terms: usize },

    /// The point is a pole; a finite value was required.
    #[error("pole at requested point ({0})")]
    Pole(LatticeClassification),

    /// Resonant parameter: a closed form divides by zero.
    #[error("degenerate parameter: {0}")]
    Degenerate(String),

    /// Point lies on a branch cut of a multivalued mapping.
    #[error("point lies on the branch cut: {0}")]
    BranchCut(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
