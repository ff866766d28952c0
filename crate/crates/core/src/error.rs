use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A value that must lie in the positive cone does not. Positive values
    /// are restricted to `[1e-300, 1e300]`.
    #[error("entry {index} = {value} is not a positive finite value in [1e-300, 1e300]")]
    NotPositive { index: usize, value: f64 },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("covariance is singular or near-singular: smallest eigenvalue {min_eigenvalue:e}, largest {max_eigenvalue:e}")]
    SingularCovariance {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("regressor has (near-)zero log-variance {variance:e}; no unique exponent")]
    DegenerateRegressor { variance: f64 },

    #[error("constraint vectors are linearly dependent (mean log-returns are constant across assets)")]
    DependentConstraints,

    #[error("partition is not a refinement of the coarser partition")]
    NotRefinement,

    #[error("process is not adapted: X_{time} is not constant on block {block} of the filtration")]
    NotAdapted { time: usize, block: usize },

    #[error("process is not an l-submartingale (component {component} classified as {classification})")]
    NotSubmartingale {
        component: usize,
        classification: String,
    },

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("quadrature did not converge to relative tolerance {tolerance:e} (estimate {estimate}, error {error_estimate:e})")]
    QuadratureNonConvergence {
        tolerance: f64,
        estimate: f64,
        error_estimate: f64,
    },
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
