use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the range where the formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The constrained subspace requested for sampling has dimension zero.
    #[error("constrained subspace is zero for n={n}, k={k}, bundle={bundle}")]
    ZeroSubspace { n: usize, k: usize, bundle: String },

    /// A component polynomial is not annihilated by the Laplacian.
    #[error("component {component} is not harmonic")]
    NotHarmonic { component: String },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Power iteration or another iterative routine ran out of iterations.
    #[error("no convergence after {iterations} iterations")]
    NotConverged { iterations: usize },

    /// A field fails the degree-drop condition an identity requires.
    #[error("constraint violated: {what} has harmonic degree {degree}")]
    ConstraintViolated { what: String, degree: usize },

    /// Monte-Carlo standard error stayed above the requested tolerance.
    #[error("Monte-Carlo standard error {stderr:e} exceeds tolerance {tolerance:e} after {samples} samples")]
    MonteCarlo { stderr: f64, tolerance: f64, samples: usize },

    /// A random draw produced a (numerically) degenerate frame too often.
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
