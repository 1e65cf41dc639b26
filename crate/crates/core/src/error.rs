//! Crate-wide error type.

use core::fmt;

/// Errors produced by the numerical kernels and physics routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Parameter record violates an invariant (message names the field).
    InvalidParams(&'static str),
    /// Adaptive quadrature ran out of panels before reaching the requested
    /// tolerance. Carries the best estimate and its error bound.
    NonConvergence { estimate: f64, error: f64 },
    /// Neither the eigendecomposition nor the rational-approximation path
    /// produced a usable factorisation.
    SingularDecomposition,
    /// A probability left `[0, 1]` by more than the configured tolerance,
    /// signalling a quadrature failure upstream.
    OutOfRange { value: f64, tolerance: f64 },
    /// Two-outcome Fisher information requested at `p in {0, 1}` with a
    /// nonzero derivative; the information is formally infinite.
    DegenerateDistribution { p1: f64 },
    /// Input matrix is not a valid (Hermitian, PSD, unit-trace) state or
    /// its derivative is not Hermitian traceless.
    NotAState(&'static str),
    /// Wick reconstruction produced a negative eigenvalue beyond tolerance,
    /// signalling an inconsistent correlation matrix.
    NotPsd { min_eigenvalue: f64 },
    /// Scalar optimisation found no structure: the objective varies by less
    /// than the flatness tolerance over the scan grid.
    FlatObjective,
    /// The short-time expansion depends on the regularisation window at a
    /// level that makes the value meaningless.
    DivergentExpansion { sensitivity: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::NonConvergence { estimate, error } => write!(
                f,
                "quadrature did not converge: estimate {estimate:e} with error bound {error:e}"
            ),
            Error::SingularDecomposition => write!(f, "matrix decomposition failed"),
            Error::OutOfRange { value, tolerance } => write!(
                f,
                "probability {value} escapes [0,1] beyond tolerance {tolerance:e}"
            ),
            Error::DegenerateDistribution { p1 } => write!(
                f,
                "Fisher information diverges: p1 = {p1} with nonzero temperature derivative"
            ),
            Error::NotAState(msg) => write!(f, "not a valid state: {msg}"),
            Error::NotPsd { min_eigenvalue } => write!(
                f,
                "reconstructed state not positive semi-definite (min eigenvalue {min_eigenvalue:e})"
            ),
            Error::FlatObjective => write!(f, "objective is flat over the scan grid"),
            Error::DivergentExpansion { sensitivity } => write!(
                f,
                "short-time expansion is window-dependent (sensitivity {sensitivity:e})"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
