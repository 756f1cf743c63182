//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the spectral, symbol, potential and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Array sizes do not match the grid or the operator shape.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// An argument is outside the admissible range.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A symbol was evaluated at a point where it is not defined.
    #[error("singular point: {0}")]
    SingularPoint(String),
    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature failure after {subdivisions} subdivisions (error estimate {estimate:.3e})")]
    Quadrature { subdivisions: usize, estimate: f64 },
    /// A truncated sum is not accurate enough at the requested cutoff.
    #[error("precision: tail estimate {tail:.3e} exceeds tolerance {tolerance:.3e}; suggested cutoff {suggested}")]
    Precision { tail: f64, tolerance: f64, suggested: usize },
    /// The numerical jump coefficients disagree with the leading term.
    #[error("inconsistent symbol: {0}")]
    InconsistentSymbol(String),
    /// One-sided limits were requested for a symbol without the oddness condition.
    #[error("jump undefined: {0}")]
    JumpUndefined(String),
    /// The coefficient configuration is too close to a kernel-case boundary to classify.
    #[error("ambiguous kernel classification: {0}")]
    AmbiguousKernel(String),
    /// A dense factorization failed or was too ill-conditioned.
    #[error("solver failure: {message} (condition estimate {condition:.3e})")]
    Solver { message: String, condition: f64 },
    /// Boundary data violate the flux compatibility condition.
    #[error("gauge: {0}")]
    Gauge(String),
    /// Extrapolation from the offset ladder did not converge.
    #[error("extrapolation diverged: {0}")]
    Extrapolation(String),
    /// The requested feature is outside the supported configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
