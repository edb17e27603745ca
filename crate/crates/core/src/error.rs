use thiserror::Error;

/// Errors raised by the numerical and symbolic routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {0} outside the fundamental strip")]
    Strip(String),

    #[error("pole({n},{m})")]
    Pole { n: u32, m: u32 },

    #[error("regime error: {0}")]
    Regime(String),

    #[error("polynomial division is not exact (remainder {remainder:.3e})")]
    NotDivisible { remainder: f64 },

    #[error("operator does not preserve the span (residual {residual:.3e})")]
    NotInvariant { residual: f64 },

    #[error("basis is singular or ill-conditioned")]
    SingularBasis,

    #[error("span test failed (residual {residual:.3e})")]
    SpanFailure { residual: f64 },

    #[error("degenerate parameter: {0}")]
    DegenerateParam(String),

    #[error("operator does not act as a scalar (spread {spread:.3e})")]
    ScalarMismatch { spread: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("inversion fails on the lattice point ({n},{m})")]
    ExpectedViolation { n: u32, m: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
