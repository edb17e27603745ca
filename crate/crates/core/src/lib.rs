//! Hyperbolic modular double: special functions, Boltzmann weights,
//! finite-difference operator algebra and R-matrix constructions, together
//! with numerical checks of the identities they satisfy.

pub mod cx;
pub mod dense;
pub mod error;
pub mod funspace;
pub mod hypgamma;
pub mod intertwiner;
pub mod quadrature;
pub mod rmatrix;
pub mod sklyanin;
pub mod weights;

pub use error::{Error, Result};
