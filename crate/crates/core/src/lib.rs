//! Numerical library for the Pade-interpolation construction of the elliptic
//! Painleve equation.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! special functions -> Pade interpolation -> (f,g) extraction -> T-step
//!                                   \-> contiguity/Lax residuals
//!                                   \-> determinant formulae
//! ```
//!
//! plus the affine Weyl group engine of type E8(1) acting on the parameter
//! space and birationally on the point (f,g).

pub mod determinants;
pub mod lax;
pub mod linalg;
pub mod pade;
pub mod painleve;
pub mod sampling;
pub mod scalar;
pub mod special;
pub mod weyl;

use num_complex::Complex64;

/// Library-wide error type. `Domain` marks invalid inputs (poles, missing
/// termination, broken constraints); `Numerical` marks evaluations that are
/// well posed but failed to reach the requested accuracy.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Working complex scalar of the public API (hardware double precision).
pub type Scalar = Complex64;

pub(crate) fn ensure_finite(z: Scalar, what: &str) -> Result<Scalar> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Numerical(format!("{what} is not finite")))
    }
}
