//! Numerical kernels for linear field equations: special functions, Laplacian
//! spectra, ODE and PDE Green's functions, heat and wave propagation,
//! Riemannian geometry, and asymptotic expansions.

// `!(x > 0.0)` guards reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop, clippy::excessive_precision)]

pub mod asympt;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod heat;
pub mod odegreen;
pub mod poisson;
pub mod quad;
pub mod specialfn;
pub mod spectra;
pub mod wave;

pub use error::{FieldError, Result};
pub use num_complex::Complex64;
pub use quad::{QuadratureKind, QuadratureRule, SphereRule};
pub use specialfn::SphericalHarmonicIndex;

/// Heaviside step with the convention `theta(0) = 1`.
#[inline]
pub fn heaviside(s: f64) -> f64 {
    if s >= 0.0 {
        1.0
    } else {
        0.0
    }
}
