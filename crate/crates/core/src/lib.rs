//! Growth rates of products of random `SL(2,R)` matrices.
//!
//! The crate computes the Lyapunov exponent `gamma`, the variance `sigma2`
//! and the generalised Lyapunov exponent `Lambda(2l)` for four families of
//! random products, each by several independent routes:
//!
//! * [`finite_dim`]: exact spectra of the transfer operator restricted to
//!   the `(2l+1)`-dimensional invariant block (integer `l`);
//! * [`discrete`] and [`continuous`]: perturbative solvers for the
//!   coefficients `lambda1`, `lambda2` of the leading eigenvalue;
//! * [`montecarlo`]: direct simulation of the matrix products.
//!
//! Supporting modules provide the group arithmetic ([`sl2`]), the
//! infinitesimal generators of the representations ([`representations`]),
//! special functions ([`special`]), quadrature ([`quad`]), small dense
//! complex linear algebra ([`linalg`]), an adaptive ODE integrator
//! ([`ode`]) and the probability laws of the random parameters ([`law`]).
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod continuous;
pub mod discrete;
pub mod error;
pub mod finite_dim;
pub mod law;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod ode;
pub mod quad;
pub mod representations;
pub mod sl2;
pub mod special;

/// Floating point methods for `no_std` builds. When `std` is linked the
/// inherent methods take precedence and the import goes unused.
mod prelude {
    #[allow(unused_imports)]
    pub(crate) use num_traits::Float;
}

pub use error::{Error, Result};
pub use law::CharacteristicFn;
pub use num_complex::Complex64;

/// Perturbative coefficients of the leading eigenvalue and their derived
/// statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationResult {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: f64,
    pub sigma2: f64,
    pub diagnostics: Diagnostics,
}

impl PerturbationResult {
    pub fn new(lambda1: f64, lambda2: f64, diagnostics: Diagnostics) -> Self {
        PerturbationResult {
            lambda1,
            lambda2,
            gamma: -lambda1 / 2.0,
            sigma2: lambda1 * lambda1 / 4.0 - lambda2 / 2.0,
            diagnostics,
        }
    }

    /// Second order Taylor expansion of `Lambda(2l)` around `l = 0`:
    /// `gamma (2l) + sigma2 (2l)^2 / 2`.
    pub fn lambda_expansion(&self, ell: f64) -> f64 {
        let x = 2.0 * ell;
        self.gamma * x + 0.5 * self.sigma2 * x * x
    }
}

/// Solver diagnostics carried alongside perturbative results.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Truncation index (discrete) or integration cut-off `s_max` (continuous).
    pub truncation: f64,
    /// Largest residual among the internal consistency checks.
    pub residual: f64,
    /// Free-form note, e.g. the value of a second evaluation path.
    pub note: alloc::string::String,
}
