//! Special functions: complex log-gamma, modified Bessel functions `K0`,
//! `K1`, and the Whittaker function `W_{kappa,mu}(z)`.

mod bessel;
pub mod elementary;
mod gamma;
mod whittaker;

pub use bessel::{bessel_k, bessel_k_full, BesselK};
pub use gamma::{gamma, lngamma};
pub use whittaker::{whittaker_w, whittaker_w_prime, WhittakerParams};
