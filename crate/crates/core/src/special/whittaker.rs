use alloc::vec::Vec;

use num_complex::Complex64;

use super::elementary::log1p;
use super::gamma::lngamma;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::error::{Error, Result};
use crate::quad::{integrate_breaks, QuadOptions};

/// Parameters of `W_{kappa,mu}(z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WhittakerParams {
    pub kappa: Complex64,
    pub mu: Complex64,
    pub z: Complex64,
}

impl WhittakerParams {
    /// Validates that `z` avoids the cut `(-inf, 0]` and that the integral
    /// representation converges, `Re(mu - kappa + 1/2) > 0`.
    pub fn new(kappa: Complex64, mu: Complex64, z: Complex64) -> Result<Self> {
        if z.im == 0.0 && z.re <= 0.0 {
            return Err(Error::invalid("Whittaker argument on the branch cut"));
        }
        if !(z.norm().is_finite() && kappa.norm().is_finite() && mu.norm().is_finite()) {
            return Err(Error::invalid("non-finite Whittaker parameter"));
        }
        if !((mu - kappa).re + 0.5 > 0.0) {
            return Err(Error::invalid("Re(mu - kappa + 1/2) must be positive"));
        }
        Ok(WhittakerParams { kappa, mu, z })
    }

    /// The same function with `kappa` lowered by one.
    pub fn lowered(&self) -> Self {
        WhittakerParams {
            kappa: self.kappa - 1.0,
            ..*self
        }
    }
}

/// `W_{kappa,mu}(z)` from
/// `e^{-z/2} z^kappa / Gamma(mu - kappa + 1/2) * int_0^inf e^{-t}
/// t^{mu - kappa - 1/2} (1 + t/z)^{mu + kappa - 1/2} dt`.
///
/// The integral is taken in the variable `u = ln t`, where the integrand is
/// smooth and decays exponentially in both directions.
pub fn whittaker_w(p: WhittakerParams) -> Result<Complex64> {
    let WhittakerParams { kappa, mu, z } = WhittakerParams::new(p.kappa, p.mu, p.z)?;
    let alpha = mu - kappa + 0.5;
    let beta = mu + kappa - 0.5;
    let inv_z = 1.0 / z;
    let exponent = |u: f64| -> Complex64 {
        let t = u.exp();
        Complex64::new(-t + alpha.re * u, alpha.im * u) + beta * log1p(inv_z * t)
    };

    // Locate the bulk of the integrand on a coarse grid.
    let mut peak = f64::NEG_INFINITY;
    let mut u_peak = 0.0;
    let mut u = -30.0;
    while u < 8.0 {
        let e = exponent(u).re;
        if e > peak {
            peak = e;
            u_peak = u;
        }
        u += 0.125;
    }
    const DROP: f64 = 42.0;
    let mut lo = u_peak.min(0.0);
    while exponent(lo).re > peak - DROP && lo > -1e4 {
        lo -= 1.0;
    }
    let mut hi = u_peak.max(0.0);
    while exponent(hi).re > peak - DROP && hi < 12.0 {
        hi += 0.25;
    }

    let n = ((hi - lo) / 2.0).ceil().max(1.0) as usize;
    let points: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let mut integrand = |u: f64| (exponent(u) - peak).exp();
    let opts = QuadOptions {
        abs_tol: 1e-17,
        rel_tol: 1e-14,
        max_intervals: 20_000,
    };
    let r = integrate_breaks(&mut integrand, &points, opts)?;
    if r.value.norm() == 0.0 || !(r.error <= 1e-11 * r.value.norm()) {
        return Err(Error::accuracy(
            "Whittaker integral",
            r.error / r.value.norm().max(f64::MIN_POSITIVE),
        ));
    }
    let log_pref = -0.5 * z + kappa * z.ln() - lngamma(alpha)? + peak;
    Ok(log_pref.exp() * r.value)
}

/// `dW_{kappa,mu}/dz` from the contiguous relation
/// `z W' = (kappa - z/2) W - [mu^2 - (kappa - 1/2)^2] W_{kappa-1,mu}`.
pub fn whittaker_w_prime(p: WhittakerParams) -> Result<Complex64> {
    let w = whittaker_w(p)?;
    let lowered = whittaker_w(p.lowered())?;
    let km = p.kappa - 0.5;
    Ok(((p.kappa - 0.5 * p.z) * w - (p.mu * p.mu - km * km) * lowered) / p.z)
}
