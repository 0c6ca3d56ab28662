//! Adaptive Dormand–Prince 5(4) integration of complex first-order
//! systems, with every accepted step recorded for later interpolation.

use alloc::vec::Vec;

use num_complex::Complex64;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step magnitude; `0` picks one from the interval length.
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            initial_step: 0.0,
            max_steps: 1_000_000,
        }
    }
}

/// Accepted mesh with state and derivative at each node, ordered in the
/// direction of integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[Complex64; N]>,
    pub dy: Vec<[Complex64; N]>,
    pub rejected: usize,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [Complex64; N]) {
        let k = self.t.len() - 1;
        (self.t[k], self.y[k])
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo<const N: usize>(y: &[Complex64; N], h: f64, terms: &[(f64, &[Complex64; N])]) -> [Complex64; N] {
    let mut out = *y;
    for (w, k) in terms {
        for i in 0..N {
            out[i] += k[i] * (h * w);
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: [Complex64; N],
    opts: &OdeOptions,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[Complex64; N]) -> [Complex64; N],
{
    if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(Error::invalid("integration interval must be finite and nonempty"));
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut h = if opts.initial_step > 0.0 {
        opts.initial_step.min(span)
    } else {
        (span * 1e-3).min(0.1)
    };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut traj = Trajectory {
        t: alloc::vec![t],
        y: alloc::vec![y],
        dy: alloc::vec![k1],
        rejected: 0,
    };
    for _ in 0..opts.max_steps {
        let remaining = (t1 - t).abs();
        if remaining <= 1e-15 * span {
            return Ok(traj);
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &combo(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &combo(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &combo(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * hs,
            &combo(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + hs,
            &combo(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = combo(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let t_new = if last { t1 } else { t + hs };
        let k7 = f(t_new, &y_new);
        let mut err = 0.0f64;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            err = 1e10;
        }
        if err <= 1.0 {
            t = t_new;
            y = y_new;
            k1 = k7;
            traj.t.push(t);
            traj.y.push(y);
            traj.dy.push(k1);
            if last {
                return Ok(traj);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            traj.rejected += 1;
            h *= (0.9 * err.powf(-0.25)).clamp(0.1, 0.9);
        }
        if h < 1e-13 * t.abs().max(1e-3) {
            return Err(Error::Stiffness(t));
        }
    }
    Err(Error::accuracy("ODE step budget exhausted", (t1 - t).abs()))
}

/// Quintic Hermite interpolant on `[0, h]` for a function with known value,
/// first and second derivative at both ends. Returns the value and first
/// derivative at `x`.
pub fn hermite_quintic(
    h: f64,
    left: [Complex64; 3],
    right: [Complex64; 3],
    x: f64,
) -> (Complex64, Complex64) {
    let u = x / h;
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let h00 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    let h10 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    let h20 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
    let h01 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    let h11 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    let h21 = 0.5 * (u3 - 2.0 * u4 + u5);
    let d00 = -30.0 * u2 + 60.0 * u3 - 30.0 * u4;
    let d10 = 1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4;
    let d20 = 0.5 * (2.0 * u - 9.0 * u2 + 12.0 * u3 - 5.0 * u4);
    let d01 = 30.0 * u2 - 60.0 * u3 + 30.0 * u4;
    let d11 = -12.0 * u2 + 28.0 * u3 - 15.0 * u4;
    let d21 = 0.5 * (3.0 * u2 - 8.0 * u3 + 5.0 * u4);
    let value = left[0] * h00 + left[1] * (h * h10) + left[2] * (h * h * h20)
        + right[0] * h01 + right[1] * (h * h11) + right[2] * (h * h * h21);
    let deriv = left[0] * (d00 / h) + left[1] * d10 + left[2] * (h * d20)
        + right[0] * (d01 / h) + right[1] * d11 + right[2] * (h * d21);
    (value, deriv)
}
