use core::f64::consts::PI;
#[allow(unused_imports)]
use crate::prelude::*;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
/// Seam between the ascending series and the continued fraction.
const SEAM: f64 = 2.0;

/// `K_nu(x)` together with `e^x K_nu(x)` and an underflow flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselK {
    pub value: f64,
    /// `e^x K_nu(x)`, finite even where `value` underflows.
    pub scaled: f64,
    pub underflow: bool,
}

/// Modified Bessel function of the second kind `K_0` or `K_1` at `x > 0`.
///
/// Returns `0` where the true value is below the smallest normal double;
/// [`bessel_k_full`] reports that case explicitly.
pub fn bessel_k(order: u8, x: f64) -> Result<f64> {
    bessel_k_full(order, x).map(|k| k.value)
}

pub fn bessel_k_full(order: u8, x: f64) -> Result<BesselK> {
    if order > 1 {
        return Err(Error::invalid("only K_0 and K_1 are implemented"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid("Bessel K needs a finite positive argument"));
    }
    let (k0, k1) = if x <= SEAM {
        let (k0, k1) = ascending(x);
        (k0 * x.exp(), k1 * x.exp())
    } else {
        steed(x)
    };
    let s = if order == 0 { k0 } else { k1 };
    let value = s * (-x).exp();
    Ok(BesselK {
        value,
        scaled: s,
        underflow: value < f64::MIN_POSITIVE,
    })
}

/// Ascending series for `K_0`, `K_1` (unscaled), accurate for `x <= 2`.
fn ascending(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let ln_half = (0.5 * x).ln();
    // term0 = y^k / (k!)^2, term1 = y^k / (k! (k+1)!)
    let mut term0 = 1.0;
    let mut term1 = 1.0;
    let mut h = 0.0; // H_k
    let mut i0 = 0.0;
    let mut i1s = 0.0;
    let mut sum0 = 0.0;
    let mut sum1 = 0.0;
    for k in 0..200 {
        let kf = k as f64;
        let h_next = h + 1.0 / (kf + 1.0);
        i0 += term0;
        i1s += term1;
        sum0 += h * term0;
        sum1 += (h + h_next) * term1;
        if term0 < 1e-18 * i0 {
            break;
        }
        term0 *= y / ((kf + 1.0) * (kf + 1.0));
        term1 *= y / ((kf + 1.0) * (kf + 2.0));
        h = h_next;
    }
    let i1 = 0.5 * x * i1s;
    let k0 = -(ln_half + EULER_GAMMA) * i0 + sum0;
    let k1 = 1.0 / x + ln_half * i1 + 0.5 * x * EULER_GAMMA * i1s - 0.25 * x * sum1;
    (k0, k1)
}

/// Steed's continued fraction (Temme's CF2) for `e^x K_0`, `e^x K_1`, `x > 2`.
fn steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
