//! Complex `expm1` and `log1p`, accurate for small arguments.

use num_complex::Complex64;
#[allow(unused_imports)]
use crate::prelude::*;

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let half = (0.5 * y).sin();
    let re = x.exp_m1() * y.cos() - 2.0 * half * half;
    let im = x.exp() * y.sin();
    Complex64::new(re, im)
}

/// `ln(1 + w)` (principal branch) without cancellation for small `|w|`.
pub fn log1p(w: Complex64) -> Complex64 {
    let (a, b) = (w.re, w.im);
    let re = 0.5 * (2.0 * a + a * a + b * b).ln_1p();
    let im = b.atan2(1.0 + a);
    Complex64::new(re, im)
}
