//! Exact `Lambda(2l)` for nonnegative integer `l`.
//!
//! For integer `l` the span of `e_{l,n}`, `|n| <= l`, is invariant under the
//! whole group, so the transfer operator restricts to a `(2l+1)`-square
//! matrix. With `g = d(t) e(tau)` and `tau` exponential of rate `rho`,
//!
//! ```text
//! T_l = E[exp(t X)] (1 - Y/rho)^{-1},
//! ```
//!
//! where `X`, `Y` are the generators of the two factors. The routines below
//! build the inverse `T_l^{-1} = (1 - Y/rho) E[exp(t X)]^{-1}` and read
//! `Lambda(2l) = -ln mu` off its eigenvalue `mu` of smallest modulus.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::error::{Error, Result};
use crate::law::{Characteristic, CharacteristicFn};
use crate::linalg::{eigenvalue_condition, eigenvalues, CMatrix};
use crate::model::{Family, Sign};
use crate::representations::generator_block;
use crate::sl2::SubgroupKind;

/// The inverse transfer operator restricted to the invariant block, in the
/// basis `e_{l,n}` with rows and columns ordered `n = -l..=l`.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedTransferMatrix {
    pub ell: u32,
    pub family: Family,
    pub entries: CMatrix,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("rho must be positive and finite"))
    }
}

fn chi_nonzero(law: &CharacteristicFn, theta: f64) -> Result<Complex64> {
    let v = law.chi(theta);
    if !(v.norm() > 1e-14) || !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::SingularModel(format!(
            "characteristic function vanishes at {theta}"
        )));
    }
    Ok(v)
}

/// Closed-form tridiagonal entries for `k(t) n+(tau)`:
/// `a_m = (i/2rho)(l+1-m)/chi(1-m)` below the diagonal,
/// `b_m = (1 - i m/rho)/chi(-m)` on it and
/// `c_m = (-i/2rho)(l+1+m)/chi(-m-1)` above it.
pub fn transfer_matrix_kn(ell: u32, rho: f64, law: &CharacteristicFn) -> Result<RestrictedTransferMatrix> {
    check_rho(rho)?;
    let l = ell as i64;
    let size = 2 * ell as usize + 1;
    let lf = ell as f64;
    let mut m = CMatrix::zeros(size, size);
    for row in 0..size {
        let mm = row as i64 - l;
        let mf = mm as f64;
        m[(row, row)] = c(1.0, -mf / rho) / chi_nonzero(law, -mf)?;
        if row > 0 {
            m[(row, row - 1)] = c(0.0, 0.5 / rho) * (lf + 1.0 - mf) / chi_nonzero(law, 1.0 - mf)?;
        }
        if row + 1 < size {
            m[(row, row + 1)] = c(0.0, -0.5 / rho) * (lf + 1.0 + mf) / chi_nonzero(law, -mf - 1.0)?;
        }
    }
    Ok(RestrictedTransferMatrix { ell, family: Family::KNplus, entries: m })
}

/// `n-(t) k(tau)`: the expectation of `exp(t N-)` is a polynomial in the
/// nilpotent block `N-`, so only the moments `E t^i`, `i <= 2l`, enter.
pub fn transfer_matrix_nminus_k(ell: u32, rho: f64, law: &CharacteristicFn) -> Result<RestrictedTransferMatrix> {
    transfer_matrix(Family::NminusK, ell, rho, law, Sign::Plus)
}

/// `E[exp(t X)]` on the block for the first factor of a family.
pub fn first_factor_mean(kind: SubgroupKind, ell: u32, law: &CharacteristicFn) -> Result<CMatrix> {
    let size = 2 * ell as usize + 1;
    match kind {
        SubgroupKind::K => {
            // exp(tK) multiplies the coefficient of e_n by e^{-int}.
            let d = (0..size)
                .map(|k| law.chi(-(k as f64 - ell as f64)))
                .collect::<Vec<_>>();
            Ok(CMatrix::diagonal(&d))
        }
        SubgroupKind::Nminus | SubgroupKind::Nplus => {
            let x = generator_block(kind, ell);
            let mut sum = CMatrix::identity(size);
            let mut power = CMatrix::identity(size);
            let mut factorial = 1.0;
            for i in 1..=2 * ell {
                let mi = law.moment(i);
                if !mi.is_finite() {
                    return Err(Error::invalid(format!("moment {i} is not finite")));
                }
                power = &power * &x;
                factorial *= i as f64;
                sum = sum.add(&power.scale(c(mi / factorial, 0.0)));
            }
            Ok(sum)
        }
        _ => Err(Error::invalid(format!(
            "first factor {kind:?} is not supported by the finite-dimensional route"
        ))),
    }
}

/// `1 - s Y / rho`, the inverse of `E[exp(s tau Y)]` for `tau ~ Exp(rho)`.
pub fn resolvent_factor(kind: SubgroupKind, ell: u32, rho: f64, sign: Sign) -> CMatrix {
    let size = 2 * ell as usize + 1;
    let y = generator_block(kind, ell);
    CMatrix::identity(size).sub(&y.scale(c(sign.value() / rho, 0.0)))
}

/// Generic assembly of `T_l^{-1}` from the block generators of the two
/// factors. The sign flips `tau` and is only meaningful for `n- a1`.
pub fn transfer_matrix(
    family: Family,
    ell: u32,
    rho: f64,
    law: &CharacteristicFn,
    sign: Sign,
) -> Result<RestrictedTransferMatrix> {
    check_rho(rho)?;
    let (first, second) = family.factors();
    let sign = if family == Family::NminusA1 { sign } else { Sign::Plus };
    let mean = first_factor_mean(first, ell, law)?;
    let inv_mean = mean
        .inverse()
        .map_err(|_| Error::SingularModel("E[exp(tX)] is singular on the block".into()))?;
    let entries = &resolvent_factor(second, ell, rho, sign) * &inv_mean;
    Ok(RestrictedTransferMatrix { ell, family, entries })
}

/// Spectral data behind a finite-dimensional `Lambda(2l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GleResult {
    /// `Lambda(2l) = -ln |mu|`.
    pub lambda: f64,
    /// Selected eigenvalue of `T_l^{-1}`.
    pub mu: Complex64,
    pub spectrum: Vec<Complex64>,
    /// Set when `mu` is not real and positive to relative accuracy `1e-8`.
    pub complex_leading: bool,
    /// Number of computed eigenvalues averaged into `mu`. More than one
    /// means a numerically defective eigenvalue.
    pub cluster: usize,
    /// Condition number of `mu` when it is simple.
    pub condition: Option<f64>,
}

const MAX_CLUSTER: usize = 8;

/// Largest `m` such that the `m` eigenvalues nearest to `mu` sit
/// within the perturbation radius of an `m`-fold Jordan block and are
/// well separated from the rest.
fn cluster_size(spectrum: &[Complex64], mu: Complex64, scale: f64) -> usize {
    let mut dist: Vec<f64> = spectrum.iter().map(|z| (z - mu).norm()).collect();
    dist.sort_by(f64::total_cmp);
    let radius = |m: usize| 10.0 * scale.powf(1.0 / m as f64) * mu.norm().max(1.0);
    let mut best = 1;
    for m in 2..=dist.len().min(MAX_CLUSTER) {
        let inside = dist[m - 1] <= radius(m);
        let separated = m == dist.len() || dist[m] > 100.0 * dist[m - 1];
        if inside && separated {
            best = m;
        }
    }
    best
}

/// Picks the smallest-modulus eigenvalue of `T_l^{-1}` and returns
/// `Lambda(2l) = -ln mu`.
pub fn gle_from_matrix(m: &RestrictedTransferMatrix) -> Result<GleResult> {
    let a = &m.entries;
    let spectrum = eigenvalues(a)?;
    let mut nearest = spectrum[0];
    for z in &spectrum {
        if z.norm() < nearest.norm() {
            nearest = *z;
        }
    }
    let scale = f64::EPSILON * a.frobenius().max(1.0);
    let cluster = cluster_size(&spectrum, nearest, scale);
    let (mu, condition) = if cluster > 1 {
        let mut dist: Vec<(f64, Complex64)> =
            spectrum.iter().map(|z| ((z - nearest).norm(), *z)).collect();
        dist.sort_by(|x, y| x.0.total_cmp(&y.0));
        let sum: Complex64 = dist[..cluster].iter().map(|x| x.1).sum();
        (sum / cluster as f64, None)
    } else {
        let cond = eigenvalue_condition(a, nearest);
        if cond * scale > 1e-8 {
            return Err(Error::IllConditioned { condition: cond });
        }
        (nearest, Some(cond))
    };
    if mu.norm() == 0.0 {
        return Err(Error::Domain("transfer operator has an infinite eigenvalue".into()));
    }
    let complex_leading = mu.im.abs() > 1e-8 * mu.norm() || mu.re < 0.0;
    Ok(GleResult {
        lambda: -mu.norm().ln(),
        mu,
        spectrum,
        complex_leading,
        cluster,
        condition,
    })
}

/// `Lambda(2l)` of a family for integer `l`.
pub fn gle_finite(
    family: Family,
    ell: u32,
    rho: f64,
    law: &CharacteristicFn,
    sign: Sign,
) -> Result<GleResult> {
    let m = match family {
        Family::KNplus => transfer_matrix_kn(ell, rho, law)?,
        _ => transfer_matrix(family, ell, rho, law, sign)?,
    };
    gle_from_matrix(&m)
}
