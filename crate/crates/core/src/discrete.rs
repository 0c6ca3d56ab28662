//! Perturbative solver for `g = k(t) n+(tau)`, `tau ~ Exp(rho)`, in the
//! discrete Fourier realisation.
//!
//! Writing the eigenvector of the adjoint transfer operator as
//! `f = f0 + l f1 + ...` and its eigenvalue as `1 + l lambda1 + l^2 lambda2 + ...`,
//! the zeroth order equation is the three-term recurrence
//!
//! ```text
//! f(n+1) + 2 f(n) + f(n-1) + (2 i rho / n) (chi(n) - 1) f(n) = 0,   n >= 1,
//! ```
//!
//! with `f(0) = 1` and `f(n) -> 0`. Its minimal solution is obtained by
//! backward recurrence. Negative indices follow from `f(-n) = conj f(n)`.

use alloc::vec::Vec;

use num_complex::Complex64;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::error::{Error, Result};
use crate::law::Characteristic;
use crate::special::{lngamma, whittaker_w, whittaker_w_prime, WhittakerParams};
use crate::{Diagnostics, PerturbationResult};

const MIN_CAP: usize = 64;
const MAX_CAP: usize = 1 << 20;

/// Minimal solution of the zeroth order recurrence, `f[n]` for
/// `n = 0..=N+1` with `f[N+1] = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSolution {
    pub f: Vec<Complex64>,
    /// Truncation index `N`.
    pub cap: usize,
    /// Change of `f(1)` in the last cap doubling.
    pub tol: f64,
    /// Whether `|f(N)| <= tol`. Laws without a density (for instance
    /// `t = 0`) can have atomic invariant measures whose Fourier
    /// coefficients do not decay; `f(1)` may still converge.
    pub decayed: bool,
}

impl DiscreteSolution {
    pub fn get(&self, n: i64) -> Complex64 {
        let k = n.unsigned_abs() as usize;
        let v = if k < self.f.len() { self.f[k] } else { Complex64::new(0.0, 0.0) };
        if n < 0 {
            v.conj()
        } else {
            v
        }
    }
}

fn check_chi(chi: &dyn Characteristic, n: usize) -> Result<Complex64> {
    let v = chi.chi(n as f64);
    if !(v.norm() <= 1.0 + 1e-12) {
        return Err(Error::invalid(alloc::format!(
            "|chi({n})| = {} exceeds 1",
            v.norm()
        )));
    }
    Ok(v)
}

fn backward(chi: &dyn Characteristic, rho: f64, cap: usize) -> Result<Vec<Complex64>> {
    let mut f = alloc::vec![Complex64::new(0.0, 0.0); cap + 2];
    f[cap] = Complex64::new(1.0, 0.0);
    let i2rho = Complex64::new(0.0, 2.0 * rho);
    for n in (1..=cap).rev() {
        check_chi(chi, n)?;
        let coef = i2rho * chi.chi_m1_over(n as f64) + 2.0;
        f[n - 1] = -coef * f[n] - f[n + 1];
        if f[n - 1].norm() > 1e150 {
            for v in &mut f[n - 1..=cap] {
                *v *= 1e-150;
            }
        }
    }
    let f0 = f[0];
    if f0.norm() == 0.0 || !f0.norm().is_finite() {
        return Err(Error::Breakdown(0.0));
    }
    for v in &mut f {
        *v /= f0;
    }
    f[0] = Complex64::new(1.0, 0.0);
    Ok(f)
}

/// Miller backward recurrence with cap doubling until `f(1)` is stable to
/// `tol`.
pub fn solve_f0_discrete(chi: &dyn Characteristic, rho: f64, tol: f64) -> Result<DiscreteSolution> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid("rho must be positive"));
    }
    if !(tol > 1e-14 && tol < 1e-4) {
        return Err(Error::invalid("tolerance must lie in (1e-14, 1e-4)"));
    }
    if (1..=MIN_CAP).all(|n| chi.chi(n as f64) == Complex64::new(1.0, 0.0)) {
        // t is a.s. a multiple of 2 pi: the invariant measure is the point
        // mass with coefficients (-1)^n, an exact bounded solution.
        let f = (0..MIN_CAP + 2)
            .map(|n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        return Ok(DiscreteSolution { f, cap: MIN_CAP, tol: 0.0, decayed: false });
    }
    let mut cap = MIN_CAP;
    let mut prev = backward(chi, rho, cap)?;
    let mut delta = f64::INFINITY;
    while cap < MAX_CAP {
        cap *= 2;
        let next = backward(chi, rho, cap)?;
        delta = (next[1] - prev[1]).norm();
        if delta < tol && next[cap].norm() <= tol {
            return Ok(DiscreteSolution { f: next, cap, tol: delta, decayed: true });
        }
        prev = next;
    }
    if delta < tol {
        return Ok(DiscreteSolution { f: prev, cap, tol: delta, decayed: false });
    }
    Err(Error::NoInvariantMeasure(alloc::format!(
        "backward recurrence did not settle by N = {MAX_CAP}"
    )))
}

/// `lambda1 = Im f0(1) / rho`.
pub fn lambda1_discrete(f0: &DiscreteSolution, rho: f64) -> f64 {
    f0.f[1].im / rho
}

/// The solution with `zeta(0) = 0`, `zeta(1) = 1`, by reduction of order.
/// The sequence stops early if it would overflow, which happens far into
/// the tail where `f0` is negligible.
pub fn zeta_discrete(f0: &DiscreteSolution) -> Result<Vec<Complex64>> {
    let f = &f0.f;
    let mut zeta = alloc::vec![Complex64::new(0.0, 0.0)];
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=f0.cap {
        let d = f[n - 1] * f[n];
        if d.norm() == 0.0 {
            return Err(Error::Breakdown(n as f64));
        }
        sum += 1.0 / d;
        let z = f[n] * sum;
        if !(z.re.is_finite() && z.im.is_finite() && sum.norm() < 1e290) {
            break;
        }
        zeta.push(z);
    }
    Ok(zeta)
}

/// `((A0 - I) v)(n)` for `n >= 1`, with `v(0)` read from `v[0]`.
pub fn apply_a0_minus_identity(v: &[Complex64], chi: &dyn Characteristic, rho: f64, n: usize) -> Complex64 {
    let at = |k: usize| v.get(k).copied().unwrap_or_default();
    let nf = n as f64;
    let chin = chi.chi(nf);
    let pre = Complex64::new(0.0, nf / (2.0 * rho)) / chin;
    pre * (at(n + 1) + at(n) * 2.0 + at(n - 1)) - (chin - 1.0) / chin * at(n)
}

/// `(B v)(n) = (-i / (2 rho chi(n))) (v(n+1) - v(n-1))`.
pub fn apply_b(v: &DiscreteSolution, chi: &dyn Characteristic, rho: f64, n: i64) -> Complex64 {
    let chin = chi.chi(n as f64);
    Complex64::new(0.0, -0.5 / rho) / chin * (v.get(n + 1) - v.get(n - 1))
}

/// `G(m, n)` for `n = 0..=N`, the Green function of `A0 - I` with source
/// at `m`.
pub fn green_discrete(
    f0: &DiscreteSolution,
    zeta: &[Complex64],
    chi: &dyn Characteristic,
    rho: f64,
    m: usize,
) -> Result<Vec<Complex64>> {
    if m == 0 || m >= zeta.len() {
        return Err(Error::invalid("source index outside the reduction-of-order range"));
    }
    let a = Complex64::new(0.0, 2.0 * rho) * chi.chi(m as f64) / m as f64;
    Ok((0..=f0.cap)
        .map(|n| {
            if n <= m {
                a * f0.f[m] * zeta[n]
            } else {
                a * f0.f[n] * zeta[m]
            }
        })
        .collect())
}

/// `lambda2` with both evaluation paths of `f1(1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lambda2Discrete {
    pub lambda2: f64,
    /// `lambda2` from the Green-function sum.
    pub lambda2_green: f64,
    /// Estimated truncation error of the imaginary parts.
    pub tail: f64,
}

/// `lambda2 = Im f1(1) / rho`, where `f1(1) = sum_m G(m,1) r1(m)` with
/// `r1 = lambda1 f0 - B f0`, and equivalently, after summation by parts,
/// `f1(1) = f0(1) + 2 i rho lambda1 sum chi(n) f0(n)^2 / n - sum f0(n) f0(n+1) / (n(n+1))`.
pub fn lambda2_discrete(
    f0: &DiscreteSolution,
    chi: &dyn Characteristic,
    rho: f64,
    lambda1: f64,
) -> Result<Lambda2Discrete> {
    let cap = f0.cap;
    let f = &f0.f;
    let i2rho = Complex64::new(0.0, 2.0 * rho);
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut s2 = Complex64::new(0.0, 0.0);
    let mut green = Complex64::new(0.0, 0.0);
    for n in 1..=cap {
        let nf = n as f64;
        let chin = chi.chi(nf);
        s1 += chin / nf * f[n] * f[n];
        s2 += f[n] * f[n + 1] / (nf * (nf + 1.0));
        let r1 = f[n] * lambda1 - apply_b(f0, chi, rho, n as i64);
        green += i2rho * chin / nf * f[n] * r1;
    }
    let f11 = f[1] + i2rho * lambda1 * s1 - s2;
    let nf = cap as f64;
    // Remaining terms behave like the last one for about N more indices.
    let last1 = (i2rho * lambda1 * chi.chi(nf) / nf * f[cap] * f[cap]).im.abs();
    let last2 = (f[cap - 1] * f[cap] / (nf * nf)).im.abs();
    let tail = nf * (last1 + last2) / rho;
    let lambda2 = f11.im / rho;
    let lambda2_green = green.im / rho;
    if tail > 1e-8 * lambda2.abs().max(1.0) {
        return Err(Error::accuracy("lambda2 series truncated before convergence", tail));
    }
    Ok(Lambda2Discrete { lambda2, lambda2_green, tail })
}

/// `lambda1`, `lambda2`, `gamma` and `sigma2` for `k(t) n+(tau)`.
pub fn solve_kn(chi: &dyn Characteristic, rho: f64, tol: f64) -> Result<PerturbationResult> {
    let f0 = solve_f0_discrete(chi, rho, tol)?;
    let l1 = lambda1_discrete(&f0, rho);
    let l2 = lambda2_discrete(&f0, chi, rho, l1)?;
    let disagreement = (l2.lambda2 - l2.lambda2_green).abs();
    if disagreement > 1e-8 * l2.lambda2.abs().max(1.0) {
        return Err(Error::accuracy("lambda2 evaluation paths disagree", disagreement));
    }
    let note = if f0.decayed {
        alloc::format!("lambda2 via Green sum {:.17e}", l2.lambda2_green)
    } else {
        alloc::string::String::from("Fourier coefficients do not decay: atomic invariant measure")
    };
    Ok(PerturbationResult::new(
        l1,
        l2.lambda2,
        Diagnostics { truncation: f0.cap as f64, residual: disagreement.max(f0.tol), note },
    ))
}

fn kn_whittaker(kappa: Complex64, rho: f64) -> Result<WhittakerParams> {
    WhittakerParams::new(kappa, Complex64::new(0.5, 0.0), Complex64::new(0.0, -2.0 * rho))
}

/// Closed form of `f0(n)` for exponential `t` with rate `p`:
/// `(-1)^n Gamma(n+ip+1) W_{-n-ip,1/2}(-2i rho) / (Gamma(ip+1) W_{-ip,1/2}(-2i rho))`.
pub fn f0_whittaker(p: f64, rho: f64, n: u32) -> Result<Complex64> {
    let ip = Complex64::new(0.0, p);
    let num = whittaker_w(kn_whittaker(-ip - n as f64, rho)?)?;
    let den = whittaker_w(kn_whittaker(-ip, rho)?)?;
    let ratio = (lngamma(ip + (n as f64 + 1.0))? - lngamma(ip + 1.0)?).exp();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(ratio * num / den * sign)
}

/// `lambda1 = (2/p) Im[W'_{-ip,1/2}(-2i rho) / W_{-ip,1/2}(-2i rho)]`.
pub fn lambda1_whittaker(p: f64, rho: f64) -> Result<f64> {
    let w = kn_whittaker(Complex64::new(0.0, -p), rho)?;
    Ok(2.0 / p * (whittaker_w_prime(w)? / whittaker_w(w)?).im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::CharacteristicFn;

    #[test]
    fn normalised_and_hermitian() {
        let law = CharacteristicFn::exponential(1.0).unwrap();
        let s = solve_f0_discrete(&law, 1.0, 1e-12).unwrap();
        assert_eq!(s.f[0], Complex64::new(1.0, 0.0));
        assert!(s.decayed);
        assert_eq!(s.get(-3), s.get(3).conj());
    }

    #[test]
    fn satisfies_recurrence() {
        let law = CharacteristicFn::gamma(2.0, 0.5).unwrap();
        let s = solve_f0_discrete(&law, 0.8, 1e-12).unwrap();
        for n in 1..50 {
            let r = apply_a0_minus_identity(&s.f, &law, 0.8, n);
            assert!(r.norm() < 1e-12 * (1.0 + n as f64), "{n}: {r}");
        }
    }

    #[test]
    fn pure_nplus_products_do_not_grow() {
        let law = CharacteristicFn::dirac(0.0).unwrap();
        let r = solve_kn(&law, 1.0, 1e-8).unwrap();
        assert_eq!(r.lambda1, 0.0);
        assert_eq!(r.lambda2, 0.0);
        assert!(r.diagnostics.note.contains("atomic"));
    }

    #[test]
    fn zeta_boundary_and_wronskian() {
        let law = CharacteristicFn::exponential(1.0).unwrap();
        let s = solve_f0_discrete(&law, 1.0, 1e-12).unwrap();
        let z = zeta_discrete(&s).unwrap();
        assert_eq!(z[0], Complex64::new(0.0, 0.0));
        assert!((z[1] - 1.0).norm() < 1e-15);
        for n in 1..z.len().min(200) {
            let w = s.f[n - 1] * z[n] - s.f[n] * z[n - 1];
            assert!((w - 1.0).norm() < 1e-10, "{n}");
        }
    }

    #[test]
    fn doubling_invariance() {
        let law = CharacteristicFn::exponential(0.5).unwrap();
        let a = solve_kn(&law, 1.0, 1e-12).unwrap();
        let s = solve_f0_discrete(&law, 1.0, 1e-12).unwrap();
        let big = backward(&law, 1.0, 4 * s.cap).unwrap();
        let big = DiscreteSolution { f: big, cap: 4 * s.cap, tol: 0.0, decayed: true };
        let l1 = lambda1_discrete(&big, 1.0);
        let l2 = lambda2_discrete(&big, &law, 1.0, l1).unwrap();
        assert!((a.lambda1 - l1).abs() < 1e-10);
        assert!((a.lambda2 - l2.lambda2).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_characteristic_function() {
        let bad = crate::law::Callback(|t: f64| Complex64::new(1.0 + t, 0.0));
        assert!(matches!(solve_f0_discrete(&bad, 1.0, 1e-10), Err(Error::InvalidArgument(_))));
    }
}
