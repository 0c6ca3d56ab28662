//! Perturbative solver for the families whose first factor is `n-(t)`,
//! in the continuous (Fourier transform) realisation.
//!
//! The zeroth order eigenfunction solves `f'' = q(s) f` on `s > 0` with
//! `f(0) = 1` and `f(s) -> 0`. It is found by shooting backwards from a
//! large `s_max`, where the decaying branch is known from WKB asymptotics,
//! so that the wanted solution is the dominant one along the integration.

use alloc::vec::Vec;

use num_complex::Complex64;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::error::{Error, Result};
use crate::law::Characteristic;
use crate::model::{Family, Sign};
use crate::ode::{hermite_quintic, integrate, OdeOptions, Trajectory};
use crate::quad::{integrate_breaks, QuadOptions};
use crate::special::{bessel_k, whittaker_w, whittaker_w_prime, WhittakerParams};
use crate::{Diagnostics, PerturbationResult};

/// Left end of the split of the `lambda2` integral.
const S1: f64 = 1e-3;

/// The coefficient `q` of `f'' = q f` for one family.
#[derive(Clone, Copy)]
pub struct FamilyCoefficients<'a> {
    pub family: Family,
    pub chi: &'a dyn Characteristic,
    pub rho: f64,
}

impl core::fmt::Debug for FamilyCoefficients<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FamilyCoefficients")
            .field("family", &self.family)
            .field("rho", &self.rho)
            .finish_non_exhaustive()
    }
}

impl FamilyCoefficients<'_> {
    /// `q(s)`, continuous at `s = 0` through `(chi(s) - 1)/s`.
    pub fn q(&self, s: f64) -> Complex64 {
        let m = self.chi.chi_m1_over(s);
        match self.family {
            Family::NminusK => 1.0 - Complex64::new(0.0, 2.0 * self.rho) * m,
            _ => Complex64::new(0.0, self.rho) * m,
        }
    }

    /// Constant in `lambda1 = c Im f0'(0)`.
    fn lambda1_factor(&self) -> f64 {
        match self.family {
            Family::NminusK => 1.0 / self.rho,
            _ => -2.0 / self.rho,
        }
    }

    /// Coefficient of `f f'` in the `lambda2` integrand.
    fn lambda2_cross(&self) -> Complex64 {
        match self.family {
            Family::NminusK => Complex64::new(0.0, 1.0 / self.rho),
            _ => Complex64::new(0.0, -2.0 / self.rho),
        }
    }
}

/// `q` for `n-(t) k(tau)` (`q(s) = 1 - (2 i rho / s)(chi(s) - 1)`) or
/// `n-(t) n+(tau)` (`q(s) = -(i rho / s)(1 - chi(s))`).
pub fn ode_coefficient(family: Family, chi: &dyn Characteristic, rho: f64) -> Result<FamilyCoefficients<'_>> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid("rho must be positive"));
    }
    match family {
        Family::NminusK | Family::NminusNplus => Ok(FamilyCoefficients { family, chi, rho }),
        _ => Err(Error::invalid(alloc::format!(
            "family {family} has no continuous zeroth order equation"
        ))),
    }
}

/// A solution of `f'' = q f` on an increasing grid.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeSolution {
    pub family: Family,
    pub s: Vec<f64>,
    pub f: Vec<Complex64>,
    pub df: Vec<Complex64>,
    /// `f''` at the nodes, used for interpolation.
    pub ddf: Vec<Complex64>,
    pub s_max: f64,
    /// `|f(s_max)| / |f(0)|`.
    pub decay: f64,
}

impl OdeSolution {
    fn from_trajectory(family: Family, traj: Trajectory<2>, scale: Complex64, reverse: bool, q: impl Fn(f64) -> Complex64) -> Self {
        let mut idx: Vec<usize> = (0..traj.t.len()).collect();
        if reverse {
            idx.reverse();
        }
        let s: Vec<f64> = idx.iter().map(|&k| traj.t[k]).collect();
        let f: Vec<Complex64> = idx.iter().map(|&k| traj.y[k][0] * scale).collect();
        let df: Vec<Complex64> = idx.iter().map(|&k| traj.y[k][1] * scale).collect();
        let ddf = s.iter().zip(&f).map(|(&x, &v)| q(x) * v).collect();
        let s_max = *s.last().expect("nonempty trajectory");
        let decay = f.last().expect("nonempty").norm() / f[0].norm();
        OdeSolution { family, s, f, df, ddf, s_max, decay }
    }

    /// `(f(x), f'(x))` by quintic Hermite interpolation.
    pub fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let n = self.s.len();
        let k = self.s.partition_point(|&t| t <= x).clamp(1, n - 1) - 1;
        let h = self.s[k + 1] - self.s[k];
        hermite_quintic(
            h,
            [self.f[k], self.df[k], self.ddf[k]],
            [self.f[k + 1], self.df[k + 1], self.ddf[k + 1]],
            x - self.s[k],
        )
    }
}

fn ode_options(tol: f64) -> OdeOptions {
    OdeOptions { rel_tol: (tol * 1e-2).max(1e-13), ..OdeOptions::default() }
}

/// Cut-off where the WKB growth `exp(int_0^s Re sqrt q)` reaches
/// `e^5 / tol`, with a floor of 30.
pub fn choose_s_max(coeffs: &FamilyCoefficients<'_>, tol: f64) -> Result<f64> {
    let target = (1.0 / tol).ln() + 5.0;
    let mut s = 0.0;
    let mut acc = 0.0;
    let mut prev = coeffs.q(0.0).sqrt().re;
    while acc < target {
        let ds = 0.01 * (1.0 + s);
        let next = coeffs.q(s + ds).sqrt().re;
        acc += 0.5 * ds * (prev + next);
        s += ds;
        prev = next;
        if s > 1e7 {
            return Err(Error::NoInvariantMeasure(
                "no decaying branch: sqrt(q) has no positive real part".into(),
            ));
        }
    }
    Ok(s.max(30.0))
}

/// Recessive solution `f0` normalised to `f0(0) = 1`.
pub fn solve_f0_continuous(coeffs: &FamilyCoefficients<'_>, tol: f64) -> Result<OdeSolution> {
    if !(tol > 1e-13 && tol < 1e-5) {
        return Err(Error::invalid("tolerance must lie in (1e-13, 1e-5)"));
    }
    let s_max = choose_s_max(coeffs, tol)?;
    let q = |s: f64| coeffs.q(s);
    let sq = q(s_max).sqrt();
    let h = 1e-4 * s_max;
    let dq = (q(s_max + h) - q(s_max - h)) / (2.0 * h);
    // f'/f = -sqrt(q) - q'/(4q) for the decaying WKB branch.
    let y0 = [Complex64::new(1.0, 0.0), -sq - dq / (4.0 * q(s_max))];
    let traj = integrate(|s, y: &[Complex64; 2]| [y[1], q(s) * y[0]], s_max, 0.0, y0, &ode_options(tol))?;
    let (_, y_end) = traj.last();
    if y_end[0].norm() == 0.0 || !y_end[0].norm().is_finite() {
        return Err(Error::Breakdown(0.0));
    }
    let sol = OdeSolution::from_trajectory(coeffs.family, traj, 1.0 / y_end[0], true, q);
    if !(sol.decay < 1e-3) {
        return Err(Error::NoInvariantMeasure(alloc::format!(
            "solution does not decay (ratio {:e})",
            sol.decay
        )));
    }
    Ok(sol)
}

/// `n- k`: `lambda1 = Im f0'(0) / rho`; `n- n+`: `lambda1 = -2 Im f0'(0) / rho`.
pub fn lambda1_continuous(coeffs: &FamilyCoefficients<'_>, f0: &OdeSolution) -> f64 {
    coeffs.lambda1_factor() * f0.df[0].im
}

/// `r1`-part of the `lambda2` integrand, `lambda1 chi f0^2 + c f0 f0'`,
/// whose real part vanishes at `s = 0`.
pub fn lambda2_integrand(coeffs: &FamilyCoefficients<'_>, f0: &OdeSolution, lambda1: f64, s: f64) -> f64 {
    let (f, df) = f0.eval(s);
    let r = lambda1 * coeffs.chi.chi(s) * f * f + coeffs.lambda2_cross() * f * df;
    2.0 * r.re / s
}

/// `lambda2 = 2 int_0^inf (ds/s) Re[lambda1 chi f0^2 + c f0 f0']` with
/// `c = i/rho` (`n- k`) or `c = -2i/rho` (`n- n+`).
pub fn lambda2_continuous(coeffs: &FamilyCoefficients<'_>, f0: &OdeSolution, lambda1: f64, tol: f64) -> Result<f64> {
    // Re r1 must vanish at 0; otherwise the 1/s singularity is genuine.
    let (f, df) = (f0.f[0], f0.df[0]);
    let r0 = (lambda1 * coeffs.chi.chi(0.0) * f * f + coeffs.lambda2_cross() * f * df).re;
    if r0.abs() > 1e-9 * lambda1.abs().max(1.0) {
        return Err(Error::accuracy("lambda2 integrand is singular at s = 0", r0.abs()));
    }
    let opts = QuadOptions { abs_tol: tol * 1e-2, rel_tol: tol * 1e-2, max_intervals: 20_000 };
    let mut g = |s: f64| Complex64::new(lambda2_integrand(coeffs, f0, lambda1, s), 0.0);
    let head = integrate_breaks(&mut g, &[0.0, S1], opts)?;
    let stride = (f0.s.len() / 200).max(1);
    let mut points: Vec<f64> = alloc::vec![S1];
    points.extend(f0.s.iter().copied().step_by(stride).filter(|&s| s > S1 * 1.5));
    if *points.last().expect("nonempty") < f0.s_max {
        points.push(f0.s_max);
    }
    let tail = integrate_breaks(&mut g, &points, opts)?;
    Ok(head.value.re + tail.value.re)
}

/// The second solution `zeta` with `zeta(0) = 0`, `zeta'(0) = 1`,
/// integrated forwards on `[0, s_max]`.
pub fn zeta_continuous(coeffs: &FamilyCoefficients<'_>, f0: &OdeSolution, tol: f64) -> Result<OdeSolution> {
    let q = |s: f64| coeffs.q(s);
    let y0 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let traj = integrate(|s, y: &[Complex64; 2]| [y[1], q(s) * y[0]], 0.0, f0.s_max, y0, &ode_options(tol))?;
    let mut z = OdeSolution::from_trajectory(coeffs.family, traj, Complex64::new(1.0, 0.0), false, q);
    z.decay = f64::NAN;
    Ok(z)
}

/// `zeta(s) = f0(s) int_0^s dt / f0(t)^2`, the reduction of order formula.
pub fn zeta_reduction(f0: &OdeSolution, s: f64) -> Result<Complex64> {
    let mut breakdown = false;
    let mut g = |t: f64| {
        let v = f0.eval(t).0;
        if v.norm() == 0.0 {
            breakdown = true;
            return Complex64::new(0.0, 0.0);
        }
        1.0 / (v * v)
    };
    let r = integrate_breaks(&mut g, &[0.0, s], QuadOptions::default())?;
    if breakdown {
        return Err(Error::Breakdown(s));
    }
    Ok(f0.eval(s).0 * r.value)
}

/// Largest deviation of the Wronskian `f0 zeta' - f0' zeta` from 1 on the
/// `zeta` grid.
pub fn wronskian_residual(f0: &OdeSolution, zeta: &OdeSolution) -> f64 {
    zeta.s
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let (f, df) = f0.eval(s);
            (f * zeta.df[k] - df * zeta.f[k] - 1.0).norm()
        })
        .fold(0.0, f64::max)
}

/// Green function `G(., t)` of `A0 - I`,
/// `G(s,t) = 2 i rho (chi(t)/t) f0(max) zeta(min)`.
pub struct GreenFunction<'a> {
    pub t: f64,
    amplitude: Complex64,
    f0: &'a OdeSolution,
    zeta: &'a OdeSolution,
}

impl GreenFunction<'_> {
    pub fn eval(&self, s: f64) -> Complex64 {
        let (lo, hi) = if s <= self.t { (s, self.t) } else { (self.t, s) };
        self.amplitude * self.f0.eval(hi).0 * self.zeta.eval(lo).0
    }
}

pub fn green_continuous<'a>(
    f0: &'a OdeSolution,
    zeta: &'a OdeSolution,
    coeffs: &FamilyCoefficients<'_>,
    t: f64,
) -> Result<GreenFunction<'a>> {
    if !(t > 0.0 && t < f0.s_max) {
        return Err(Error::invalid("source point must lie in (0, s_max)"));
    }
    if f0.f.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::Breakdown(t));
    }
    let amplitude = Complex64::new(0.0, 2.0 * coeffs.rho) * coeffs.chi.chi(t) / t;
    Ok(GreenFunction { t, amplitude, f0, zeta })
}

/// `lambda1`, `lambda2`, `gamma`, `sigma2` for `n- k` or `n- n+`.
pub fn solve_continuous(family: Family, chi: &dyn Characteristic, rho: f64, tol: f64) -> Result<PerturbationResult> {
    let coeffs = ode_coefficient(family, chi, rho)?;
    let f0 = solve_f0_continuous(&coeffs, tol)?;
    let l1 = lambda1_continuous(&coeffs, &f0);
    let l2 = lambda2_continuous(&coeffs, &f0, l1, tol)?;
    Ok(PerturbationResult::new(
        l1,
        l2,
        Diagnostics {
            truncation: f0.s_max,
            residual: f0.decay,
            note: alloc::format!("{} grid points", f0.s.len()),
        },
    ))
}

fn nk_whittaker(p: f64, rho: f64, s: f64) -> Result<WhittakerParams> {
    WhittakerParams::new(
        Complex64::new(0.0, -rho),
        Complex64::new(0.5, 0.0),
        Complex64::new(2.0 * s, 2.0 * p),
    )
}

/// `f0(s) = W_{-i rho,1/2}(2ip + 2s) / W_{-i rho,1/2}(2ip)` for `n- k` with
/// exponential `t` of rate `p`.
pub fn f0_whittaker(p: f64, rho: f64, s: f64) -> Result<Complex64> {
    Ok(whittaker_w(nk_whittaker(p, rho, s)?)? / whittaker_w(nk_whittaker(p, rho, 0.0)?)?)
}

/// `lambda1 = (2/rho) Im[W'_{-i rho,1/2}(2ip) / W_{-i rho,1/2}(2ip)]`.
pub fn lambda1_whittaker(p: f64, rho: f64) -> Result<f64> {
    let w = nk_whittaker(p, rho, 0.0)?;
    Ok(2.0 / rho * (whittaker_w_prime(w)? / whittaker_w(w)?).im)
}

/// `K_1(x)` for complex `x` off the negative axis, from
/// `K_1(x) = sqrt(pi / 2x) W_{0,1}(2x)`.
pub fn bessel_k1_complex(x: Complex64) -> Result<Complex64> {
    let w = whittaker_w(WhittakerParams::new(
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        x * 2.0,
    )?)?;
    Ok((core::f64::consts::PI / (x * 2.0)).sqrt() * w)
}

/// `f0(s) = sqrt(p - is) K_1(2 sqrt(rho (p - is))) / (sqrt(p) K_1(2 sqrt(rho p)))`
/// for `n- n+` with exponential `t` of rate `p`.
pub fn f0_bessel(p: f64, rho: f64, s: f64) -> Result<Complex64> {
    let w = Complex64::new(p, -s);
    let num = w.sqrt() * bessel_k1_complex((w * rho).sqrt() * 2.0)?;
    let x = 2.0 * (rho * p).sqrt();
    Ok(num / (p.sqrt() * bessel_k(1, x)?))
}

/// Dyson's closed form `gamma = K_0(2 sqrt(rho p)) / (sqrt(rho p) K_1(2 sqrt(rho p)))`.
pub fn gamma_dyson(p: f64, rho: f64) -> Result<f64> {
    let x = 2.0 * (rho * p).sqrt();
    Ok(bessel_k(0, x)? / bessel_k(1, x)? / (rho * p).sqrt())
}

/// Outcome of the `n-(t) a1(+-tau)` analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct NminusA1Analysis {
    /// `Lambda(2l) = -ln(1 - l/rho)`.
    pub lambda: Complex64,
    /// `(lambda1, lambda2)` from the perturbation recurrence, or the reason
    /// it does not apply.
    pub perturbative: core::result::Result<(f64, f64), Error>,
}

/// Products `n-(t) a1(+-tau)` are lower triangular, so the growth comes
/// from the diagonal alone and `Lambda(2l) = ln E exp(l tau)`.
///
/// For the plus sign the candidate `f0(s) = (1 - is/p)^rho` grows and is
/// not a Fourier transform of a probability density, so no invariant
/// measure exists. For the minus sign `B = -(1/rho) I` and the recurrence
/// gives `lambda1 = -1/rho`, `lambda2 = 0`.
pub fn nminus_a1_analysis(ell: Complex64, rho: f64, p: f64, sign: Sign) -> Result<NminusA1Analysis> {
    if !(rho > 0.0 && p > 0.0 && rho.is_finite() && p.is_finite()) {
        return Err(Error::invalid("rho and p must be positive"));
    }
    if ell.re >= rho {
        return Err(Error::Domain(alloc::format!(
            "E exp(l tau) diverges for Re l = {} >= rho = {rho}",
            ell.re
        )));
    }
    let lambda = -(1.0 - ell / rho).ln();
    let perturbative = match sign {
        Sign::Plus => Err(Error::NoInvariantMeasure(
            "f0(s) = (1 - is/p)^rho grows and is not a characteristic function".into(),
        )),
        Sign::Minus => {
            // Solvability of (A0 - I) f1 = (lambda1 - B) f0 at f0(0) = 1.
            let b = -1.0 / rho;
            let lambda1 = b;
            // (lambda1 - B) f0 vanishes, so f1 = 0 and nothing feeds lambda2.
            Ok((lambda1, 0.0))
        }
    };
    Ok(NminusA1Analysis { lambda, perturbative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::CharacteristicFn;

    #[test]
    fn coefficient_limits() {
        let law = CharacteristicFn::exponential(0.5).unwrap();
        let nk = ode_coefficient(Family::NminusK, &law, 2.0).unwrap();
        for s in [0.0, 0.7, 3.0] {
            let want = 1.0 + 2.0 * 2.0 / Complex64::new(0.5, -s);
            assert!((nk.q(s) - want).norm() < 1e-13);
        }
        assert!((nk.q(1e8) - 1.0).norm() < 1e-6);
        let nn = ode_coefficient(Family::NminusNplus, &law, 2.0).unwrap();
        let want = -2.0 / Complex64::new(0.5, -1.5);
        assert!((nn.q(1.5) - want).norm() < 1e-13);
        assert!(ode_coefficient(Family::KNplus, &law, 1.0).is_err());
    }

    #[test]
    fn normalised_at_origin() {
        let law = CharacteristicFn::exponential(1.0).unwrap();
        let c = ode_coefficient(Family::NminusK, &law, 1.0).unwrap();
        let f0 = solve_f0_continuous(&c, 1e-10).unwrap();
        assert_eq!(f0.s[0], 0.0);
        assert!((f0.f[0] - 1.0).norm() < 1e-15);
        assert!(f0.decay < 1e-10);
    }

    #[test]
    fn dyson_gamma() {
        let law = CharacteristicFn::exponential(1.0).unwrap();
        let r = solve_continuous(Family::NminusNplus, &law, 1.0, 1e-10).unwrap();
        assert!((r.gamma - 0.814307758763789).abs() < 1e-8, "{}", r.gamma);
        assert!((gamma_dyson(1.0, 1.0).unwrap() - 0.814307758763789).abs() < 1e-12);
    }

    #[test]
    fn a1_family() {
        let r = nminus_a1_analysis(Complex64::new(1.0, 0.0), 2.0, 1.0, Sign::Plus).unwrap();
        assert!((r.lambda.re - core::f64::consts::LN_2).abs() < 1e-12);
        assert!(matches!(r.perturbative, Err(Error::NoInvariantMeasure(_))));
        let r = nminus_a1_analysis(Complex64::new(0.5, 0.0), 2.0, 1.0, Sign::Minus).unwrap();
        assert_eq!(r.perturbative, Ok((-0.5, 0.0)));
        assert!(matches!(
            nminus_a1_analysis(Complex64::new(2.0, 0.0), 2.0, 1.0, Sign::Plus),
            Err(Error::Domain(_))
        ));
    }
}
