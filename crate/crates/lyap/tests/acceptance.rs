//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the table is always printed. The
//! process exits nonzero if any criterion fails. Reference values that are
//! not closed forms of the library come from oracles defined here.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use lyap_core::continuous::{
    self, lambda1_continuous, nminus_a1_analysis, ode_coefficient, solve_continuous, solve_f0_continuous,
    wronskian_residual, zeta_continuous,
};
use lyap_core::discrete::{
    self, apply_a0_minus_identity, green_discrete, lambda1_discrete, solve_f0_discrete, solve_kn, zeta_discrete,
};
use lyap_core::finite_dim::{gle_finite, transfer_matrix};
use lyap_core::linalg::CMatrix;
use lyap_core::model::{Family, Sign};
use lyap_core::montecarlo::{estimate_gamma, estimate_gle, estimate_sigma2, ModelSpec};
use lyap_core::representations::{
    casimir_residual, commutator, generator_discrete, interior_residual, ladder_matrix, mellin_casimir_residual,
    Ladder, Rational, RationalPair,
};
use lyap_core::sl2::{one_param, GroupElement, SubgroupKind};
use lyap_core::special::{bessel_k, lngamma, whittaker_w, whittaker_w_prime, WhittakerParams};
use lyap_core::{CharacteristicFn, Complex64, Error};

const STEPS: usize = 100_000;
const PAIRS: [(f64, f64); 3] = [(0.2, 1.0), (1.0, 1.0), (2.0, 0.5)];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn exp_law(p: f64) -> CharacteristicFn {
    CharacteristicFn::exponential(p).unwrap()
}

fn model(family: Family, p: f64, rho: f64, sign: Sign) -> ModelSpec {
    ModelSpec::family(family, exp_law(p), rho, sign).unwrap()
}

/// Collects the checks of one criterion.
#[derive(Default)]
struct Report {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        let d = (got - want).abs();
        self.check(d <= tol, format!("{what}: {got:.15e} vs {want:.15e} (|diff| {d:.1e}, tol {tol:.0e})"));
    }

    fn at_most(&mut self, what: &str, value: f64, tol: f64) {
        self.check(value <= tol, format!("{what}: {value:.2e} (tol {tol:.0e})"));
    }

    fn stderr(&mut self, what: &str, a: f64, b: f64, joint: f64) {
        let z = (a - b) / joint;
        self.check(z.abs() <= 3.0, format!("{what}: {a:.6e} vs {b:.6e}, z = {z:+.2} (tol 3)"));
    }

    fn budget(&mut self, start: Instant, seconds: f64) {
        let t = start.elapsed().as_secs_f64();
        self.check(t < seconds, format!("runtime {t:.1} s (limit {seconds} s)"));
    }
}

// ---------------------------------------------------------------- oracles

/// `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt` by the trapezoidal
/// rule, which converges geometrically for this integrand.
fn bessel_k_integral(nu: f64, x: f64) -> f64 {
    let h = 0.01;
    let mut sum = 0.5 * (-x).exp();
    let mut t = h;
    loop {
        let term = (-x * f64::cosh(t)).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            return sum * h;
        }
        t += h;
    }
}

/// `K_0(x) = -(ln(x/2) + euler) I_0(x) + sum_k (x^2/4)^k / (k!)^2 H_k`.
fn bessel_k0_series(x: f64) -> f64 {
    let euler = 0.577_215_664_901_532_9;
    let q = x * x / 4.0;
    let (mut term, mut h, mut i0, mut s) = (1.0, 0.0, 1.0, 0.0);
    for k in 1..100 {
        let k = k as f64;
        term *= q / (k * k);
        h += 1.0 / k;
        i0 += term;
        s += term * h;
    }
    -((x / 2.0).ln() + euler) * i0 + s
}

/// Atoms of the `n`-point law sharing its first `2n - 1` moments with
/// `Exp(1)`: nodes are the roots of the Laguerre polynomial `L_n`, found by
/// bisection on a fine grid, and weights solve the Vandermonde system for
/// the moments `k!`.
fn moment_matched_law(n: usize) -> (Vec<f64>, Vec<f64>) {
    let laguerre = |x: f64| {
        let (mut a, mut b) = (1.0, 1.0 - x);
        for j in 1..n {
            let j = j as f64;
            let next = ((2.0 * j + 1.0 - x) * b - j * a) / (j + 1.0);
            a = b;
            b = next;
        }
        b
    };
    let mut nodes = Vec::new();
    let step = 1e-3;
    let mut x = 0.0;
    while nodes.len() < n {
        let (lo, hi) = (x, x + step);
        if laguerre(lo) * laguerre(hi) < 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if laguerre(a) * laguerre(m) <= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            nodes.push(0.5 * (a + b));
        }
        x = hi;
    }
    // Solve sum_i w_i x_i^k = k! for k = 0..n-1 by Gaussian elimination.
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut row: Vec<f64> = nodes.iter().map(|x| x.powi(k as i32)).collect();
            row.push((1..=k).map(|j| j as f64).product());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                let pivot = m[col].clone();
                for (x, p) in m[r].iter_mut().zip(pivot).skip(col) {
                    *x -= f * p;
                }
            }
        }
    }
    let weights = (0..n).map(|i| m[i][n] / m[i][i]).collect();
    (nodes, weights)
}

type M3 = [[f64; 3]; 3];

/// `S -> g S g^T` on symmetric forms `(s11, s12, s22)`.
fn quadratic_action(g: &GroupElement) -> M3 {
    let (a, b, c, d) = (g.a, g.b, g.c, g.d);
    [[a * a, 2.0 * a * b, b * b], [a * c, a * d + b * c, b * d], [c * c, 2.0 * c * d, d * d]]
}

/// `E[quadratic_action(one_param(kind, t))]`, `t ~ Exp(rate)`, by Simpson.
fn mean_action(kind: SubgroupKind, rate: f64) -> M3 {
    let n = 200_000;
    let h = 60.0 / rate / n as f64;
    let mut acc = [[0.0; 3]; 3];
    for k in 0..=n {
        let t = k as f64 * h;
        let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        let q = quadratic_action(&one_param(kind, t).unwrap());
        let dens = rate * (-rate * t).exp();
        for i in 0..3 {
            for j in 0..3 {
                acc[i][j] += w * dens * q[i][j] * h / 3.0;
            }
        }
    }
    acc
}

/// `Lambda(2)` of `k(t) n+(tau)` as the log of the Perron root of the
/// averaged action on quadratic forms.
fn lambda2_quadratic_forms(p: f64, rho: f64) -> f64 {
    let (e1, e2) = (mean_action(SubgroupKind::K, p), mean_action(SubgroupKind::Nplus, rho));
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| e2[i][k] * e1[k][j]).sum();
        }
    }
    let mut v = [1.0, 0.0, 1.0];
    let mut r = 0.0;
    for _ in 0..2000 {
        let w: Vec<f64> = (0..3).map(|i| (0..3).map(|k| m[i][k] * v[k]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        r = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = [w[0] / norm, w[1] / norm, w[2] / norm];
    }
    r.ln()
}

// --------------------------------------------------------------- criteria

fn zero_law(r: &mut Report) {
    let start = Instant::now();
    let zero = c(0.0, 0.0);
    for family in Family::ALL {
        let sign = if family == Family::NminusA1 { Sign::Minus } else { Sign::Plus };
        for (p, rho) in PAIRS {
            let tag = format!("{family} ({p}, {rho})");
            let finite = gle_finite(family, 0, rho, &exp_law(p), sign).unwrap().lambda;
            r.at_most(&format!("{tag} finite"), finite.abs(), 1e-12);
            let pert = match family {
                Family::KNplus => solve_kn(&exp_law(p), rho, 1e-12).unwrap(),
                Family::NminusK | Family::NminusNplus => solve_continuous(family, &exp_law(p), rho, 1e-10).unwrap(),
                Family::NminusA1 => {
                    let (l1, l2) = nminus_a1_analysis(zero, rho, p, sign).unwrap().perturbative.unwrap();
                    lyap_core::PerturbationResult::new(l1, l2, Default::default())
                }
            };
            r.at_most(&format!("{tag} perturbative"), pert.lambda_expansion(0.0).abs(), 1e-12);
            let mc = estimate_gle(&model(family, p, rho, sign), zero, 1000, 4, 0).unwrap();
            r.at_most(&format!("{tag} mc"), mc.value.abs(), 1e-12);
        }
    }
    r.budget(start, 1.0);
}

fn nieuwenhuizen(r: &mut Report) {
    let start = Instant::now();
    for (p, rho) in PAIRS {
        let first = discrete::lambda1_whittaker(-rho, p).unwrap();
        let second = continuous::lambda1_whittaker(p, rho).unwrap();
        r.close(&format!("({p}, {rho}) first formula at (-rho, p) vs second"), first, second, 1e-8);
        let s = solve_f0_discrete(&exp_law(p), rho, 1e-12).unwrap();
        r.close(
            &format!("({p}, {rho}) discrete solver"),
            lambda1_discrete(&s, rho),
            discrete::lambda1_whittaker(p, rho).unwrap(),
            1e-7,
        );
        let law = exp_law(p);
        let co = ode_coefficient(Family::NminusK, &law, rho).unwrap();
        let f0 = solve_f0_continuous(&co, 1e-10).unwrap();
        r.close(&format!("({p}, {rho}) continuous solver"), lambda1_continuous(&co, &f0), second, 1e-7);
    }
    r.budget(start, 10.0);
}

fn dyson(r: &mut Report) {
    let start = Instant::now();
    let oracle = |p: f64, rho: f64| {
        let x = 2.0 * (rho * p).sqrt();
        bessel_k_integral(0.0, x) / bessel_k_integral(1.0, x) / (rho * p).sqrt()
    };
    for (p, rho) in [(0.2, 0.2), (0.3, 5.0), (1.0, 1.0), (4.0, 0.5), (5.0, 5.0)] {
        let g = solve_continuous(Family::NminusNplus, &exp_law(p), rho, 1e-10).unwrap().gamma;
        r.close(&format!("solver at ({p}, {rho})"), g, oracle(p, rho), 1e-8);
    }
    let m = estimate_gamma(&model(Family::NminusNplus, 1.0, 1.0, Sign::Plus), STEPS, 200, 0).unwrap();
    r.stderr("mc at (1, 1)", m.value, oracle(1.0, 1.0), m.stderr);
    r.budget(start, 60.0);
}

fn test_functions() -> Vec<RationalPair> {
    vec![
        RationalPair {
            plus: Rational { num: vec![c(1.0, 0.0)], den: vec![c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)] },
            minus: Rational { num: vec![c(0.0, 1.0), c(1.0, 0.0)], den: vec![c(3.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)] },
        },
        RationalPair {
            plus: Rational { num: vec![c(0.5, 0.0), c(-1.0, 0.2), c(0.3, 0.0)], den: vec![c(1.0, 1.0), c(0.2, 0.0), c(0.0, 0.0), c(1.0, 0.0)] },
            minus: Rational { num: vec![c(-0.4, 0.0), c(1.0, 0.0)], den: vec![c(2.0, -1.0), c(1.0, 0.0), c(1.0, 0.0)] },
        },
    ]
}

fn casimir(r: &mut Report) {
    const N: usize = 40;
    let start = Instant::now();
    let ells = [c(0.0, 0.0), c(1.0, 0.0), c(0.3, 0.0), c(-0.5, 0.7)];
    for &l in &ells {
        r.at_most(&format!("Fourier Casimir at l = {l}"), casimir_residual(l, N), 1e-12);
        let mut worst = 0.0f64;
        for v in test_functions() {
            for s in [c(0.0, 0.0), c(0.7, 0.0), c(-1.3, 0.25), c(2.2, -0.1)] {
                worst = worst.max(mellin_casimir_residual(l, &v, s));
            }
        }
        r.at_most(&format!("line Casimir at l = {l}"), worst, 1e-12);
    }
    let neg = |m: &CMatrix| m.scale(c(-1.0, 0.0));
    let two = |m: &CMatrix| m.scale(c(2.0, 0.0));
    let mut worst = [0.0f64; 7];
    for &l in &ells {
        let g = |k| generator_discrete(k, l, N).to_dense();
        let (a1, a2, k, np, nm) =
            (g(SubgroupKind::A1), g(SubgroupKind::A2), g(SubgroupKind::K), g(SubgroupKind::Nplus), g(SubgroupKind::Nminus));
        let (j0, jp, jm) = (ladder_matrix(Ladder::J0, l, N), ladder_matrix(Ladder::Jplus, l, N), ladder_matrix(Ladder::Jminus, l, N));
        let res = |m: CMatrix, t: CMatrix| interior_residual(&m, &t, N, 2);
        let v = [
            res(commutator(&j0, &jp), jp.clone()),
            res(commutator(&j0, &jm), neg(&jm)),
            res(commutator(&jp, &jm), neg(&two(&j0))),
            res(commutator(&a1, &np), np.clone()),
            res(commutator(&a1, &nm), neg(&nm)),
            res(commutator(&np, &nm), two(&a1)),
            res(commutator(&a1, &a2), k.clone()),
        ];
        for (w, x) in worst.iter_mut().zip(v) {
            *w = w.max(x);
        }
    }
    let names = ["[J0,J+] = J+", "[J0,J-] = -J-", "[J+,J-] = -2 J0", "[A1,N+] = N+", "[A1,N-] = -N-", "[N+,N-] = 2 A1", "[A1,A2] = K"];
    for (n, w) in names.iter().zip(worst) {
        r.at_most(n, w, 1e-12);
    }
    r.budget(start, 1.0);
}

fn finite_vs_mc(r: &mut Report) {
    let start = Instant::now();
    let finite = gle_finite(Family::KNplus, 1, 1.0, &exp_law(1.0), Sign::Plus).unwrap().lambda;
    let m = estimate_gle(&model(Family::KNplus, 1.0, 1.0, Sign::Plus), c(1.0, 0.0), STEPS, 400, 0).unwrap();
    r.budget(start, 60.0);
    r.stderr("mc Lambda(2)", m.value, finite, m.stderr);
    r.close("finite Lambda(2) vs quadratic-form oracle", finite, lambda2_quadratic_forms(1.0, 1.0), 1e-9);
}

fn moment_truncation(r: &mut Report) {
    let reference = exp_law(1.0);
    // l = 1 needs two moments and a two-point law has room for three.
    // l = 2 needs four, which no two-point law can match, so three points.
    for (ell, points) in [(1u32, 2usize), (2, 3)] {
        let (x, w) = moment_matched_law(points);
        for k in 1..=2 * ell {
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            let fact: f64 = (1..=k).map(f64::from).product();
            r.close(&format!("{points}-point law moment {k}"), m, fact, 1e-12 * fact);
        }
        let atoms = CharacteristicFn::atoms(x, w).unwrap();
        let a = transfer_matrix(Family::NminusK, ell, 1.0, &reference, Sign::Plus).unwrap();
        let b = transfer_matrix(Family::NminusK, ell, 1.0, &atoms, Sign::Plus).unwrap();
        let scale = a.entries.max_abs().max(1.0);
        r.at_most(&format!("l = {ell} transfer matrices"), a.entries.sub(&b.entries).max_abs() / scale, 1e-14);
    }
}

fn green(r: &mut Report) {
    let start = Instant::now();
    let law = exp_law(1.0);
    let s = solve_f0_discrete(&law, 1.0, 1e-12).unwrap();
    let z = zeta_discrete(&s).unwrap();
    let mut worst = 0.0f64;
    for m in 1..=10 {
        let g = green_discrete(&s, &z, &law, 1.0, m).unwrap();
        for n in 1..s.cap {
            let delta = if n == m { 1.0 } else { 0.0 };
            worst = worst.max((apply_a0_minus_identity(&g, &law, 1.0, n) - delta).norm());
        }
    }
    r.at_most("discrete Green residual, m = 1..10", worst, 1e-10);
    let co = ode_coefficient(Family::NminusK, &law, 1.0).unwrap();
    let f0 = solve_f0_continuous(&co, 1e-10).unwrap();
    let zeta = zeta_continuous(&co, &f0, 1e-10).unwrap();
    r.at_most("continuous Wronskian", wronskian_residual(&f0, &zeta), 1e-8);
    r.budget(start, 5.0);
}

fn symmetry(r: &mut Report) {
    let start = Instant::now();
    let m = model(Family::NminusNplus, 1.0, 1.0, Sign::Plus);
    let a = estimate_gle(&m, c(0.25, 0.0), STEPS, 400, 0).unwrap();
    let b = estimate_gle(&m, c(-1.25, 0.0), STEPS, 400, 1).unwrap();
    r.stderr("Lambda(0.5) vs Lambda(-2.5)", a.value, b.value, a.stderr.hypot(b.stderr));
    r.budget(start, 90.0);
}

fn variance(r: &mut Report) {
    let start = Instant::now();
    let mut cases = vec![(Family::KNplus, 1.0, 1.0)];
    cases.extend([0.5, 1.0, 2.0].map(|rho| (Family::NminusK, 0.2, rho)));
    cases.extend([0.5, 1.0, 2.0].map(|rho| (Family::NminusNplus, 1.0, rho)));
    for (family, p, rho) in cases {
        let pert = match family {
            Family::KNplus => solve_kn(&exp_law(p), rho, 1e-12).unwrap(),
            _ => solve_continuous(family, &exp_law(p), rho, 1e-10).unwrap(),
        };
        let from_lambdas = pert.lambda1 * pert.lambda1 / 4.0 - pert.lambda2 / 2.0;
        r.close(&format!("{family} ({p}, {rho}) sigma2 from lambdas"), pert.sigma2, from_lambdas, 0.0);
        let m = estimate_sigma2(&model(family, p, rho, Sign::Plus), STEPS, 400, 0).unwrap();
        r.stderr(&format!("{family} ({p}, {rho}) mc sigma2"), m.value, from_lambdas, m.stderr);
    }
    r.budget(start, 300.0);
}

fn nminus_a1(r: &mut Report) {
    let (ell, rho) = (1.0f64, 2.0f64);
    let exact = -(1.0 - ell / rho).ln();
    r.close("closed form is ln 2", exact, 2f64.ln(), 1e-15);
    for sign in [Sign::Plus, Sign::Minus] {
        let a = nminus_a1_analysis(c(ell, 0.0), rho, 1.0, sign).unwrap();
        r.close(&format!("sign {sign:?} Lambda(2)"), a.lambda.re, exact, 1e-12);
        let f = gle_finite(Family::NminusA1, 1, rho, &exp_law(1.0), sign).unwrap();
        r.close(&format!("sign {sign:?} finite Lambda(2)"), f.lambda, exact, 1e-12);
    }
    let plus = nminus_a1_analysis(c(0.0, 0.0), rho, 1.0, Sign::Plus).unwrap().perturbative;
    r.check(matches!(plus, Err(Error::NoInvariantMeasure(_))), format!("sign + perturbative: {plus:?}"));
    let (l1, l2) = nminus_a1_analysis(c(0.0, 0.0), rho, 1.0, Sign::Minus).unwrap().perturbative.unwrap();
    r.close("sign - lambda1", l1, -1.0 / rho, 1e-10);
    r.close("sign - lambda2", l2, 0.0, 1e-10);
    let m = estimate_gamma(&model(Family::NminusA1, 1.0, rho, Sign::Plus), STEPS, 200, 0).unwrap();
    r.stderr("sign + mc gamma vs 1/(2 rho)", m.value, 0.5 / rho, m.stderr);
}

fn special(r: &mut Report) {
    let start = Instant::now();
    let w = |kappa: Complex64, z: Complex64| whittaker_w(WhittakerParams::new(kappa, c(0.5, 0.0), z).unwrap()).unwrap();
    for z in [c(3.0, 0.0), c(1.0, -2.0)] {
        r.at_most(&format!("W(0, 1/2; {z})"), (w(c(0.0, 0.0), z) - (-0.5 * z).exp()).norm(), 1e-10);
    }
    let mut ode = 0.0f64;
    for (p, rho) in PAIRS {
        let kappa = c(0.0, -rho);
        for s in [0.0, 0.5, 2.0, 5.0] {
            let z = c(2.0 * s, 2.0 * p);
            let h = 2e-3;
            let f = |z: Complex64| w(kappa, z);
            let d2 = (-f(z + 2.0 * h) + 16.0 * f(z + h) - 30.0 * f(z) + 16.0 * f(z - h) - f(z - 2.0 * h)) / (12.0 * h * h);
            ode = ode.max((d2 - (0.25 - kappa / z) * f(z)).norm());
        }
    }
    r.at_most("Whittaker equation residual", ode, 1e-8);
    let mut deriv = 0.0f64;
    for (kappa, z) in [(c(0.0, -1.0), c(0.0, -2.0)), (c(0.0, -0.5), c(1.0, 0.4)), (c(-1.0, 0.0), c(2.0, 1.0))] {
        let p = WhittakerParams::new(kappa, c(0.5, 0.0), z).unwrap();
        let h = 1e-2;
        let f = |z: Complex64| w(kappa, z);
        let fd = (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h);
        deriv = deriv.max((whittaker_w_prime(p).unwrap() - fd).norm());
    }
    r.at_most("derivative identity vs finite differences", deriv, 1e-7);
    r.close("|Gamma(1+i)|^2", lngamma(c(1.0, 1.0)).unwrap().exp().norm_sqr(), PI / PI.sinh(), 1e-12);
    r.close("K0(1) vs series", bessel_k(0, 1.0).unwrap(), bessel_k0_series(1.0), 1e-12);
    r.budget(start, 5.0);
}

fn slope(r: &mut Report) {
    let m = model(Family::NminusK, 0.2, 1.0, Sign::Plus);
    let gamma = -solve_continuous(Family::NminusK, &exp_law(0.2), 1.0, 1e-10).unwrap().lambda1 / 2.0;
    // Lambda(0.1) and Lambda(-0.1) are l = 0.05 and l = -0.05.
    let up = estimate_gle(&m, c(0.05, 0.0), STEPS, 400, 0).unwrap();
    let down = estimate_gle(&m, c(-0.05, 0.0), STEPS, 400, 1).unwrap();
    let d = (up.value - down.value) / 0.2;
    r.stderr("central difference vs gamma", d, gamma, up.stderr.hypot(down.stderr) / 0.2);
}

type Check = fn(&mut Report);

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("zero law", zero_law),
        ("Nieuwenhuizen consistency", nieuwenhuizen),
        ("Dyson closed form", dyson),
        ("Casimir and brackets", casimir),
        ("finite-dim vs MC", finite_vs_mc),
        ("moment truncation", moment_truncation),
        ("Green residuals", green),
        ("symmetry", symmetry),
        ("variance triangulation", variance),
        ("n- a1", nminus_a1),
        ("special functions", special),
        ("perturbative-vs-GLE slope", slope),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|x| x == &n.to_string() || name.contains(x.as_str())) {
            continue;
        }
        let mut report = Report::default();
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| f(&mut report)));
        if let Err(e) = outcome {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            report.failures.push(format!("panicked: {}", msg.unwrap_or_default()));
        }
        let ok = report.failures.is_empty();
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {n:>2} {:<28} {}  ({secs:.1} s)", name, if ok { "PASS" } else { "FAIL" });
        for line in &report.failures {
            println!("           FAIL {line}");
        }
        if !ok {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
