//! The acceptance battery behind `lyap selftest`.
//!
//! Each criterion produces one or more lines. A criterion passes when none
//! of its lines fails; informational lines never fail.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::time::Instant;

use lyap_core::continuous::{
    self, gamma_dyson, lambda1_continuous, nminus_a1_analysis, ode_coefficient, solve_continuous,
    solve_f0_continuous, wronskian_residual, zeta_continuous,
};
use lyap_core::discrete::{
    self, apply_a0_minus_identity, green_discrete, lambda1_discrete, solve_f0_discrete, solve_kn,
    zeta_discrete,
};
use lyap_core::finite_dim::{gle_finite, transfer_matrix};
use lyap_core::linalg::CMatrix;
use lyap_core::model::{Family, Sign};
use lyap_core::montecarlo::{estimate_gle, MCEstimate, ModelSpec, Statistic};
use lyap_core::representations::{
    casimir_residual, commutator, generator_discrete, interior_residual, ladder_matrix, mellin_casimir_residual,
    Ladder, Rational, RationalPair,
};
use lyap_core::sl2::SubgroupKind;
use lyap_core::special::{bessel_k, lngamma, whittaker_w, whittaker_w_prime, WhittakerParams};
use lyap_core::{CharacteristicFn, Complex64};

use crate::compute::{mc_log_stat_spec, Settings};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "info",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Line {
    pub label: String,
    pub status: Status,
    pub detail: String,
}

impl Line {
    fn info(label: impl Into<String>, detail: impl Into<String>) -> Self {
        Line { label: label.into(), status: Status::Info, detail: detail.into() }
    }

    fn failed(label: impl Into<String>, detail: impl Into<String>) -> Self {
        Line { label: label.into(), status: Status::Fail, detail: detail.into() }
    }

    fn check(label: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Line { label: label.into(), status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
    }

    /// `|got - want| <= tol`.
    fn close(label: impl Into<String>, got: f64, want: f64, tol: f64) -> Self {
        let err = (got - want).abs();
        Line::check(label, err <= tol, format!("{got:.15e} vs {want:.15e}, |diff| {err:.2e} <= {tol:.0e}"))
    }

    fn at_most(label: impl Into<String>, value: f64, tol: f64) -> Self {
        Line::check(label, value <= tol, format!("{value:.2e} <= {tol:.0e}"))
    }

    /// `|a - b| <= 3 sqrt(sa^2 + sb^2)`.
    fn within_stderr(label: impl Into<String>, a: f64, b: f64, sa: f64, sb: f64) -> Self {
        let joint = sa.hypot(sb);
        let z = (a - b) / joint;
        Line::check(label, z.abs() <= 3.0, format!("{a:.6e} vs {b:.6e}, z = {z:+.2}"))
    }
}

type Outcome = Vec<Line>;

pub struct Criterion {
    pub number: usize,
    /// Words matched by `--filter`.
    pub keys: &'static str,
    pub title: &'static str,
    run: fn() -> Outcome,
}

impl Criterion {
    pub fn matches(&self, filter: &str) -> bool {
        let f = filter.to_ascii_lowercase();
        f == self.number.to_string() || self.keys.contains(f.as_str()) || self.title.to_ascii_lowercase().contains(&f)
    }

    pub fn run(&self) -> Outcome {
        (self.run)()
    }
}

pub fn battery() -> Vec<Criterion> {
    vec![
        Criterion { number: 1, keys: "zero-law zero", title: "zero law", run: zero_law },
        Criterion { number: 2, keys: "nieuwenhuizen whittaker", title: "Nieuwenhuizen consistency", run: nieuwenhuizen },
        Criterion { number: 3, keys: "dyson bessel", title: "Dyson closed form", run: dyson },
        Criterion { number: 4, keys: "casimir brackets representations", title: "Casimir and brackets", run: casimir },
        Criterion { number: 5, keys: "finite-mc finite", title: "finite-dimensional vs Monte Carlo", run: finite_vs_mc },
        Criterion { number: 6, keys: "moments truncation", title: "moment truncation", run: moment_truncation },
        Criterion { number: 7, keys: "green wronskian", title: "Green function residuals", run: green },
        Criterion { number: 8, keys: "symmetry", title: "symmetry l <-> -l-1", run: symmetry },
        Criterion { number: 9, keys: "variance sigma2", title: "variance triangulation", run: variance },
        Criterion { number: 10, keys: "nminus-a1 a1 triangular", title: "n- a1 products", run: nminus_a1 },
        Criterion { number: 11, keys: "special functions whittaker bessel gamma", title: "special functions", run: special },
        Criterion { number: 12, keys: "slope derivative", title: "GLE slope at l = 0", run: slope },
    ]
}

pub fn passed(lines: &[Line]) -> bool {
    lines.iter().all(|l| l.status != Status::Fail)
}

/// Runs every criterion matching `filter` and prints the table. Returns
/// whether all of them passed.
pub fn run(filter: Option<&str>, out: &mut dyn Write) -> io::Result<bool> {
    let selected: Vec<Criterion> = battery().into_iter().filter(|c| filter.is_none_or(|f| c.matches(f))).collect();
    if selected.is_empty() {
        writeln!(out, "no criterion matches `{}`", filter.unwrap_or_default())?;
        return Ok(false);
    }
    let mut all = true;
    let mut summary = Vec::new();
    for c in &selected {
        let start = Instant::now();
        let lines = c.run();
        let ok = passed(&lines);
        all &= ok;
        let secs = start.elapsed().as_secs_f64();
        writeln!(out, "{:>2}  {:<36} {}  ({secs:.1} s)", c.number, c.title, if ok { "PASS" } else { "FAIL" })?;
        for l in &lines {
            writeln!(out, "      {}  {:<44} {}", l.status.label(), l.label, l.detail)?;
        }
        out.flush()?;
        summary.push((c.number, ok));
    }
    let failed: Vec<String> = summary.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.to_string()).collect();
    if failed.is_empty() {
        writeln!(out, "all {} criteria passed", summary.len())?;
    } else {
        writeln!(out, "{} of {} criteria failed: {}", failed.len(), summary.len(), failed.join(", "))?;
    }
    Ok(all)
}

const STEPS: usize = 100_000;
const PAIRS: [(f64, f64); 3] = [(0.2, 1.0), (1.0, 1.0), (2.0, 0.5)];

fn exp_law(p: f64) -> CharacteristicFn {
    CharacteristicFn::exponential(p).expect("positive rate")
}

fn spec(family: Family, p: f64, rho: f64, sign: Sign) -> ModelSpec {
    ModelSpec::family(family, exp_law(p), rho, sign).expect("valid model")
}

fn mc(spec: &ModelSpec, stat: Statistic, replicas: usize, seed: u64) -> Result<MCEstimate, String> {
    let s = Settings { tol: None, steps: STEPS, replicas, seed };
    mc_log_stat_spec(spec, stat, &s).map_err(|e| e.to_string())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zero_law() -> Outcome {
    let zero = c(0.0, 0.0);
    let mut lines = Vec::new();
    for family in Family::ALL {
        let mut worst = 0.0f64;
        let mut errors = Vec::new();
        for (p, rho) in PAIRS {
            let sign = if family == Family::NminusA1 { Sign::Minus } else { Sign::Plus };
            match gle_finite(family, 0, rho, &exp_law(p), sign) {
                Ok(g) => worst = worst.max(g.lambda.abs()),
                Err(e) => errors.push(format!("finite: {e}")),
            }
            let pert = match family {
                Family::KNplus => solve_kn(&exp_law(p), rho, 1e-12),
                Family::NminusK | Family::NminusNplus => solve_continuous(family, &exp_law(p), rho, 1e-10),
                Family::NminusA1 => nminus_a1_analysis(zero, rho, p, sign)
                    .and_then(|a| a.perturbative)
                    .map(|(l1, l2)| lyap_core::PerturbationResult::new(l1, l2, Default::default())),
            };
            match pert {
                Ok(r) => worst = worst.max(r.lambda_expansion(0.0).abs()),
                Err(e) => errors.push(format!("perturbative: {e}")),
            }
            match estimate_gle(&spec(family, p, rho, sign), zero, 1000, 4, 0) {
                Ok(m) => worst = worst.max(m.value.abs()),
                Err(e) => errors.push(format!("mc: {e}")),
            }
        }
        let label = format!("{family}: finite, perturbative, mc");
        if errors.is_empty() {
            lines.push(Line::at_most(label, worst, 1e-12));
        } else {
            lines.push(Line::failed(label, errors.join("; ")));
        }
    }
    lines
}

fn nieuwenhuizen() -> Outcome {
    let mut lines = Vec::new();
    for (p, rho) in PAIRS {
        let (Ok(first), Ok(second)) = (discrete::lambda1_whittaker(-rho, p), continuous::lambda1_whittaker(p, rho)) else {
            lines.push(Line::failed(format!("({p}, {rho}) closed forms"), "evaluation failed"));
            continue;
        };
        lines.push(Line::close(format!("({p}, {rho}) discrete form at (-rho, p) vs continuous"), first, second, 1e-8));
        match solve_f0_discrete(&exp_law(p), rho, 1e-12) {
            Ok(s) => lines.push(Line::close(
                format!("({p}, {rho}) discrete solver vs its form"),
                lambda1_discrete(&s, rho),
                discrete::lambda1_whittaker(p, rho).unwrap_or(f64::NAN),
                1e-7,
            )),
            Err(e) => lines.push(Line::failed(format!("({p}, {rho}) discrete solver"), e.to_string())),
        }
        let law = exp_law(p);
        let numeric = ode_coefficient(Family::NminusK, &law, rho)
            .and_then(|co| solve_f0_continuous(&co, 1e-10).map(|f0| lambda1_continuous(&co, &f0)));
        match numeric {
            Ok(l1) => lines.push(Line::close(format!("({p}, {rho}) continuous solver vs its form"), l1, second, 1e-7)),
            Err(e) => lines.push(Line::failed(format!("({p}, {rho}) continuous solver"), e.to_string())),
        }
    }
    lines
}

fn dyson() -> Outcome {
    let mut lines = Vec::new();
    for (p, rho) in [(0.2, 0.2), (0.3, 5.0), (1.0, 1.0), (4.0, 0.5), (5.0, 5.0)] {
        let label = format!("solver vs K0/K1 at p={p} rho={rho}");
        match (solve_continuous(Family::NminusNplus, &exp_law(p), rho, 1e-10), gamma_dyson(p, rho)) {
            (Ok(r), Ok(d)) => lines.push(Line::close(label, r.gamma, d, 1e-8)),
            (r, d) => lines.push(Line::failed(label, format!("{:?} {:?}", r.err(), d.err()))),
        }
    }
    let label = "mc gamma at (1, 1), 200 replicas";
    match (mc(&spec(Family::NminusNplus, 1.0, 1.0, Sign::Plus), Statistic::Gamma, 200, 0), gamma_dyson(1.0, 1.0)) {
        (Ok(m), Ok(d)) => lines.push(Line::within_stderr(label, m.value, d, m.stderr, 0.0)),
        (m, d) => lines.push(Line::failed(label, format!("{:?} {:?}", m.err(), d.err()))),
    }
    lines
}

fn test_functions() -> Vec<RationalPair> {
    vec![
        RationalPair {
            plus: Rational { num: vec![c(1.0, 0.0)], den: vec![c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)] },
            minus: Rational { num: vec![c(0.0, 1.0), c(1.0, 0.0)], den: vec![c(3.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)] },
        },
        RationalPair {
            plus: Rational { num: vec![c(0.5, 0.0), c(-1.0, 0.2), c(0.3, 0.0)], den: vec![c(1.0, 1.0), c(0.2, 0.0), c(0.0, 0.0), c(1.0, 0.0)] },
            minus: Rational { num: vec![c(1.0, 0.0)], den: vec![c(1.0, 0.0)] },
        },
    ]
}

fn casimir() -> Outcome {
    const N: usize = 40;
    let ells = [c(0.0, 0.0), c(1.0, 0.0), c(0.3, 0.0), c(-0.5, 0.7)];
    let mut lines = Vec::new();
    let fourier = ells.iter().map(|&l| casimir_residual(l, N)).fold(0.0, f64::max);
    lines.push(Line::at_most("Fourier basis, interior, N = 40", fourier, 1e-12));
    let mut mellin = 0.0f64;
    for &l in &ells {
        for v in test_functions() {
            for s in [c(0.0, 0.0), c(0.7, 0.0), c(-1.3, 0.25), c(2.2, -0.1)] {
                mellin = mellin.max(mellin_casimir_residual(l, &v, s));
            }
        }
    }
    lines.push(Line::at_most("line realisation, rational functions", mellin, 1e-12));

    let neg = |m: &CMatrix| m.scale(c(-1.0, 0.0));
    let two = |m: &CMatrix| m.scale(c(2.0, 0.0));
    let mut worst = [0.0f64; 9];
    for &l in &ells {
        let g = |k| generator_discrete(k, l, N).to_dense();
        let (a1, a2, k, np, nm) =
            (g(SubgroupKind::A1), g(SubgroupKind::A2), g(SubgroupKind::K), g(SubgroupKind::Nplus), g(SubgroupKind::Nminus));
        let j0 = ladder_matrix(Ladder::J0, l, N);
        let jp = ladder_matrix(Ladder::Jplus, l, N);
        let jm = ladder_matrix(Ladder::Jminus, l, N);
        let r = |m: CMatrix, t: CMatrix| interior_residual(&m, &t, N, 2);
        let vals = [
            r(commutator(&j0, &jp), jp.clone()),
            r(commutator(&j0, &jm), neg(&jm)),
            r(commutator(&jp, &jm), neg(&two(&j0))),
            r(commutator(&a1, &np), np.clone()),
            r(commutator(&a1, &nm), neg(&nm)),
            r(commutator(&np, &nm), two(&a1)),
            r(commutator(&a1, &a2), k.clone()),
            r(commutator(&jp, &jm), two(&j0)),
            r(commutator(&a1, &a2), neg(&k)),
        ];
        for (w, v) in worst.iter_mut().zip(vals) {
            *w = w.max(v);
        }
    }
    let names = ["[J0,J+] = J+", "[J0,J-] = -J-", "[J+,J-] = -2 J0", "[A1,N+] = N+", "[A1,N-] = -N-", "[N+,N-] = 2 A1", "[A1,A2] = K"];
    for (name, w) in names.iter().zip(worst) {
        lines.push(Line::at_most(*name, w, 1e-12));
    }
    lines.push(Line::info("[J+,J-] = 2 J0", format!("residual {:.2e}", worst[7])));
    lines.push(Line::info("[A1,A2] = -K", format!("residual {:.2e}", worst[8])));
    lines
}

fn finite_vs_mc() -> Outcome {
    let label = "k-nplus, exp(1), rho = 1, l = 1, 400 walkers";
    let finite = gle_finite(Family::KNplus, 1, 1.0, &exp_law(1.0), Sign::Plus);
    let sim = estimate_gle(&spec(Family::KNplus, 1.0, 1.0, Sign::Plus), c(1.0, 0.0), STEPS, 400, 0);
    match (finite, sim) {
        (Ok(f), Ok(m)) => vec![Line::within_stderr(label, m.value, f.lambda, m.stderr, 0.0)],
        (f, m) => vec![Line::failed(label, format!("{:?} {:?}", f.err(), m.err()))],
    }
}

/// Gauss-Laguerre nodes and weights with `n` points, from Newton's method
/// on the Laguerre polynomial and `w = x / ((n+1) L_{n+1}(x))^2`.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let laguerre = |k: usize, x: f64| {
        let (mut a, mut b) = (1.0, 1.0 - x);
        if k == 0 {
            return (a, 0.0);
        }
        for j in 1..k {
            let j = j as f64;
            let next = ((2.0 * j + 1.0 - x) * b - j * a) / (j + 1.0);
            a = b;
            b = next;
        }
        // L_k' = k (L_k - L_{k-1}) / x
        (b, k as f64 * (b - a) / x)
    };
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        // Starting guesses from the asymptotic node locations.
        let mut x = if i == 0 {
            3.0 / (1.0 + 2.4 * n as f64)
        } else if i == 1 {
            nodes[0] + 15.0 / (1.0 + 2.5 * n as f64)
        } else {
            let r = i as f64 - 1.0;
            nodes[i - 1] + (1.0 + 2.55 * r) / (1.9 * r) * (nodes[i - 1] - nodes[i - 2])
        };
        for _ in 0..100 {
            let (l, dl) = laguerre(n, x);
            let dx = l / dl;
            x -= dx;
            if dx.abs() < 1e-15 * x.abs() {
                break;
            }
        }
        nodes.push(x);
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let l = laguerre(n + 1, x).0;
            x / ((n + 1) as f64 * l).powi(2)
        })
        .collect();
    (nodes, weights)
}

fn moment_truncation() -> Outcome {
    let mut lines = Vec::new();
    let reference = exp_law(1.0);
    // Two points carry three free parameters, enough for two moments but
    // not four, so l = 2 uses the three-point rule.
    for (ell, points) in [(1u32, 2usize), (2, 3)] {
        let (x, w) = gauss_laguerre(points);
        let label = format!("l = {ell}, {points}-point law with {} equal moments", 2 * points - 1);
        let Ok(atoms) = CharacteristicFn::atoms(x, w) else {
            lines.push(Line::failed(label, "bad atoms"));
            continue;
        };
        match (
            transfer_matrix(Family::NminusK, ell, 1.0, &reference, Sign::Plus),
            transfer_matrix(Family::NminusK, ell, 1.0, &atoms, Sign::Plus),
        ) {
            (Ok(a), Ok(b)) => {
                let scale = a.entries.max_abs().max(1.0);
                lines.push(Line::at_most(label, a.entries.sub(&b.entries).max_abs() / scale, 1e-14));
            }
            (a, b) => lines.push(Line::failed(label, format!("{:?} {:?}", a.err(), b.err()))),
        }
    }
    let (x, w) = gauss_laguerre(2);
    let fourth: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
    lines.push(Line::info("fourth moment of the two-point law", format!("{fourth:.12} (exponential: 24)")));
    lines
}

fn green() -> Outcome {
    let mut lines = Vec::new();
    let law = exp_law(1.0);
    let discrete = solve_f0_discrete(&law, 1.0, 1e-12).and_then(|s| zeta_discrete(&s).map(|z| (s, z)));
    match discrete {
        Ok((s, z)) => {
            let mut worst = 0.0f64;
            for m in 1..=10 {
                match green_discrete(&s, &z, &law, 1.0, m) {
                    Ok(g) => {
                        for n in 1..s.cap {
                            let delta = if n == m { 1.0 } else { 0.0 };
                            worst = worst.max((apply_a0_minus_identity(&g, &law, 1.0, n) - delta).norm());
                        }
                    }
                    Err(_) => worst = f64::INFINITY,
                }
            }
            lines.push(Line::at_most("discrete (A0 - I) G(m, .) = delta_m, m = 1..10", worst, 1e-10));
        }
        Err(e) => lines.push(Line::failed("discrete Green function", e.to_string())),
    }
    let wr = ode_coefficient(Family::NminusK, &law, 1.0).and_then(|co| {
        let f0 = solve_f0_continuous(&co, 1e-10)?;
        let z = zeta_continuous(&co, &f0, 1e-10)?;
        Ok(wronskian_residual(&f0, &z))
    });
    match wr {
        Ok(r) => lines.push(Line::at_most("continuous Wronskian f0 zeta' - f0' zeta = 1", r, 1e-8)),
        Err(e) => lines.push(Line::failed("continuous Wronskian", e.to_string())),
    }
    lines
}

fn symmetry() -> Outcome {
    let model = spec(Family::NminusNplus, 1.0, 1.0, Sign::Plus);
    let a = estimate_gle(&model, c(0.25, 0.0), STEPS, 400, 0);
    let b = estimate_gle(&model, c(-1.25, 0.0), STEPS, 400, 1);
    let label = "n- n+ (1, 1), Lambda(0.5) vs Lambda(-2.5)";
    match (a, b) {
        (Ok(a), Ok(b)) => vec![Line::within_stderr(label, a.value, b.value, a.stderr, b.stderr)],
        (a, b) => vec![Line::failed(label, format!("{:?} {:?}", a.err(), b.err()))],
    }
}

fn variance() -> Outcome {
    let mut cases = vec![(Family::KNplus, 1.0, 1.0)];
    cases.extend([0.5, 1.0, 2.0].map(|r| (Family::NminusK, 0.2, r)));
    cases.extend([0.5, 1.0, 2.0].map(|r| (Family::NminusNplus, 1.0, r)));
    cases
        .into_iter()
        .map(|(family, p, rho)| {
            let label = format!("{family} p={p} rho={rho}");
            let pert = match family {
                Family::KNplus => solve_kn(&exp_law(p), rho, 1e-12),
                _ => solve_continuous(family, &exp_law(p), rho, 1e-10),
            };
            match (pert, mc(&spec(family, p, rho, Sign::Plus), Statistic::Sigma2, 400, 0)) {
                (Ok(r), Ok(m)) => Line::within_stderr(label, m.value, r.sigma2, m.stderr, 0.0),
                (r, m) => Line::failed(label, format!("{:?} {:?}", r.err(), m.err())),
            }
        })
        .collect()
}

fn nminus_a1() -> Outcome {
    let mut lines = Vec::new();
    let rho = 2.0;
    match nminus_a1_analysis(c(1.0, 0.0), rho, 1.0, Sign::Plus) {
        Ok(a) => {
            lines.push(Line::close("Lambda(2) at rho = 2 equals ln 2", a.lambda.re, 2f64.ln(), 1e-12));
            lines.push(Line::check(
                "sign + has no invariant measure",
                matches!(a.perturbative, Err(lyap_core::Error::NoInvariantMeasure(_))),
                format!("{:?}", a.perturbative.err()),
            ));
        }
        Err(e) => lines.push(Line::failed("closed form", e.to_string())),
    }
    match gle_finite(Family::NminusA1, 1, rho, &exp_law(1.0), Sign::Plus) {
        Ok(g) => lines.push(Line::close("finite route at l = 1", g.lambda, 2f64.ln(), 1e-12)),
        Err(e) => lines.push(Line::failed("finite route", e.to_string())),
    }
    match nminus_a1_analysis(c(0.0, 0.0), rho, 1.0, Sign::Minus).and_then(|a| a.perturbative) {
        Ok((l1, l2)) => {
            lines.push(Line::close("sign - lambda1 = -1/rho", l1, -1.0 / rho, 1e-10));
            lines.push(Line::close("sign - lambda2 = 0", l2, 0.0, 1e-10));
        }
        Err(e) => lines.push(Line::failed("sign - perturbative", e.to_string())),
    }
    match mc(&spec(Family::NminusA1, 1.0, rho, Sign::Plus), Statistic::Gamma, 200, 0) {
        Ok(m) => lines.push(Line::within_stderr("sign + mc gamma vs 1/(2 rho)", m.value, 0.5 / rho, m.stderr, 0.0)),
        Err(e) => lines.push(Line::failed("sign + mc gamma", e)),
    }
    lines
}

/// `K_0(x)` from its ascending series.
pub fn bessel_k0_series(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    let q = x * x / 4.0;
    let (mut term, mut harmonic) = (1.0, 0.0);
    let (mut i0, mut tail) = (1.0, 0.0);
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -((x / 2.0).ln() + EULER) * i0 + tail
}

fn special() -> Outcome {
    let mut lines = Vec::new();
    let w = |kappa: Complex64, mu: f64, z: Complex64| {
        WhittakerParams::new(kappa, c(mu, 0.0), z).and_then(whittaker_w).unwrap_or(c(f64::NAN, f64::NAN))
    };
    for z in [c(3.0, 0.0), c(1.0, -2.0)] {
        let exact = (-0.5 * z).exp();
        lines.push(Line::at_most(format!("W(0, 1/2; {z}) = exp(-z/2)"), (w(c(0.0, 0.0), 0.5, z) - exact).norm(), 1e-10));
    }
    let mut ode = 0.0f64;
    for (p, rho) in PAIRS {
        let kappa = c(0.0, -rho);
        for s in [0.0, 0.5, 2.0, 5.0] {
            let z = c(2.0 * s, 2.0 * p);
            let h = 2e-3;
            let f = |z: Complex64| w(kappa, 0.5, z);
            let d2 = (-f(z + 2.0 * h) + 16.0 * f(z + h) - 30.0 * f(z) + 16.0 * f(z - h) - f(z - 2.0 * h)) / (12.0 * h * h);
            let q = 0.25 - kappa / z;
            ode = ode.max((d2 - q * f(z)).norm());
        }
    }
    lines.push(Line::at_most("Whittaker equation residual", ode, 1e-8));
    let deriv = WhittakerParams::new(c(0.0, -1.0), c(0.5, 0.0), c(0.0, -2.0)).and_then(|p| {
        let h = 1e-2;
        let f = |z: Complex64| w(p.kappa, 0.5, z);
        let fd = (-f(p.z + 2.0 * h) + 8.0 * f(p.z + h) - 8.0 * f(p.z - h) + f(p.z - 2.0 * h)) / (12.0 * h);
        Ok((whittaker_w_prime(p)? - fd).norm())
    });
    match deriv {
        Ok(d) => lines.push(Line::at_most("derivative identity vs finite differences", d, 1e-7)),
        Err(e) => lines.push(Line::failed("derivative identity", e.to_string())),
    }
    match lngamma(c(1.0, 1.0)) {
        Ok(lg) => lines.push(Line::close("|Gamma(1+i)|^2 = pi / sinh pi", lg.exp().norm_sqr(), PI / PI.sinh(), 1e-12)),
        Err(e) => lines.push(Line::failed("|Gamma(1+i)|^2", e.to_string())),
    }
    match bessel_k(0, 1.0) {
        Ok(k) => lines.push(Line::close("K0(1) vs ascending series", k, bessel_k0_series(1.0), 1e-12)),
        Err(e) => lines.push(Line::failed("K0(1)", e.to_string())),
    }
    lines
}

fn slope() -> Outcome {
    let model = spec(Family::NminusK, 0.2, 1.0, Sign::Plus);
    let gamma = match solve_continuous(Family::NminusK, &exp_law(0.2), 1.0, 1e-10) {
        Ok(r) => r.gamma,
        Err(e) => return vec![Line::failed("perturbative gamma", e.to_string())],
    };
    let difference = |h: f64, seed: u64| -> Result<(f64, f64), lyap_core::Error> {
        let up = estimate_gle(&model, c(h, 0.0), STEPS, 400, seed)?;
        let down = estimate_gle(&model, c(-h, 0.0), STEPS, 400, seed + 1)?;
        Ok(((up.value - down.value) / (4.0 * h), up.stderr.hypot(down.stderr) / (4.0 * h)))
    };
    let mut lines = Vec::new();
    // Lambda(2l) has slope 2 gamma in l, so the difference over 2l = +-0.1
    // divided by 0.2 estimates gamma.
    let fine = difference(0.05, 0);
    match fine {
        Ok((d, s)) => lines.push(Line::within_stderr("n- k (0.2, 1), central difference, 2l = +-0.1", d, gamma, s, 0.0)),
        Err(ref e) => lines.push(Line::failed("central difference", e.to_string())),
    }
    if let (Ok((d1, s1)), Ok((d2, s2))) = (fine, difference(0.1, 2)) {
        let extrapolated = (4.0 * d1 - d2) / 3.0;
        let s = (16.0 * s1 * s1 + s2 * s2).sqrt() / 3.0;
        lines.push(Line::info(
            "with the step-size error extrapolated away",
            format!("{extrapolated:.6e} vs {gamma:.6e}, z = {:+.2}", (extrapolated - gamma) / s),
        ));
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_rules_integrate_polynomials() {
        for n in 1..=6 {
            let (x, w) = gauss_laguerre(n);
            let mut fact = 1.0;
            for k in 0..2 * n {
                if k > 0 {
                    fact *= k as f64;
                }
                let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((m - fact).abs() < 1e-11 * fact, "n={n} k={k}: {m}");
            }
        }
        let (x, _) = gauss_laguerre(2);
        assert!((x[0] - (2.0 - 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn k0_series() {
        // K0(1) and K0(0.1) to 16 digits.
        assert!((bessel_k0_series(1.0) - 0.421_024_438_240_708_3).abs() < 1e-15);
        assert!((bessel_k0_series(0.1) - 2.427_069_024_702_017).abs() < 1e-14);
    }

    #[test]
    fn filters() {
        let b = battery();
        let pick = |f: &str| b.iter().filter(|c| c.matches(f)).map(|c| c.number).collect::<Vec<_>>();
        assert_eq!(pick("casimir"), vec![4]);
        assert_eq!(pick("12"), vec![12]);
        assert_eq!(pick("Dyson"), vec![3]);
    }

    #[test]
    fn fast_criteria_pass() {
        for c in battery().iter().filter(|c| [1, 2, 4, 6, 7, 11].contains(&c.number)) {
            let lines = c.run();
            let failed: Vec<&str> = lines.iter().filter(|l| l.status == Status::Fail).map(|l| l.label.as_str()).collect();
            // The two literal bracket signs disagree with the generator
            // tables; everything else must hold.
            let expected: &[&str] = if c.number == 4 { &["[J+,J-] = -2 J0", "[A1,A2] = K"] } else { &[] };
            assert_eq!(failed, expected, "{}: {lines:?}", c.title);
        }
    }
}
