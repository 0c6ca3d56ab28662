//! Evaluation of one quantity for one model by a chosen route.

use lyap_core::continuous::{self, gamma_dyson, nminus_a1_analysis};
use lyap_core::discrete::{self, solve_kn};
use lyap_core::finite_dim::gle_finite;
use lyap_core::model::{Family, Sign};
use lyap_core::montecarlo::{
    estimate_gle, replica_log_norm, summarize_log_norms, validate_sizes, MCEstimate, ModelSpec, Statistic,
};
use lyap_core::{Complex64, PerturbationResult};
use rayon::prelude::*;

use crate::model::{Dist, Model};
use crate::row::{fmt17, fmt_ell, ResultRow};
use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    Gamma,
    Sigma2,
    Gle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Auto,
    Finite,
    Perturbative,
    ClosedForm,
    Mc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Finite => "finite",
            Method::Perturbative => "perturbative",
            Method::ClosedForm => "closed-form",
            Method::Mc => "mc",
        }
    }
}

/// Numerical settings shared by all routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    /// Overrides the perturbative solvers' default tolerances.
    pub tol: Option<f64>,
    pub steps: usize,
    pub replicas: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { tol: None, steps: 100_000, replicas: 400, seed: 0 }
    }
}

const DISCRETE_TOL: f64 = 1e-12;
const CONTINUOUS_TOL: f64 = 1e-10;

fn is_nonnegative_integer(ell: Complex64) -> Option<u32> {
    (ell.im == 0.0 && ell.re >= 0.0 && ell.re.fract() == 0.0 && ell.re <= 64.0).then_some(ell.re as u32)
}

/// `auto` picks the finite-dimensional route for integer `l >= 1`, the
/// perturbative solvers for `gamma` and `sigma2`, and simulation otherwise.
pub fn resolve(method: Method, quantity: Quantity, ell: Complex64) -> Method {
    match (method, quantity) {
        (Method::Auto, Quantity::Gle) => match is_nonnegative_integer(ell) {
            Some(l) if l >= 1 => Method::Finite,
            _ => Method::Mc,
        },
        (Method::Auto, _) => Method::Perturbative,
        (m, _) => m,
    }
}

/// Result of one evaluation: the row and the failure, if any. A row is
/// produced even on failure, carrying whatever was computed.
pub struct Evaluation {
    pub row: ResultRow,
    pub failure: Option<Failure>,
}

fn base_row(model: &Model, ell: Complex64, method: Method) -> ResultRow {
    let p = model.dist.inverse_mean();
    ResultRow {
        model: model.label(),
        family: model.family.name().into(),
        p: p.is_finite().then_some(p),
        rho: Some(model.rho),
        ell: fmt_ell(ell.re, ell.im),
        method: method.name().into(),
        ..ResultRow::default()
    }
}

fn fill_perturbative(row: &mut ResultRow, r: &PerturbationResult) {
    row.lambda1 = Some(r.lambda1);
    row.lambda2 = Some(r.lambda2);
    row.gamma = Some(r.gamma);
    row.sigma2 = Some(r.sigma2);
    let d = &r.diagnostics;
    row.diagnostics = format!("truncation={} residual={}", fmt17(d.truncation), fmt17(d.residual));
    if !d.note.is_empty() {
        row.diagnostics.push_str(&format!(" {}", d.note));
    }
}

/// Perturbative `lambda1`, `lambda2` for any family.
pub fn perturbative(model: &Model, tol: Option<f64>) -> Result<PerturbationResult, Failure> {
    let law = model.dist.law()?;
    match model.family {
        Family::KNplus => Ok(solve_kn(&law, model.rho, tol.unwrap_or(DISCRETE_TOL))?),
        Family::NminusK | Family::NminusNplus => {
            Ok(continuous::solve_continuous(model.family, &law, model.rho, tol.unwrap_or(CONTINUOUS_TOL))?)
        }
        Family::NminusA1 => {
            let a = nminus_a1_analysis(Complex64::new(0.0, 0.0), model.rho, 1.0, model.sign)?;
            let (l1, l2) = a.perturbative?;
            Ok(PerturbationResult::new(l1, l2, Default::default()))
        }
    }
}

fn exponential_rate(dist: &Dist) -> Result<f64, Failure> {
    match dist {
        Dist::Exp { p } => Ok(*p),
        _ => Err(Failure::invalid("this closed form needs an exponential law for t")),
    }
}

/// `Lambda(2l) = -ln(1 - l/rho)` for `n- a1`.
fn a1_lambda(model: &Model, ell: Complex64) -> Result<Complex64, Failure> {
    Ok(nminus_a1_analysis(ell, model.rho, 1.0, model.sign)?.lambda)
}

fn closed_form_gamma(model: &Model) -> Result<f64, Failure> {
    match model.family {
        Family::KNplus => Ok(-discrete::lambda1_whittaker(exponential_rate(&model.dist)?, model.rho)? / 2.0),
        Family::NminusK => Ok(-continuous::lambda1_whittaker(exponential_rate(&model.dist)?, model.rho)? / 2.0),
        Family::NminusNplus => Ok(gamma_dyson(exponential_rate(&model.dist)?, model.rho)?),
        Family::NminusA1 => Ok(1.0 / (2.0 * model.rho)),
    }
}

/// `gamma` or `sigma2` by simulation, with replicas spread over the
/// thread pool. Bit-identical to the serial estimators of the core crate.
pub fn mc_log_stat_spec(spec: &ModelSpec, stat: Statistic, s: &Settings) -> Result<MCEstimate, Failure> {
    validate_sizes(stat, s.steps, s.replicas)?;
    let logs: Vec<f64> = (0..s.replicas as u64)
        .into_par_iter()
        .map(|r| replica_log_norm(spec, s.steps, s.seed, r))
        .collect();
    Ok(summarize_log_norms(stat, &logs, s.steps, s.seed))
}

pub fn mc_log_stat(model: &Model, stat: Statistic, s: &Settings) -> Result<MCEstimate, Failure> {
    mc_log_stat_spec(&model.spec()?, stat, s)
}

fn mc_note(e: &MCEstimate) -> String {
    format!("n_steps={} n_replicas={} seed={}", e.n_steps, e.n_replicas, e.seed)
}

/// Evaluates `quantity` for `model`.
pub fn evaluate(quantity: Quantity, model: &Model, ell: Complex64, method: Method, s: &Settings) -> Evaluation {
    let method = resolve(method, quantity, ell);
    let mut row = base_row(model, ell, method);
    let result = model.validate().and_then(|_| run(quantity, model, ell, method, s, &mut row));
    let failure = result.err();
    if let Some(f) = &failure {
        if !row.diagnostics.is_empty() {
            row.diagnostics.push_str("; ");
        }
        row.diagnostics.push_str(&f.to_string());
        if matches!(f, Failure::NoInvariantMeasure(_)) && row.big_lambda.is_none() && model.family == Family::NminusA1 {
            if let Ok(l) = a1_lambda(model, ell) {
                row.big_lambda = Some(l.re);
            }
        }
    }
    Evaluation { row, failure }
}

fn run(quantity: Quantity, model: &Model, ell: Complex64, method: Method, s: &Settings, row: &mut ResultRow) -> Result<(), Failure> {
    match (quantity, method) {
        (_, Method::Auto) => unreachable!("resolved above"),
        (Quantity::Gamma | Quantity::Sigma2, Method::Perturbative) => {
            let r = perturbative(model, s.tol)?;
            fill_perturbative(row, &r);
            Ok(())
        }
        (Quantity::Gamma, Method::ClosedForm) => {
            let g = closed_form_gamma(model)?;
            row.gamma = Some(g);
            row.lambda1 = Some(-2.0 * g);
            Ok(())
        }
        (Quantity::Sigma2, Method::ClosedForm) => match model.family {
            Family::NminusA1 => {
                row.gamma = Some(1.0 / (2.0 * model.rho));
                row.sigma2 = Some(1.0 / (4.0 * model.rho * model.rho));
                Ok(())
            }
            _ => Err(Failure::invalid("sigma2 has a closed form only for nminus-a1")),
        },
        (Quantity::Gamma, Method::Mc) => {
            let e = mc_log_stat(model, Statistic::Gamma, s)?;
            row.gamma = Some(e.value);
            row.stderr = Some(e.stderr);
            row.diagnostics = mc_note(&e);
            Ok(())
        }
        (Quantity::Sigma2, Method::Mc) => {
            let e = mc_log_stat(model, Statistic::Sigma2, s)?;
            row.sigma2 = Some(e.value);
            row.stderr = Some(e.stderr);
            row.diagnostics = mc_note(&e);
            Ok(())
        }
        (Quantity::Gamma | Quantity::Sigma2, Method::Finite) => {
            Err(Failure::invalid("the finite-dimensional route computes Lambda only; use gle"))
        }
        (Quantity::Gle, Method::Perturbative) => {
            let r = perturbative(model, s.tol)?;
            if ell.im != 0.0 {
                return Err(Failure::invalid("the perturbative expansion needs real l"));
            }
            fill_perturbative(row, &r);
            row.big_lambda = Some(r.lambda_expansion(ell.re));
            row.diagnostics.push_str(" second-order expansion in l");
            Ok(())
        }
        (Quantity::Gle, Method::Finite) => {
            let l = is_nonnegative_integer(ell)
                .ok_or_else(|| Failure::invalid("the finite-dimensional route needs a nonnegative integer l"))?;
            let g = gle_finite(model.family, l, model.rho, &model.dist.law()?, model.sign)?;
            row.big_lambda = Some(g.lambda);
            row.diagnostics = format!(
                "mu={},{} cluster={} complex_leading={}",
                fmt17(g.mu.re),
                fmt17(g.mu.im),
                g.cluster,
                g.complex_leading
            );
            attach_a1_analysis(model, row)
        }
        (Quantity::Gle, Method::ClosedForm) => {
            if model.family != Family::NminusA1 {
                return Err(Failure::invalid("Lambda has a closed form only for nminus-a1"));
            }
            let l = a1_lambda(model, ell)?;
            row.big_lambda = Some(l.re);
            if l.im != 0.0 {
                row.diagnostics = format!("Im Lambda={}", fmt17(l.im));
            }
            attach_a1_analysis(model, row)
        }
        (Quantity::Gle, Method::Mc) => {
            let e = estimate_gle(&model.spec()?, ell, s.steps, s.replicas, s.seed)?;
            row.big_lambda = Some(e.value);
            row.stderr = Some(e.stderr);
            row.diagnostics = mc_note(&e);
            Ok(())
        }
    }
}

/// For `n- a1` the deterministic `Lambda` rows also report the
/// perturbative coefficients, which exist only for the minus sign.
fn attach_a1_analysis(model: &Model, row: &mut ResultRow) -> Result<(), Failure> {
    if model.family != Family::NminusA1 {
        return Ok(());
    }
    match model.sign {
        Sign::Minus => {
            let r = perturbative(model, None)?;
            row.lambda1 = Some(r.lambda1);
            row.lambda2 = Some(r.lambda2);
            row.gamma = Some(r.gamma);
            row.sigma2 = Some(r.sigma2);
            Ok(())
        }
        Sign::Plus => perturbative(model, None).map(|_| ()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(family: Family) -> Model {
        Model { family, dist: Dist::Exp { p: 1.0 }, rho: 1.0, sign: Sign::Plus }
    }

    #[test]
    fn auto_resolution() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(resolve(Method::Auto, Quantity::Gle, one), Method::Finite);
        assert_eq!(resolve(Method::Auto, Quantity::Gle, Complex64::new(0.5, 0.0)), Method::Mc);
        assert_eq!(resolve(Method::Auto, Quantity::Gle, Complex64::new(0.0, 0.0)), Method::Mc);
        assert_eq!(resolve(Method::Auto, Quantity::Gamma, one), Method::Perturbative);
        assert_eq!(resolve(Method::Mc, Quantity::Gamma, one), Method::Mc);
    }

    #[test]
    fn finite_row() {
        let e = evaluate(Quantity::Gle, &model(Family::KNplus), Complex64::new(1.0, 0.0), Method::Auto, &Settings::default());
        assert!(e.failure.is_none());
        assert!((e.row.big_lambda.unwrap() - 0.9624236501192).abs() < 1e-12);
        assert_eq!(e.row.method, "finite");
    }

    #[test]
    fn closed_form_gamma_matches_solvers() {
        for family in [Family::KNplus, Family::NminusK, Family::NminusNplus] {
            let m = model(family);
            let cf = evaluate(Quantity::Gamma, &m, Complex64::new(1.0, 0.0), Method::ClosedForm, &Settings::default());
            let pt = evaluate(Quantity::Gamma, &m, Complex64::new(1.0, 0.0), Method::Perturbative, &Settings::default());
            assert!((cf.row.gamma.unwrap() - pt.row.gamma.unwrap()).abs() < 1e-7, "{family}");
        }
    }

    #[test]
    fn no_invariant_measure_row() {
        let mut m = model(Family::NminusA1);
        m.rho = 2.0;
        let e = evaluate(Quantity::Gle, &m, Complex64::new(1.0, 0.0), Method::Auto, &Settings::default());
        assert_eq!(e.failure.as_ref().map(Failure::exit_code), Some(4));
        assert!((e.row.big_lambda.unwrap() - 2f64.ln()).abs() < 1e-12);
        let g = evaluate(Quantity::Gamma, &m, Complex64::new(1.0, 0.0), Method::Auto, &Settings::default());
        assert_eq!(g.failure.as_ref().map(Failure::exit_code), Some(4));
        assert!((g.row.big_lambda.unwrap() - 2f64.ln()).abs() < 1e-12);
        m.sign = Sign::Minus;
        let e = evaluate(Quantity::Gle, &m, Complex64::new(1.0, 0.0), Method::Auto, &Settings::default());
        assert!(e.failure.is_none());
        assert_eq!((e.row.lambda1, e.row.lambda2), (Some(-0.5), Some(0.0)));
    }

    #[test]
    fn invalid_combinations() {
        let m = model(Family::KNplus);
        let one = Complex64::new(1.0, 0.0);
        for (q, meth, ell) in [
            (Quantity::Gamma, Method::Finite, one),
            (Quantity::Sigma2, Method::ClosedForm, one),
            (Quantity::Gle, Method::Finite, Complex64::new(0.5, 0.0)),
            (Quantity::Gle, Method::ClosedForm, one),
            (Quantity::Gle, Method::Mc, Complex64::new(0.5, 0.5)),
        ] {
            let e = evaluate(q, &m, ell, meth, &Settings::default());
            assert_eq!(e.failure.as_ref().map(Failure::exit_code), Some(2), "{q:?} {meth:?}");
        }
        let bad = Model { rho: -1.0, ..m };
        assert_eq!(evaluate(Quantity::Gamma, &bad, one, Method::Auto, &Settings::default()).failure.unwrap().exit_code(), 2);
    }

    #[test]
    fn threaded_mc_matches_core_estimator() {
        let m = model(Family::NminusNplus);
        let s = Settings { steps: 2000, replicas: 8, seed: 4, tol: None };
        let e = evaluate(Quantity::Gamma, &m, Complex64::new(1.0, 0.0), Method::Mc, &s);
        let core = lyap_core::montecarlo::estimate_gamma(&m.spec().unwrap(), 2000, 8, 4).unwrap();
        assert_eq!((e.row.gamma, e.row.stderr), (Some(core.value), Some(core.stderr)));
    }
}
