//! Monte Carlo estimators at reduced sizes against the deterministic solvers.

use lyap_core::continuous::gamma_dyson;
use lyap_core::discrete::solve_kn;
use lyap_core::finite_dim::gle_finite;
use lyap_core::model::{Family, Sign};
use lyap_core::montecarlo::*;
use lyap_core::{CharacteristicFn, Complex64};

fn exp(p: f64) -> CharacteristicFn {
    CharacteristicFn::exponential(p).unwrap()
}

fn model(family: Family, p: f64, rho: f64) -> ModelSpec {
    ModelSpec::family(family, exp(p), rho, Sign::Plus).unwrap()
}

#[test]
fn gamma_matches_dyson() {
    let e = estimate_gamma(&model(Family::NminusNplus, 1.0, 1.0), 20_000, 50, 11).unwrap();
    let want = gamma_dyson(1.0, 1.0).unwrap();
    assert!((e.value - want).abs() <= 3.0 * e.stderr, "{} ± {} vs {want}", e.value, e.stderr);
}

#[test]
fn start_vector_and_norm_do_not_matter() {
    let m = model(Family::NminusK, 0.5, 1.0);
    let n = 5000;
    for r in 0..5 {
        let a = replica_log_norm_from(&m, n, 3, r, [1.0, 0.0]);
        let b = replica_log_norm_from(&m, n, 3, r, [0.6, -0.8]);
        // Same randomness: the log norms differ by a bounded amount while
        // both grow linearly.
        assert!(a > 0.0 && (a - b).abs() < 10.0, "replica {r}: {a} vs {b}");
    }
    // Max norm against Euclidean norm on the same product.
    let mut rng = replica_rng(3, 0);
    let mut x = [1.0f64, 0.0];
    let (mut l2, mut linf) = (0.0, 0.0);
    for _ in 0..n {
        let y = sample_step(&m, &mut rng).act_vector(x);
        let r2 = y[0].hypot(y[1]);
        let ri = y[0].abs().max(y[1].abs());
        let xi = x[0].abs().max(x[1].abs());
        l2 += r2.ln();
        linf += (ri / xi).ln();
        x = [y[0] / r2, y[1] / r2];
    }
    assert!((l2 - linf).abs() <= 0.5 * 2f64.ln() + 1e-9);
}

#[test]
fn sigma2_matches_discrete_solver() {
    let want = solve_kn(&exp(1.0), 1.0, 1e-12).unwrap().sigma2;
    let e = estimate_sigma2(&model(Family::KNplus, 1.0, 1.0), 10_000, 200, 5).unwrap();
    assert!((e.value - want).abs() <= 3.0 * e.stderr, "{} ± {} vs {want}", e.value, e.stderr);
}

#[test]
fn gle_matches_finite_dim() {
    let want = gle_finite(Family::KNplus, 1, 1.0, &exp(1.0), Sign::Plus).unwrap().lambda;
    let e = estimate_gle(&model(Family::KNplus, 1.0, 1.0), Complex64::new(1.0, 0.0), 20_000, 200, 8).unwrap();
    assert!((e.value - want).abs() <= 3.0 * e.stderr, "{} ± {} vs {want}", e.value, e.stderr);
}

#[test]
fn gle_is_reproducible() {
    let m = model(Family::NminusNplus, 1.0, 1.0);
    let a = estimate_gle(&m, Complex64::new(-1.25, 0.0), 2000, 40, 77).unwrap();
    let b = estimate_gle(&m, Complex64::new(-1.25, 0.0), 2000, 40, 77).unwrap();
    assert_eq!(a, b);
    assert_eq!((a.n_steps, a.n_replicas, a.seed), (2000, 40, 77));
}

#[test]
fn size_validation() {
    let m = model(Family::KNplus, 1.0, 1.0);
    assert!(estimate_gamma(&m, 10, 5, 0).is_err());
    assert!(estimate_sigma2(&m, 20_000, 2, 0).is_err());
    assert!(estimate_gle(&m, Complex64::new(1.0, 0.0), 2000, 3, 0).is_err());
}
