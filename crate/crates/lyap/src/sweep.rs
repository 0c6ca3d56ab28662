//! One-parameter sweeps of `gamma` and `sigma2`.

use lyap_core::montecarlo::Statistic;
use lyap_core::Complex64;
use rayon::prelude::*;

use crate::compute::{evaluate, mc_log_stat, Method, Quantity, Settings};
use crate::model::Model;
use crate::row::{McColumns, ResultRow};
use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    /// The mean `1/rho` of `tau`.
    InvRho,
    Rho,
    /// The inverse mean `p` of `t`.
    P,
    /// The mean `1/p` of `t`.
    InvP,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Spacing {
    Lin,
    Log,
}

impl Axis {
    pub fn apply(self, base: &Model, x: f64) -> Model {
        let mut m = *base;
        match self {
            Axis::InvRho => m.rho = 1.0 / x,
            Axis::Rho => m.rho = x,
            Axis::P => m.dist = base.dist.with_inverse_mean(x),
            Axis::InvP => m.dist = base.dist.with_inverse_mean(1.0 / x),
        }
        m
    }
}

/// Grid of `points` values from `from` to `to`. Equal end points give a
/// single point.
pub fn grid(from: f64, to: f64, points: usize, spacing: Spacing) -> Result<Vec<f64>, Failure> {
    if !(from > 0.0 && to > 0.0 && from.is_finite() && to.is_finite()) {
        return Err(Failure::invalid("sweep range must be positive and finite"));
    }
    if points == 0 {
        return Err(Failure::invalid("a sweep needs at least one point"));
    }
    if from == to || points == 1 {
        return Ok(vec![from]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let u = i as f64 / last;
            match spacing {
                Spacing::Lin => from + (to - from) * u,
                Spacing::Log => (from.ln() + (to.ln() - from.ln()) * u).exp(),
            }
        })
        .collect())
}

/// Indices of `k` evenly spaced grid points, always including both ends
/// when `k >= 2`.
pub fn check_indices(points: usize, k: usize) -> Vec<usize> {
    if k == 0 {
        return Vec::new();
    }
    if k >= points {
        return (0..points).collect();
    }
    if k == 1 {
        return vec![(points - 1) / 2];
    }
    let mut v: Vec<usize> = (0..k)
        .map(|i| ((i * (points - 1)) as f64 / (k - 1) as f64).round() as usize)
        .collect();
    v.dedup();
    v
}

pub struct SweepPoint {
    pub row: ResultRow,
    pub mc: Option<McColumns>,
    pub failure: Option<Failure>,
}

fn mc_columns(model: &Model, s: &Settings) -> McColumns {
    let g = mc_log_stat(model, Statistic::Gamma, s).ok();
    let v = mc_log_stat(model, Statistic::Sigma2, s).ok();
    McColumns {
        gamma: g.map(|e| e.value),
        gamma_stderr: g.map(|e| e.stderr),
        sigma2: v.map(|e| e.value),
        sigma2_stderr: v.map(|e| e.stderr),
    }
}

/// Evaluates every grid point with the perturbative solvers. Points run in
/// parallel and come back in grid order.
pub fn sweep(base: &Model, axis: Axis, xs: &[f64], ell: Complex64, mc_check: usize, s: &Settings) -> Vec<SweepPoint> {
    let checked = check_indices(xs.len(), mc_check);
    xs.par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let model = axis.apply(base, x);
            let e = evaluate(Quantity::Gamma, &model, ell, Method::Perturbative, s);
            let mc = (mc_check > 0).then(|| {
                if checked.contains(&i) {
                    mc_columns(&model, s)
                } else {
                    McColumns::default()
                }
            });
            SweepPoint { row: e.row, mc, failure: e.failure }
        })
        .collect()
}
