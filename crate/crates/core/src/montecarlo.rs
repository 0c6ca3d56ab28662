//! Direct simulation of the random products.
//!
//! Every replica (or walker) draws from its own ChaCha8 stream keyed on
//! `(seed, index)`, so results are bit-identical whatever order replicas
//! are evaluated in. The per-replica kernels are public so that callers
//! with threads can farm them out and reduce with [`summarize_log_norms`].
//!
//! `Lambda(2l)` is estimated by population dynamics: `M` walkers carry
//! unit vectors, each step multiplies every walker by a fresh random
//! matrix, and walkers are resampled in proportion to `|x g|^{2l}`. The
//! log of the mean weight per step, averaged over time, estimates
//! `Lambda(2l)`. A plain average of `|x Pi_n|^{2l}` over independent
//! replicas is dominated by a vanishing fraction of them once `n` is
//! large, whereas resampling keeps the population representative.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::error::{Error, Result};
use crate::law::CharacteristicFn;
use crate::model::{Family, Sign};
use crate::sl2::{one_param_unchecked, GroupElement, SubgroupKind};
use num_complex::Complex64;

/// A random step `g = d(t) e(tau)` with independent parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub first: SubgroupKind,
    pub first_law: CharacteristicFn,
    pub second: SubgroupKind,
    pub second_law: CharacteristicFn,
}

impl ModelSpec {
    /// One of the four families, with `t` from `law` and `tau ~ Exp(rho)`
    /// (negated for `n- a1` with the minus sign).
    pub fn family(family: Family, law: CharacteristicFn, rho: f64, sign: Sign) -> Result<Self> {
        let sign = if family == Family::NminusA1 { sign } else { Sign::Plus };
        let (first, second) = family.factors();
        Ok(ModelSpec {
            first,
            first_law: law,
            second,
            second_law: CharacteristicFn::exponential(sign.value() * rho)?,
        })
    }

    /// Arbitrary pair of subgroups and laws, used for degenerate test models.
    pub fn custom(
        first: SubgroupKind,
        first_law: CharacteristicFn,
        second: SubgroupKind,
        second_law: CharacteristicFn,
    ) -> Self {
        ModelSpec { first, first_law, second, second_law }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_steps: usize,
    pub n_replicas: usize,
    pub seed: u64,
}

/// The generator for replica or walker `index`.
pub fn replica_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `d(t) e(tau)`.
pub fn sample_step<R: Rng + ?Sized>(model: &ModelSpec, rng: &mut R) -> GroupElement {
    let t = model.first_law.sample(rng);
    let tau = model.second_law.sample(rng);
    one_param_unchecked(model.first, t) * one_param_unchecked(model.second, tau)
}

fn norm(x: [f64; 2]) -> f64 {
    x[0].hypot(x[1])
}

/// `ln |x0 Pi_n|` for one replica started at `x0 = (1, 0)`, renormalising
/// the row vector every step.
pub fn replica_log_norm(model: &ModelSpec, n_steps: usize, seed: u64, replica: u64) -> f64 {
    replica_log_norm_from(model, n_steps, seed, replica, [1.0, 0.0])
}

/// As [`replica_log_norm`] with a chosen start vector.
pub fn replica_log_norm_from(model: &ModelSpec, n_steps: usize, seed: u64, replica: u64, x0: [f64; 2]) -> f64 {
    let mut rng = replica_rng(seed, replica);
    let n0 = norm(x0);
    let mut x = [x0[0] / n0, x0[1] / n0];
    let mut acc = 0.0;
    for _ in 0..n_steps {
        let y = sample_step(model, &mut rng).act_vector(x);
        let r = norm(y);
        acc += r.ln();
        x = [y[0] / r, y[1] / r];
    }
    acc
}

fn check_sizes(n_steps: usize, n_replicas: usize, min_steps: usize) -> Result<()> {
    if n_steps < min_steps || n_replicas < 2 {
        return Err(Error::invalid(alloc::format!(
            "need at least {min_steps} steps and 2 replicas"
        )));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)
}

/// Statistic computed from the replica log-norms `ln |x Pi_n|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistic {
    /// `gamma = E ln|x Pi_n| / n`, error `sd / sqrt(R)`.
    Gamma,
    /// `sigma2 = Var ln|x Pi_n| / n`, error by jackknife over replicas.
    Sigma2,
}

/// Reduces per-replica log-norms (in replica order) to an estimate.
pub fn summarize_log_norms(stat: Statistic, logs: &[f64], n_steps: usize, seed: u64) -> MCEstimate {
    let n = n_steps as f64;
    let r = logs.len();
    let (value, stderr) = match stat {
        Statistic::Gamma => {
            let g: Vec<f64> = logs.iter().map(|l| l / n).collect();
            (mean(&g), (sample_variance(&g) / r as f64).sqrt())
        }
        Statistic::Sigma2 => {
            let value = sample_variance(logs) / n;
            let sum: f64 = logs.iter().sum();
            let sum2: f64 = logs.iter().map(|l| l * l).sum();
            let rf = r as f64;
            let loo: Vec<f64> = logs
                .iter()
                .map(|l| {
                    let m = (sum - l) / (rf - 1.0);
                    ((sum2 - l * l) - (rf - 1.0) * m * m) / (rf - 2.0) / n
                })
                .collect();
            let lm = mean(&loo);
            let jk = ((rf - 1.0) / rf * loo.iter().map(|v| (v - lm) * (v - lm)).sum::<f64>()).sqrt();
            (value, jk)
        }
    };
    MCEstimate { value, stderr, n_steps, n_replicas: r, seed }
}

/// The size limits of [`estimate_gamma`] and [`estimate_sigma2`], for
/// callers that evaluate replicas themselves.
pub fn validate_sizes(stat: Statistic, n_steps: usize, n_replicas: usize) -> Result<()> {
    match stat {
        Statistic::Gamma => check_sizes(n_steps, n_replicas, 1000),
        Statistic::Sigma2 => {
            check_sizes(n_steps, n_replicas, 10_000)?;
            if n_replicas < 3 {
                return Err(Error::invalid("the jackknife needs at least 3 replicas"));
            }
            Ok(())
        }
    }
}

fn log_norms(model: &ModelSpec, n_steps: usize, n_replicas: usize, seed: u64) -> Vec<f64> {
    (0..n_replicas as u64)
        .map(|r| replica_log_norm(model, n_steps, seed, r))
        .collect()
}

/// Growth rate `gamma` from `n_replicas` independent products.
pub fn estimate_gamma(model: &ModelSpec, n_steps: usize, n_replicas: usize, seed: u64) -> Result<MCEstimate> {
    validate_sizes(Statistic::Gamma, n_steps, n_replicas)?;
    Ok(summarize_log_norms(Statistic::Gamma, &log_norms(model, n_steps, n_replicas, seed), n_steps, seed))
}

/// Variance `sigma2` of `ln |x Pi_n|` per step.
pub fn estimate_sigma2(model: &ModelSpec, n_steps: usize, n_replicas: usize, seed: u64) -> Result<MCEstimate> {
    validate_sizes(Statistic::Sigma2, n_steps, n_replicas)?;
    Ok(summarize_log_norms(Statistic::Sigma2, &log_norms(model, n_steps, n_replicas, seed), n_steps, seed))
}

/// Number of time blocks for batch-means error bars.
const BATCHES: usize = 32;

/// Generalised Lyapunov exponent `Lambda(2l)` for real `l`, with
/// `n_replicas` walkers.
///
/// The population estimate `ln` of the mean weight is biased downwards by
/// `c / M + O(1 / M^2)` for a population of `M` walkers. A second, independent
/// population of `M / 2` walkers runs alongside and the two are combined as
/// `2 L(M) - L(M / 2)`, which cancels the leading term. The first 2% of the
/// steps are burn-in. The error bar comes from batch means of the combined
/// increments over the remaining time.
///
/// For `l < -1/2` the weights would reward walkers aligned with the
/// contracting direction, which a finite population cannot resolve. With
/// `x` uniform on the circle the change of variables `x -> x A / |x A|`
/// has Jacobian `|x A|^{-2}`, giving
/// `E_x |x A|^{2l} = E_x |x A^{-1}|^{-2l-2}`, so that case is simulated as
/// the product of the inverse steps at `l* = -l - 1 >= -1/2`.
pub fn estimate_gle(model: &ModelSpec, ell: Complex64, n_steps: usize, n_replicas: usize, seed: u64) -> Result<MCEstimate> {
    check_sizes(n_steps, n_replicas, 1000)?;
    if n_replicas < 4 {
        return Err(Error::invalid("the generalised exponent needs at least 4 walkers"));
    }
    if ell.im != 0.0 || !ell.re.is_finite() {
        return Err(Error::invalid("the Monte Carlo estimator needs real l"));
    }
    let l = ell.re;
    if l == 0.0 {
        return Ok(MCEstimate { value: 0.0, stderr: 0.0, n_steps, n_replicas, seed });
    }
    let (exponent, inverse) = if l < -0.5 { (-2.0 * l - 2.0, true) } else { (2.0 * l, false) };
    let full = Population { exponent, inverse, walkers: n_replicas, first_stream: 0, resample_stream: u64::MAX };
    let half = Population {
        walkers: n_replicas / 2,
        first_stream: n_replicas as u64,
        resample_stream: u64::MAX - 1,
        ..full
    };
    let a = full.run(model, n_steps, seed)?;
    let b = half.run(model, n_steps, seed)?;
    let value = 2.0 * a.mean - b.mean;
    let stderr = if a.batches.len() == BATCHES {
        let means: Vec<f64> = a.batches.iter().zip(&b.batches).map(|(x, y)| 2.0 * x - y).collect();
        (sample_variance(&means) / BATCHES as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(MCEstimate { value, stderr, n_steps, n_replicas, seed })
}

#[derive(Clone, Copy)]
struct Population {
    exponent: f64,
    inverse: bool,
    walkers: usize,
    first_stream: u64,
    resample_stream: u64,
}

struct PopulationRun {
    mean: f64,
    batches: Vec<f64>,
}

impl Population {
    fn run(&self, model: &ModelSpec, n_steps: usize, seed: u64) -> Result<PopulationRun> {
        let m = self.walkers;
        let mf = m as f64;
        let mut rngs: Vec<ChaCha8Rng> = (0..m as u64).map(|i| replica_rng(seed, self.first_stream + i)).collect();
        let mut resample_rng = replica_rng(seed, self.resample_stream);
        let mut xs: Vec<[f64; 2]> = if self.inverse {
            (0..m)
                .map(|i| {
                    let th = core::f64::consts::PI * (i as f64 + 0.5) / mf;
                    [th.cos(), th.sin()]
                })
                .collect()
        } else {
            alloc::vec![[1.0, 0.0]; m]
        };
        let mut ys = alloc::vec![[0.0f64; 2]; m];
        let mut w = alloc::vec![0.0f64; m];
        let burn = n_steps / 50;
        let kept = n_steps - burn;
        let per_batch = kept / BATCHES;
        let mut batch = alloc::vec![0.0f64; BATCHES];
        let mut total = 0.0;
        for step in 0..n_steps {
            let mut sum = 0.0;
            let mut max = 0.0f64;
            for i in 0..m {
                let g = sample_step(model, &mut rngs[i]);
                let g = if self.inverse { g.inverse() } else { g };
                let y = g.act_vector(xs[i]);
                let r = norm(y);
                ys[i] = [y[0] / r, y[1] / r];
                let wi = r.powf(self.exponent);
                w[i] = wi;
                sum += wi;
                max = max.max(wi);
            }
            if !(sum > 0.0 && sum.is_finite()) {
                return Err(Error::HeavyTail { max_share: 1.0 });
            }
            if max / sum > 0.5 {
                return Err(Error::HeavyTail { max_share: max / sum });
            }
            let incr = (sum / mf).ln();
            if step >= burn {
                let k = step - burn;
                total += incr;
                if per_batch > 0 && k / per_batch < BATCHES {
                    batch[k / per_batch] += incr;
                }
            }
            // Systematic resampling.
            let u: f64 = resample_rng.random();
            let mut cum = 0.0;
            let mut j = 0;
            for (k, x) in xs.iter_mut().enumerate() {
                let target = (u + k as f64) / mf * sum;
                while j + 1 < m && cum + w[j] <= target {
                    cum += w[j];
                    j += 1;
                }
                *x = ys[j];
            }
        }
        let batches = if per_batch > 0 { batch.iter().map(|b| b / per_batch as f64).collect() } else { Vec::new() };
        Ok(PopulationRun { mean: total / kept as f64, batches })
    }
}
