//! Laws of the random parameters and their characteristic functions.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};

#[allow(unused_imports)]
use crate::prelude::*;
use crate::error::{Error, Result};
use crate::special::elementary::{expm1, log1p};

/// Anything that can be evaluated as a characteristic function
/// `chi(theta) = E exp(i theta t)`.
pub trait Characteristic {
    fn chi(&self, theta: f64) -> Complex64;

    /// `(chi(s) - 1) / s`, with the limit `i E t` at `s = 0`.
    ///
    /// The default implementation divides directly and is inaccurate for
    /// small `s`; closed-form laws override it.
    fn chi_m1_over(&self, s: f64) -> Complex64 {
        (self.chi(s) - 1.0) / s
    }
}

/// Characteristic function supplied as a closure.
pub struct Callback<F>(pub F);

impl<F: Fn(f64) -> Complex64> Characteristic for Callback<F> {
    fn chi(&self, theta: f64) -> Complex64 {
        (self.0)(theta)
    }
}

/// A probability law on the real line with closed-form characteristic
/// function and moments.
#[derive(Clone, Debug, PartialEq)]
pub enum CharacteristicFn {
    /// Point mass at `t0`.
    Dirac { t0: f64 },
    /// Exponential law with density `|p| e^{-|p| t}` on `t > 0` when
    /// `rate = p > 0`. A negative rate is the law of `-t` with `t`
    /// exponential of rate `|p|`, so that in both cases
    /// `chi(theta) = 1 / (1 - i theta / p)`.
    Exponential { rate: f64 },
    /// Gamma law with the given shape and scale.
    Gamma { shape: f64, scale: f64 },
    /// Finitely many atoms with nonnegative weights summing to 1.
    Atoms { points: Vec<f64>, weights: Vec<f64> },
}

impl CharacteristicFn {
    pub fn dirac(t0: f64) -> Result<Self> {
        if !t0.is_finite() {
            return Err(Error::invalid("Dirac location must be finite"));
        }
        Ok(CharacteristicFn::Dirac { t0 })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate == 0.0 {
            return Err(Error::invalid("exponential rate must be finite and nonzero"));
        }
        Ok(CharacteristicFn::Exponential { rate })
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) {
            return Err(Error::invalid("gamma shape and scale must be positive"));
        }
        Ok(CharacteristicFn::Gamma { shape, scale })
    }

    pub fn atoms(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::invalid("atoms need matching, nonempty points and weights"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || points.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("atom weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("atom weights must sum to 1"));
        }
        Ok(CharacteristicFn::Atoms { points, weights })
    }

    /// `E t^i`.
    pub fn moment(&self, i: u32) -> f64 {
        match self {
            CharacteristicFn::Dirac { t0 } => t0.powi(i as i32),
            CharacteristicFn::Exponential { rate } => {
                let mut m = 1.0;
                for j in 1..=i {
                    m *= j as f64 / rate;
                }
                m
            }
            CharacteristicFn::Gamma { shape, scale } => {
                let mut m = 1.0;
                for j in 0..i {
                    m *= (shape + j as f64) * scale;
                }
                m
            }
            CharacteristicFn::Atoms { points, weights } => points
                .iter()
                .zip(weights)
                .map(|(t, w)| w * t.powi(i as i32))
                .sum(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// Whether `chi(theta) -> 0` as `theta -> infinity`.
    pub fn is_absolutely_continuous(&self) -> bool {
        matches!(
            self,
            CharacteristicFn::Exponential { .. } | CharacteristicFn::Gamma { .. }
        )
    }

    /// Draws one variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            CharacteristicFn::Dirac { t0 } => *t0,
            CharacteristicFn::Exponential { rate } => {
                let e = Exp::new(rate.abs()).expect("validated rate").sample(rng);
                if *rate > 0.0 {
                    e
                } else {
                    -e
                }
            }
            CharacteristicFn::Gamma { shape, scale } => Gamma::new(*shape, *scale)
                .expect("validated parameters")
                .sample(rng),
            CharacteristicFn::Atoms { points, weights } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (t, w) in points.iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return *t;
                    }
                }
                *points.last().expect("nonempty")
            }
        }
    }
}

impl Characteristic for CharacteristicFn {
    fn chi(&self, theta: f64) -> Complex64 {
        match self {
            CharacteristicFn::Dirac { t0 } => Complex64::from_polar(1.0, theta * t0),
            CharacteristicFn::Exponential { rate } => {
                Complex64::new(1.0, 0.0) / Complex64::new(1.0, -theta / rate)
            }
            CharacteristicFn::Gamma { shape, scale } => {
                Complex64::new(1.0, -theta * scale).powf(-shape)
            }
            CharacteristicFn::Atoms { points, weights } => points
                .iter()
                .zip(weights)
                .map(|(t, w)| Complex64::from_polar(*w, theta * t))
                .sum(),
        }
    }

    fn chi_m1_over(&self, s: f64) -> Complex64 {
        let i = Complex64::i();
        match self {
            CharacteristicFn::Dirac { t0 } => dirac_m1_over(*t0, s),
            CharacteristicFn::Exponential { rate } => {
                (i / rate) / Complex64::new(1.0, -s / rate)
            }
            CharacteristicFn::Gamma { shape, scale } => {
                if s == 0.0 {
                    return i * (shape * scale);
                }
                let w = -log1p(Complex64::new(0.0, -s * scale)) * *shape;
                expm1(w) / s
            }
            CharacteristicFn::Atoms { points, weights } => points
                .iter()
                .zip(weights)
                .map(|(t, w)| dirac_m1_over(*t, s) * *w)
                .sum(),
        }
    }
}

/// `(e^{i s t0} - 1)/s = i t0 e^{i s t0 / 2} sinc(s t0 / 2)`.
fn dirac_m1_over(t0: f64, s: f64) -> Complex64 {
    let x = 0.5 * s * t0;
    let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    Complex64::new(0.0, t0 * sinc) * Complex64::from_polar(1.0, x)
}
