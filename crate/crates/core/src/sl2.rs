//! Arithmetic in `SL(2,R)`, the one-parameter subgroups and the actions of
//! the group on the circle, the projective line and the hyperbola.
//!
//! Matrices act on row vectors from the right: `(x1, x2) g = (a x1 + c x2,
//! b x1 + d x2)` for `g = ((a, b), (c, d))`.

use core::f64::consts::TAU;
use core::ops::Mul;
#[allow(unused_imports)]
use crate::prelude::*;

use crate::error::{Error, Result};

/// Tolerance on `|det g - 1|` accepted by [`GroupElement::new`].
pub const DET_TOL: f64 = 1e-12;

/// A real 2x2 matrix `((a, b), (c, d))` with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds a group element, rejecting entries whose determinant is not 1.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let g = GroupElement { a, b, c, d };
        if !(a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite()) {
            return Err(Error::invalid("non-finite matrix entry"));
        }
        let det = g.det();
        if (det - 1.0).abs() > DET_TOL * (1.0 + g.max_abs_entry().powi(2)) {
            return Err(Error::invalid(alloc::format!(
                "determinant {det} differs from 1"
            )));
        }
        Ok(g)
    }

    /// Builds a matrix without checking the determinant. Used on hot paths
    /// where the entries come from a closed-form product of subgroup
    /// elements.
    #[inline]
    pub const fn from_entries(a: f64, b: f64, c: f64, d: f64) -> Self {
        GroupElement { a, b, c, d }
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    #[inline]
    pub fn inverse(&self) -> Self {
        GroupElement::from_entries(self.d, -self.b, -self.c, self.a)
    }

    #[inline]
    pub fn transpose(&self) -> Self {
        GroupElement::from_entries(self.a, self.c, self.b, self.d)
    }

    /// Rescales by `det^{-1/2}`, projecting round-off drift back onto the
    /// unit-determinant surface.
    pub fn renormalized(&self) -> Self {
        let s = 1.0 / self.det().sqrt();
        GroupElement::from_entries(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// The row vector `x g`.
    #[inline]
    pub fn act_vector(&self, x: [f64; 2]) -> [f64; 2] {
        [
            self.a * x[0] + self.c * x[1],
            self.b * x[0] + self.d * x[1],
        ]
    }

    /// Frobenius norm of the matrix.
    pub fn frobenius(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    #[inline]
    fn mul(self, o: GroupElement) -> GroupElement {
        GroupElement::from_entries(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Products of many factors, renormalising the determinant every
/// [`Self::RENORM_PERIOD`] multiplications.
#[derive(Clone, Debug)]
pub struct ProductAccumulator {
    product: GroupElement,
    count: u64,
}

impl ProductAccumulator {
    pub const RENORM_PERIOD: u64 = 64;

    pub fn new() -> Self {
        ProductAccumulator {
            product: GroupElement::IDENTITY,
            count: 0,
        }
    }

    pub fn push(&mut self, g: GroupElement) {
        self.product = self.product * g;
        self.count += 1;
        if self.count % Self::RENORM_PERIOD == 0 {
            self.product = self.product.renormalized();
        }
    }

    pub fn product(&self) -> GroupElement {
        self.product
    }
}

impl Default for ProductAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

/// The five one-parameter subgroups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubgroupKind {
    K,
    A1,
    A2,
    Nplus,
    Nminus,
}

impl SubgroupKind {
    pub const ALL: [SubgroupKind; 5] = [
        SubgroupKind::K,
        SubgroupKind::A1,
        SubgroupKind::A2,
        SubgroupKind::Nplus,
        SubgroupKind::Nminus,
    ];
}

/// The element of the subgroup `kind` with parameter `t`.
pub fn one_param(kind: SubgroupKind, t: f64) -> Result<GroupElement> {
    if !t.is_finite() {
        return Err(Error::invalid("non-finite subgroup parameter"));
    }
    Ok(one_param_unchecked(kind, t))
}

#[inline]
pub(crate) fn one_param_unchecked(kind: SubgroupKind, t: f64) -> GroupElement {
    match kind {
        SubgroupKind::K => {
            let (s, c) = (0.5 * t).sin_cos();
            GroupElement::from_entries(c, -s, s, c)
        }
        SubgroupKind::A1 => {
            let e = (0.5 * t).exp();
            GroupElement::from_entries(e, 0.0, 0.0, 1.0 / e)
        }
        SubgroupKind::A2 => {
            let (ch, sh) = ((0.5 * t).cosh(), (0.5 * t).sinh());
            GroupElement::from_entries(ch, sh, sh, ch)
        }
        SubgroupKind::Nplus => GroupElement::from_entries(1.0, t, 0.0, 1.0),
        SubgroupKind::Nminus => GroupElement::from_entries(1.0, 0.0, t, 1.0),
    }
}

/// A point of the projective real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProjReal {
    Finite(f64),
    Infinity,
}

/// A point on one of the three curves on which the group acts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint {
    Circle(f64),
    Line(ProjReal),
    Hyperbola(f64),
}

impl BoundaryPoint {
    /// A circle point with the angle reduced to `[0, 2pi)`.
    pub fn circle(theta: f64) -> Self {
        BoundaryPoint::Circle(reduce_angle(theta))
    }

    pub fn hyperbola(x: f64) -> Result<Self> {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::invalid("hyperbola coordinate must be finite and nonzero"));
        }
        Ok(BoundaryPoint::Hyperbola(x))
    }
}

/// Reduces an angle to `[0, 2pi)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta - TAU * (theta / TAU).floor();
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Image of the angle `theta` under `g` and the multiplier `d theta' / d theta`.
pub fn act_circle(theta: f64, g: &GroupElement) -> (f64, f64) {
    let (s, c) = (0.5 * theta).sin_cos();
    let u = g.a * c + g.c * s;
    let v = g.b * c + g.d * s;
    let image = reduce_angle(2.0 * v.atan2(u));
    (image, 1.0 / (u * u + v * v))
}

/// Image of `x` under the fractional linear map of `g` and the multiplier
/// `1/(b x + d)^2`. The multiplier is `+inf` when the image is infinity.
pub fn act_line(x: ProjReal, g: &GroupElement) -> (ProjReal, f64) {
    match x {
        ProjReal::Finite(x) => {
            let den = g.b * x + g.d;
            if den == 0.0 {
                (ProjReal::Infinity, f64::INFINITY)
            } else {
                (ProjReal::Finite((g.a * x + g.c) / den), 1.0 / (den * den))
            }
        }
        ProjReal::Infinity => {
            if g.b == 0.0 {
                (ProjReal::Infinity, 1.0 / (g.d * g.d))
            } else {
                (ProjReal::Finite(g.a / g.b), 0.0)
            }
        }
    }
}

/// Image of `x != 0` on the hyperbola chart and the multiplier
/// `|x / ((a x + c)(b x + d))|`.
pub fn act_hyperbola(x: f64, g: &GroupElement) -> Result<(ProjReal, f64)> {
    if x == 0.0 {
        return Err(Error::invalid("hyperbola coordinate must be nonzero"));
    }
    let num = g.a * x + g.c;
    let den = g.b * x + g.d;
    if num * den == 0.0 {
        return Err(Error::DegenerateOrbit(alloc::format!(
            "x = {x} leaves the hyperbola chart"
        )));
    }
    Ok((ProjReal::Finite(num / den), (x / (num * den)).abs()))
}

/// Applies `g` to any boundary point, returning the image and multiplier.
pub fn act(point: BoundaryPoint, g: &GroupElement) -> Result<(BoundaryPoint, f64)> {
    match point {
        BoundaryPoint::Circle(t) => {
            let (t, s) = act_circle(t, g);
            Ok((BoundaryPoint::Circle(t), s))
        }
        BoundaryPoint::Line(x) => {
            let (x, s) = act_line(x, g);
            Ok((BoundaryPoint::Line(x), s))
        }
        BoundaryPoint::Hyperbola(x) => match act_hyperbola(x, g)? {
            (ProjReal::Finite(y), s) => Ok((BoundaryPoint::Hyperbola(y), s)),
            (ProjReal::Infinity, _) => Err(Error::DegenerateOrbit("image at infinity".into())),
        },
    }
}
