//! Infinitesimal generators of the representations `T_l`, realised on
//! coefficient sequences `v(n)` of the discrete Fourier basis `e_{l,n}` and
//! on pairs of functions `(v+, v-)` of the Mellin variable.
//!
//! In the discrete realisation every generator is tridiagonal:
//! `(S v)(n) = up(n) v(n+1) + diag(n) v(n) + down(n) v(n-1)`.
//! Identities between compositions hold exactly on the full space and are
//! checked only on basis vectors far enough from the truncation edge.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::sl2::SubgroupKind;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A tridiagonal operator on sequences indexed by `n = -N..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedOperator {
    pub halfwidth: usize,
    pub ell: Complex64,
    /// Coefficient of `v(n-1)` in row `n`, stored at `n + N`.
    pub down: Vec<Complex64>,
    /// Coefficient of `v(n)` in row `n`.
    pub diag: Vec<Complex64>,
    /// Coefficient of `v(n+1)` in row `n`.
    pub up: Vec<Complex64>,
}

impl BandedOperator {
    fn from_rows(
        halfwidth: usize,
        ell: Complex64,
        mut row: impl FnMut(f64) -> (Complex64, Complex64, Complex64),
    ) -> Self {
        let len = 2 * halfwidth + 1;
        let mut op = BandedOperator {
            halfwidth,
            ell,
            down: Vec::with_capacity(len),
            diag: Vec::with_capacity(len),
            up: Vec::with_capacity(len),
        };
        for k in 0..len {
            let n = k as f64 - halfwidth as f64;
            let (d, m, u) = row(n);
            op.down.push(d);
            op.diag.push(m);
            op.up.push(u);
        }
        op
    }

    /// Number of basis indices, `2N + 1`.
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// The row coefficients `(down, diag, up)` of index `n`.
    pub fn row(&self, n: i64) -> (Complex64, Complex64, Complex64) {
        let k = (n + self.halfwidth as i64) as usize;
        (self.down[k], self.diag[k], self.up[k])
    }

    /// Applies the operator to a coefficient vector indexed `-N..=N`,
    /// treating entries outside the range as zero.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let len = self.len();
        assert_eq!(v.len(), len);
        (0..len)
            .map(|k| {
                let mut s = self.diag[k] * v[k];
                if k + 1 < len {
                    s += self.up[k] * v[k + 1];
                }
                if k > 0 {
                    s += self.down[k] * v[k - 1];
                }
                s
            })
            .collect()
    }

    /// Dense matrix `M` with `(S v) = M v`.
    pub fn to_dense(&self) -> CMatrix {
        let len = self.len();
        let mut m = CMatrix::zeros(len, len);
        for k in 0..len {
            m[(k, k)] = self.diag[k];
            if k + 1 < len {
                m[(k, k + 1)] = self.up[k];
            }
            if k > 0 {
                m[(k, k - 1)] = self.down[k];
            }
        }
        m
    }
}

/// The generator of the subgroup `kind` in the discrete Fourier realisation
/// of `T_l`, truncated to `|n| <= N`.
pub fn generator_discrete(kind: SubgroupKind, ell: Complex64, halfwidth: usize) -> BandedOperator {
    let i = Complex64::i();
    BandedOperator::from_rows(halfwidth, ell, |n| {
        let up = ell + n + 1.0;
        let down = ell - n + 1.0;
        let zero = c(0.0, 0.0);
        match kind {
            SubgroupKind::K => (zero, c(0.0, -n), zero),
            SubgroupKind::A1 => (down * 0.5, zero, up * 0.5),
            SubgroupKind::A2 => (-i * 0.5 * down, zero, i * 0.5 * up),
            SubgroupKind::Nplus => (-i * 0.5 * down, c(0.0, n), i * 0.5 * up),
            SubgroupKind::Nminus => (-i * 0.5 * down, c(0.0, -n), i * 0.5 * up),
        }
    })
}

/// Dense restriction of a generator to the block `|n| <= l` for integer `l`.
pub fn generator_block(kind: SubgroupKind, ell: u32) -> CMatrix {
    generator_discrete(kind, c(ell as f64, 0.0), ell as usize).to_dense()
}

/// The ladder operators `J0 = iK`, `J+ = A1 + i A2`, `J- = A1 - i A2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    J0,
    Jplus,
    Jminus,
}

/// A basis vector `e_{l,n}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderIndex {
    pub ell: Complex64,
    pub n: i64,
}

/// The image of `e_{l,n}` under a ladder operator, as `(coefficient, n')`
/// with `J e_{l,n} = coefficient * e_{l,n'}`.
pub fn ladder_coeff(which: Ladder, idx: LadderIndex) -> (Complex64, i64) {
    let n = idx.n as f64;
    match which {
        Ladder::J0 => (c(n, 0.0), idx.n),
        Ladder::Jplus => (idx.ell - n, idx.n + 1),
        Ladder::Jminus => (idx.ell + n, idx.n - 1),
    }
}

/// Dense matrix of a ladder operator assembled column by column from
/// [`ladder_coeff`], truncated to `|n| <= N`.
pub fn ladder_matrix(which: Ladder, ell: Complex64, halfwidth: usize) -> CMatrix {
    let len = 2 * halfwidth + 1;
    let h = halfwidth as i64;
    let mut m = CMatrix::zeros(len, len);
    for col in 0..len {
        let n = col as i64 - h;
        let (coef, target) = ladder_coeff(which, LadderIndex { ell, n });
        if target.abs() <= h {
            m[((target + h) as usize, col)] = coef;
        }
    }
    m
}

/// `AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    (a * b).sub(&(b * a))
}

/// Largest entry of `m - target` over the columns `e_n` with
/// `|n| <= N + 1 - order`, where truncation cannot reach after `order`
/// tridiagonal factors.
pub fn interior_residual(m: &CMatrix, target: &CMatrix, halfwidth: usize, order: usize) -> f64 {
    let len = 2 * halfwidth + 1;
    let margin = order.saturating_sub(1);
    let mut worst = 0.0f64;
    for col in margin..len - margin {
        for row in 0..len {
            worst = worst.max((m[(row, col)] - target[(row, col)]).norm());
        }
    }
    worst
}

/// The Casimir element `A1^2 + A2^2 - K^2` on the truncated space.
pub fn casimir_discrete(ell: Complex64, halfwidth: usize) -> CMatrix {
    let a1 = generator_discrete(SubgroupKind::A1, ell, halfwidth).to_dense();
    let a2 = generator_discrete(SubgroupKind::A2, ell, halfwidth).to_dense();
    let k = generator_discrete(SubgroupKind::K, ell, halfwidth).to_dense();
    (&a1 * &a1).add(&(&a2 * &a2)).sub(&(&k * &k))
}

/// `max |(C - l(l+1)) e_n|` over interior basis vectors.
pub fn casimir_residual(ell: Complex64, halfwidth: usize) -> f64 {
    let cas = casimir_discrete(ell, halfwidth);
    let target = CMatrix::identity(2 * halfwidth + 1).scale(ell * (ell + 1.0));
    interior_residual(&cas, &target, halfwidth, 2)
}

/// The adjoint index `l* = -conj(l) - 1`.
pub fn adjoint_index(ell: Complex64) -> Complex64 {
    -ell.conj() - 1.0
}

/// `max |<S(l*) f, v> + <f, S(l) v>|` over basis pairs, for the pairing
/// `<f, v> = sum conj(f(n)) v(n)`.
pub fn adjoint_check(kind: SubgroupKind, ell: Complex64, halfwidth: usize) -> f64 {
    let s = generator_discrete(kind, ell, halfwidth).to_dense();
    let s_star = generator_discrete(kind, adjoint_index(ell), halfwidth).to_dense();
    let len = 2 * halfwidth + 1;
    let mut worst = 0.0f64;
    // <S* e_a, e_b> = conj(S*[b][a]),  <e_a, S e_b> = S[a][b]
    for a in 0..len {
        for b in 0..len {
            worst = worst.max((s_star[(b, a)].conj() + s[(a, b)]).norm());
        }
    }
    worst
}

/// Branch of the holomorphic quotient: `n > l` or `n < -l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> i64 {
        match self {
            Branch::Plus => 1,
            Branch::Minus => -1,
        }
    }
}

/// `Gamma(l + 1 + m) / Gamma(-l + m)` with `m = +n` or `-n` by branch,
/// the weight making the generators skew-symmetric on the branch.
pub fn holomorphic_weight(ell: u32, n: i64, branch: Branch) -> Result<f64> {
    let m = branch.sign() * n;
    let l = ell as i64;
    if m <= l {
        return Err(Error::invalid(alloc::format!(
            "index {n} lies inside the finite-dimensional block of l = {ell}"
        )));
    }
    // Gamma(l+1+m)/Gamma(m-l) = (m-l)(m-l+1)...(m+l), exactly.
    Ok((m - l..=m + l).map(|k| k as f64).product())
}

/// Relative skew-symmetry defect `|<S f, v> + <f, S v>|` of a generator
/// under the weighted inner product on one holomorphic branch, maximised
/// over basis pairs with `l < +-n <= N - 1`.
pub fn skew_symmetry_residual(kind: SubgroupKind, ell: u32, halfwidth: usize, branch: Branch) -> f64 {
    let s = generator_discrete(kind, c(ell as f64, 0.0), halfwidth).to_dense();
    let h = halfwidth as i64;
    let idx: Vec<i64> = (-(h - 1)..=h - 1)
        .filter(|n| branch.sign() * n > ell as i64)
        .collect();
    let mut worst = 0.0f64;
    for &a in &idx {
        for &b in &idx {
            let (ka, kb) = ((a + h) as usize, (b + h) as usize);
            let wa = holomorphic_weight(ell, a, branch).expect("branch index");
            let wb = holomorphic_weight(ell, b, branch).expect("branch index");
            let lhs = s[(kb, ka)].conj() * wb;
            let rhs = s[(ka, kb)] * wa;
            let scale = lhs.norm() + rhs.norm();
            if scale > 0.0 {
                worst = worst.max((lhs + rhs).norm() / scale);
            }
        }
    }
    worst
}

/// Largest entry of a generator's block coupling `|n| <= l` to `|n| > l`.
pub fn invariant_block_leak(kind: SubgroupKind, ell: u32, halfwidth: usize) -> f64 {
    let s = generator_discrete(kind, c(ell as f64, 0.0), halfwidth).to_dense();
    let h = halfwidth as i64;
    let l = ell as i64;
    let mut worst = 0.0f64;
    for col in -l..=l {
        for row in -h..=h {
            if row.abs() > l {
                worst = worst.max(s[((row + h) as usize, (col + h) as usize)].norm());
            }
        }
    }
    worst
}

/// A pair of functions `(v+, v-)` of the Mellin variable.
pub trait MellinFn {
    fn eval(&self, s: Complex64) -> (Complex64, Complex64);
}

/// A rational function `num(s) / den(s)` with coefficients in increasing
/// powers of `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

impl Rational {
    pub fn eval(&self, s: Complex64) -> Complex64 {
        horner(&self.num, s) / horner(&self.den, s)
    }
}

fn horner(p: &[Complex64], s: Complex64) -> Complex64 {
    p.iter().rev().fold(c(0.0, 0.0), |acc, a| acc * s + a)
}

/// A Mellin test pair built from two rational functions.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalPair {
    pub plus: Rational,
    pub minus: Rational,
}

impl MellinFn for RationalPair {
    fn eval(&self, s: Complex64) -> (Complex64, Complex64) {
        (self.plus.eval(s), self.minus.eval(s))
    }
}

/// A generator in the Mellin realisation of `T_l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MellinOperator {
    pub kind: SubgroupKind,
    pub ell: Complex64,
}

impl MellinOperator {
    pub fn new(kind: SubgroupKind, ell: Complex64) -> Self {
        MellinOperator { kind, ell }
    }

    /// The image `S v` as a new Mellin function, for composing operators.
    pub fn of<'a>(&self, v: &'a dyn MellinFn) -> Applied<'a> {
        Applied { op: *self, inner: v }
    }
}

/// `(S v)(s)` for the Mellin generator `S`, reading `v(s)` and `v(s +- i)`.
pub fn mellin_apply(op: &MellinOperator, v: &dyn MellinFn, s: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let l1 = op.ell + 1.0;
    let minus_is = l1 - i * s; // l + 1 - i s
    let plus_is = l1 + i * s; // l + 1 + i s
    match op.kind {
        SubgroupKind::A1 => {
            let (p, m) = v.eval(s);
            (-i * s * p, -i * s * m)
        }
        SubgroupKind::K => {
            let (pu, mu) = v.eval(s + i);
            let (pd, md) = v.eval(s - i);
            (
                0.5 * minus_is * pu - 0.5 * plus_is * pd,
                -0.5 * minus_is * mu + 0.5 * plus_is * md,
            )
        }
        SubgroupKind::A2 => {
            let (pu, mu) = v.eval(s + i);
            let (pd, md) = v.eval(s - i);
            (
                0.5 * minus_is * pu + 0.5 * plus_is * pd,
                -0.5 * minus_is * mu - 0.5 * plus_is * md,
            )
        }
        SubgroupKind::Nplus => {
            let (pd, md) = v.eval(s - i);
            (plus_is * pd, -plus_is * md)
        }
        SubgroupKind::Nminus => {
            let (pu, mu) = v.eval(s + i);
            (minus_is * pu, -minus_is * mu)
        }
    }
}

/// A Mellin operator applied to a function, itself a Mellin function.
pub struct Applied<'a> {
    op: MellinOperator,
    inner: &'a dyn MellinFn,
}

impl MellinFn for Applied<'_> {
    fn eval(&self, s: Complex64) -> (Complex64, Complex64) {
        mellin_apply(&self.op, self.inner, s)
    }
}

/// Linear combination `sum c_k (S_k1 S_k2 ... v)` of words in Mellin
/// generators, evaluated pointwise. Each word lists operators left to
/// right, so `[A, B]` means `A(B v)`.
pub fn mellin_word_sum(
    words: &[(Complex64, &[MellinOperator])],
    v: &dyn MellinFn,
    s: Complex64,
) -> (Complex64, Complex64) {
    let mut acc = (c(0.0, 0.0), c(0.0, 0.0));
    for (coef, word) in words {
        let mut f: Box<dyn MellinFn + '_> = Box::new(Identity(v));
        for op in word.iter().rev() {
            f = Box::new(Owned { op: *op, inner: f });
        }
        let (p, m) = f.eval(s);
        acc.0 += coef * p;
        acc.1 += coef * m;
    }
    acc
}

struct Identity<'a>(&'a dyn MellinFn);

impl MellinFn for Identity<'_> {
    fn eval(&self, s: Complex64) -> (Complex64, Complex64) {
        self.0.eval(s)
    }
}

struct Owned<'a> {
    op: MellinOperator,
    inner: Box<dyn MellinFn + 'a>,
}

impl MellinFn for Owned<'_> {
    fn eval(&self, s: Complex64) -> (Complex64, Complex64) {
        mellin_apply(&self.op, self.inner.as_ref(), s)
    }
}

/// Pointwise Casimir defect `|(A1^2 + A2^2 - K^2) v - l(l+1) v|` in the
/// Mellin realisation.
pub fn mellin_casimir_residual(ell: Complex64, v: &dyn MellinFn, s: Complex64) -> f64 {
    let a1 = MellinOperator::new(SubgroupKind::A1, ell);
    let a2 = MellinOperator::new(SubgroupKind::A2, ell);
    let k = MellinOperator::new(SubgroupKind::K, ell);
    let one = c(1.0, 0.0);
    let (p, m) = mellin_word_sum(&[(one, &[a1, a1]), (one, &[a2, a2]), (-one, &[k, k])], v, s);
    let (vp, vm) = v.eval(s);
    let lam = ell * (ell + 1.0);
    (p - lam * vp).norm().max((m - lam * vm).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn table_rows() {
        let k = generator_discrete(SubgroupKind::K, c(0.3, 0.0), 4);
        assert_eq!(k.row(3), (c(0.0, 0.0), c(0.0, -3.0), c(0.0, 0.0)));
        let a1 = generator_discrete(SubgroupKind::A1, c(0.0, 0.0), 3);
        assert_eq!(a1.row(0), (c(0.5, 0.0), c(0.0, 0.0), c(0.5, 0.0)));
        let np = generator_discrete(SubgroupKind::Nplus, c(1.0, 0.0), 3);
        assert_eq!(np.row(1), (c(0.0, -0.5), c(0.0, 1.0), c(0.0, 1.5)));
    }

    #[test]
    fn apply_widens_support_by_one() {
        let op = generator_discrete(SubgroupKind::A2, c(0.7, 0.2), 5);
        let mut v = vec![c(0.0, 0.0); op.len()];
        v[5] = c(1.0, 0.0);
        let w = op.apply(&v);
        for (k, x) in w.iter().enumerate() {
            if !(4..=6).contains(&k) {
                assert_eq!(*x, c(0.0, 0.0));
            }
        }
        assert_eq!(op.to_dense().mul_vec(&v), w);
    }

    #[test]
    fn ladder_examples() {
        let (v, n) = ladder_coeff(Ladder::Jplus, LadderIndex { ell: c(2.0, 0.0), n: 1 });
        assert_eq!((v, n), (c(1.0, 0.0), 2));
        let (v, n) = ladder_coeff(Ladder::Jminus, LadderIndex { ell: c(3.0, 0.0), n: -3 });
        assert_eq!((v, n), (c(0.0, 0.0), -4));
        let (v, n) = ladder_coeff(Ladder::J0, LadderIndex { ell: c(-0.5, 0.7), n: 5 });
        assert_eq!((v, n), (c(5.0, 0.0), 5));
    }

    #[test]
    fn ladder_operators_from_generators() {
        let ell = c(0.3, -0.4);
        let h = 6;
        let i = Complex64::i();
        let a1 = generator_discrete(SubgroupKind::A1, ell, h).to_dense();
        let a2 = generator_discrete(SubgroupKind::A2, ell, h).to_dense();
        let k = generator_discrete(SubgroupKind::K, ell, h).to_dense();
        let jp = a1.add(&a2.scale(i));
        let jm = a1.sub(&a2.scale(i));
        assert!(jp.sub(&ladder_matrix(Ladder::Jplus, ell, h)).max_abs() < 1e-15);
        assert!(jm.sub(&ladder_matrix(Ladder::Jminus, ell, h)).max_abs() < 1e-15);
        assert!(k.scale(i).sub(&ladder_matrix(Ladder::J0, ell, h)).max_abs() < 1e-15);
    }

    #[test]
    fn casimir_examples() {
        assert!(casimir_residual(c(0.0, 0.0), 10) < 1e-13);
        assert!(casimir_residual(c(1.0, 0.0), 10) < 1e-13);
        let ell = c(-0.5, 0.7);
        assert!(((ell * (ell + 1.0)) - c(-0.74, 0.0)).norm() < 1e-15);
        assert!(casimir_residual(ell, 10) < 1e-13);
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint_check(SubgroupKind::K, c(0.3, 0.9), 6), 0.0);
        assert!(adjoint_check(SubgroupKind::Nplus, c(0.3, 0.0), 6) < 1e-12);
        assert!(adjoint_check(SubgroupKind::A2, c(-0.5, 0.7), 6) < 1e-12);
    }

    #[test]
    fn holomorphic_weight_examples() {
        assert_eq!(holomorphic_weight(0, 1, Branch::Plus).unwrap(), 1.0);
        assert_eq!(holomorphic_weight(1, 2, Branch::Plus).unwrap(), 6.0);
        assert_eq!(holomorphic_weight(0, -1, Branch::Minus).unwrap(), 1.0);
        assert!(holomorphic_weight(2, 2, Branch::Plus).is_err());
        assert!(holomorphic_weight(2, -1, Branch::Minus).is_err());
    }

    #[test]
    fn mellin_examples() {
        let one = RationalPair {
            plus: Rational { num: vec![c(1.0, 0.0)], den: vec![c(1.0, 0.0)] },
            minus: Rational { num: vec![c(1.0, 0.0)], den: vec![c(1.0, 0.0)] },
        };
        let ell = c(0.4, 0.1);
        let a1 = MellinOperator::new(SubgroupKind::A1, ell);
        assert_eq!(mellin_apply(&a1, &one, c(2.0, 0.0)), (c(0.0, -2.0), c(0.0, -2.0)));
        let np = MellinOperator::new(SubgroupKind::Nplus, ell);
        let s = c(0.8, 0.0);
        let want = ell + 1.0 + Complex64::i() * s;
        let got = mellin_apply(&np, &one, s);
        assert!((got.0 - want).norm() < 1e-15 && (got.1 + want).norm() < 1e-15);
    }

    #[test]
    fn mellin_composition_matches_word_sum() {
        let v = RationalPair {
            plus: Rational { num: vec![c(1.0, 0.0)], den: vec![c(9.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)] },
            minus: Rational { num: vec![c(0.0, 2.0), c(1.0, 0.0)], den: vec![c(16.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)] },
        };
        let ell = c(0.3, 0.0);
        let k = MellinOperator::new(SubgroupKind::K, ell);
        let a2 = MellinOperator::new(SubgroupKind::A2, ell);
        let inner = a2.of(&v);
        let nested = k.of(&inner);
        let s = c(0.6, 0.0);
        let w = mellin_word_sum(&[(c(1.0, 0.0), &[k, a2])], &v, s);
        let n = nested.eval(s);
        assert!((w.0 - n.0).norm() < 1e-15 && (w.1 - n.1).norm() < 1e-15);
    }
}
