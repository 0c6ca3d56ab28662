//! Small dense complex matrices: products, LU solves and the eigenvalue
//! problem (balancing, Householder reduction to Hessenberg form and shifted
//! QR iteration).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
#[allow(unused_imports)]
use crate::prelude::*;

const EPS: f64 = f64::EPSILON;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| *v * s).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::identity(self.rows);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// LU factorisation with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        if !self.is_square() {
            return Err(Error::invalid("LU needs a square matrix"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .expect("nonempty");
            if a[(p, k)].norm() <= EPS * scale * n as f64 * 1e-3 {
                return Err(Error::SingularModel("singular matrix in LU".into()));
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
        Ok(Lu { lu: a, perm })
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        let mut e = vec![zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = zero());
            e[j] = Complex64::new(1.0, 0.0);
            let x = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = x[i];
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, o.rows);
        let mut r = CMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == zero() {
                    continue;
                }
                for j in 0..o.cols {
                    r[(i, j)] += a * o[(k, j)];
                }
            }
        }
        r
    }
}

/// Packed LU factors with the row permutation.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = x[j];
                x[i] -= self.lu[(i, j)] * t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = x[j];
                x[i] -= self.lu[(i, j)] * t;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Eigenvalues of a square complex matrix.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::invalid("eigenvalues need a square matrix"));
    }
    if a.data.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::invalid("non-finite matrix entry"));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

/// Parlett–Reinsch balancing by powers of two.
fn balance(a: &mut CMatrix) {
    let n = a.rows;
    let radix = 2.0f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].l1_norm();
                    r += a[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] / f;
                    a[(j, i)] = a[(j, i)] * f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut CMatrix) {
    let n = a.rows;
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vn);
        // A <- (I - 2 v v^H) A
        for j in 0..n {
            let dot: Complex64 = (0..v.len()).map(|t| v[t].conj() * a[(k + 1 + t, j)]).sum();
            for t in 0..v.len() {
                a[(k + 1 + t, j)] -= v[t] * dot * 2.0;
            }
        }
        // A <- A (I - 2 v v^H)
        for i in 0..n {
            let dot: Complex64 = (0..v.len()).map(|t| a[(i, k + 1 + t)] * v[t]).sum();
            for t in 0..v.len() {
                a[(i, k + 1 + t)] -= dot * v[t].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = zero();
        }
    }
}

/// Shifted QR iteration with Givens rotations on the active window of an
/// upper Hessenberg matrix, deflating negligible subdiagonal entries.
fn hessenberg_qr(h: &mut CMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows;
    let mut eig = vec![zero(); n];
    if n == 0 {
        return Ok(eig);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut rot: Vec<(Complex64, Complex64)> = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            return Ok(eig);
        }
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let scale = if diag == 0.0 { h.max_abs() } else { diag };
            if sub <= EPS * scale {
                h[(lo, lo - 1)] = zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 100 {
            return Err(Error::NoConvergence);
        }
        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let c = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let mu = if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            d + Complex64::new(0.75 * c.norm(), 0.25 * c.norm())
        } else {
            let m = (a + d) * 0.5;
            let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
            let (m1, m2) = (m + disc, m - disc);
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        rot.clear();
        for k in lo..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), zero())
            } else {
                (x.conj() / r, y.conj() / r)
            };
            for j in k..=hi {
                let u = h[(k, j)];
                let v = h[(k + 1, j)];
                h[(k, j)] = cs * u + sn * v;
                h[(k + 1, j)] = -sn.conj() * u + cs.conj() * v;
            }
            rot.push((cs, sn));
        }
        for (idx, k) in (lo..hi).enumerate() {
            let (cs, sn) = rot[idx];
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let u = h[(i, k)];
                let v = h[(i, k + 1)];
                h[(i, k)] = u * cs.conj() + v * sn.conj();
                h[(i, k + 1)] = -u * sn + v * cs;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
}

/// Condition number `|x| |y| / |y^H x|` of a simple eigenvalue `mu`, from
/// right and left eigenvectors obtained by inverse iteration.
pub fn eigenvalue_condition(a: &CMatrix, mu: Complex64) -> f64 {
    let n = a.rows;
    let shift = mu + Complex64::new(1.0, 0.5) * (1e-10 * (1.0 + mu.norm()));
    let right = inverse_iteration(a, shift);
    let left = inverse_iteration(&a.conj_transpose(), shift.conj());
    match (right, left) {
        (Some(x), Some(y)) => {
            let dot: Complex64 = (0..n).map(|i| y[i].conj() * x[i]).sum();
            if dot.norm() == 0.0 {
                f64::INFINITY
            } else {
                1.0 / dot.norm()
            }
        }
        _ => f64::INFINITY,
    }
}

fn inverse_iteration(a: &CMatrix, shift: Complex64) -> Option<Vec<Complex64>> {
    let n = a.rows;
    let m = a.sub(&CMatrix::identity(n).scale(shift));
    let lu = m.lu().ok()?;
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64))
        .collect();
    for _ in 0..6 {
        x = lu.solve(&x);
        let nrm: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !nrm.is_finite() || nrm == 0.0 {
            return None;
        }
        x.iter_mut().for_each(|z| *z /= nrm);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn triangular_spectrum() {
        let a = CMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                c(i as f64 + 1.0, -(i as f64))
            } else if j > i {
                c(0.3 * (i + j) as f64, 1.0)
            } else {
                zero()
            }
        });
        let e = sorted(eigenvalues(&a).unwrap());
        for (i, v) in e.iter().enumerate() {
            assert!((v - c(i as f64 + 1.0, -(i as f64))).norm() < 1e-12);
        }
    }

    #[test]
    fn similarity_preserves_spectrum() {
        let d = [c(-2.0, 0.0), c(0.5, 1.0), c(3.0, -0.5), c(1e-3, 0.0), c(7.0, 2.0)];
        let p = CMatrix::from_fn(5, 5, |i, j| {
            c(((i * 7 + j * 3) % 5) as f64 - 1.7, ((i + 2 * j) % 3) as f64 * 0.4)
        });
        let a = &(&p * &CMatrix::diagonal(&d)) * &p.inverse().unwrap();
        let got = sorted(eigenvalues(&a).unwrap());
        let want = sorted(d.to_vec());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-10, "{g} vs {w}");
        }
    }

    #[test]
    fn trace_and_determinant_of_random_matrix() {
        let n = 12;
        let a = CMatrix::from_fn(n, n, |i, j| {
            let t = (i * 31 + j * 17) as f64;
            c((0.37 * t).sin(), (0.11 * t).cos())
        });
        let e = eigenvalues(&a).unwrap();
        let tr: Complex64 = (0..n).map(|i| a[(i, i)]).sum();
        let sum: Complex64 = e.iter().sum();
        assert!((tr - sum).norm() < 1e-11);
    }

    #[test]
    fn inverse_and_solve() {
        let a = CMatrix::from_fn(3, 3, |i, j| c(1.0 / (i + j + 1) as f64, (i as f64) - (j as f64)));
        let inv = a.inverse().unwrap();
        let id = &a * &inv;
        assert!(id.sub(&CMatrix::identity(3)).max_abs() < 1e-13);
        let sing = CMatrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert!(sing.inverse().is_err());
    }

    #[test]
    fn condition_of_normal_and_nonnormal() {
        let d = CMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!((eigenvalue_condition(&d, c(1.0, 0.0)) - 1.0).abs() < 1e-8);
        let mut j = CMatrix::diagonal(&[c(1.0, 0.0), c(1.0 + 1e-9, 0.0)]);
        j[(0, 1)] = c(1.0, 0.0);
        assert!(eigenvalue_condition(&j, c(1.0, 0.0)) > 1e6);
    }
}
