//! Scalars of the ring H_t.
//!
//! An element is stored as `a + b j_t` with complex `a = x0 + i x1`, `b = x2 + i x3`.
//! Multiplication depends on `t`, so it goes through an [`AlgebraContext`].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{HtError, Result};

/// The scale parameter `t` with `j_t^2 = t`. `t = -1` gives Hamilton's quaternions,
/// `t = 1` the split quaternions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraContext {
    t: f64,
}

impl AlgebraContext {
    pub fn new(t: f64) -> Result<Self> {
        if t == 0.0 || !t.is_finite() {
            return Err(HtError::ZeroScale);
        }
        Ok(Self { t })
    }

    pub fn quaternions() -> Self {
        Self { t: -1.0 }
    }

    pub fn split() -> Self {
        Self { t: 1.0 }
    }

    #[inline]
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Product `p q`.
    #[inline]
    pub fn mul(&self, p: HtScalar, q: HtScalar) -> HtScalar {
        // first column of I(p) I(q)
        HtScalar {
            a: p.a * q.a + p.b * q.b.conj() * self.t,
            b: p.a * q.b + p.b * q.a.conj(),
        }
    }

    /// `q q^star = |a|^2 - t |b|^2`, the determinant of the embedding.
    #[inline]
    pub fn norm_form(&self, q: HtScalar) -> f64 {
        q.a.norm_sqr() - self.t * q.b.norm_sqr()
    }

    pub fn inverse(&self, q: HtScalar, tol: f64) -> Result<HtScalar> {
        let n = self.norm_form(q);
        if n.abs() <= tol * q.coord_norm_sqr().max(f64::MIN_POSITIVE) || n == 0.0 {
            return Err(HtError::ZeroDivisor(n));
        }
        Ok(q.star() * (1.0 / n))
    }

    /// The real bilinear form `[p, q] = Tr(I(p^star) I(q))`.
    #[inline]
    pub fn bilinear(&self, p: HtScalar, q: HtScalar) -> f64 {
        2.0 * (q.a * p.a.conj()).re - 2.0 * self.t * (q.b * p.b.conj()).re
    }

    pub fn embed(&self, q: HtScalar) -> Embedded2x2 {
        Embedded2x2 {
            m: [[q.a, q.b * self.t], [q.b.conj(), q.a.conj()]],
        }
    }

    /// Inverse of [`embed`](Self::embed). Fails with `NotStructured` when the matrix is not
    /// of the form `[[a, t b], [conj b, conj a]]` within `tol`.
    pub fn unembed(&self, e: &Embedded2x2, tol: f64) -> Result<HtScalar> {
        let q = self.unembed_projected(e);
        let back = self.embed(q);
        let mut dev = 0.0f64;
        let mut scale = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                dev = dev.max((back.m[r][c] - e.m[r][c]).norm());
                scale = scale.max(e.m[r][c].norm());
            }
        }
        if dev > tol * (1.0 + scale) {
            return Err(HtError::NotStructured(dev));
        }
        Ok(q)
    }

    /// Nearest structured preimage (least squares), without a structure check.
    pub fn unembed_projected(&self, e: &Embedded2x2) -> HtScalar {
        let t = self.t;
        let w = 1.0 / (1.0 + t * t);
        HtScalar {
            a: (e.m[0][0] + e.m[1][1].conj()) * 0.5,
            b: (e.m[0][1] * t + e.m[1][0].conj()) * w,
        }
    }

    pub fn pow(&self, q: HtScalar, n: u32) -> HtScalar {
        let mut acc = HtScalar::ONE;
        for _ in 0..n {
            acc = self.mul(acc, q);
        }
        acc
    }
}

/// An element `a + b j_t` of H_t.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct HtScalar {
    pub a: Complex64,
    pub b: Complex64,
}

impl HtScalar {
    pub const ZERO: Self = Self::from_coords([0.0, 0.0, 0.0, 0.0]);
    pub const ONE: Self = Self::from_coords([1.0, 0.0, 0.0, 0.0]);
    pub const I: Self = Self::from_coords([0.0, 1.0, 0.0, 0.0]);
    pub const J: Self = Self::from_coords([0.0, 0.0, 1.0, 0.0]);
    pub const K: Self = Self::from_coords([0.0, 0.0, 0.0, 1.0]);

    pub const fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub const fn from_coords(x: [f64; 4]) -> Self {
        Self {
            a: Complex64::new(x[0], x[1]),
            b: Complex64::new(x[2], x[3]),
        }
    }

    pub const fn real(x: f64) -> Self {
        Self::from_coords([x, 0.0, 0.0, 0.0])
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.a.re, self.a.im, self.b.re, self.b.im]
    }

    /// The adjoint `(a, b) -> (conj a, -b)`.
    #[inline]
    pub fn star(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// The symmetry `J(a, b) = (a, -b)`.
    #[inline]
    pub fn j_symmetry(&self) -> Self {
        Self { a: self.a, b: -self.b }
    }

    /// Real part `x0`; the embedding trace is twice this.
    pub fn re(&self) -> f64 {
        self.a.re
    }

    pub fn coord_norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn coord_norm(&self) -> f64 {
        self.coord_norm_sqr().sqrt()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.a.im.abs() <= tol && self.b.norm() <= tol
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (*self - *other).coord_norm() <= tol
    }
}

impl fmt::Debug for HtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x0, x1, x2, x3] = self.coords();
        write!(f, "({x0} + {x1}i + {x2}j + {x3}k)")
    }
}

impl fmt::Display for HtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for HtScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for HtScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { a: self.a - o.a, b: self.b - o.b }
    }
}

impl AddAssign for HtScalar {
    fn add_assign(&mut self, o: Self) {
        self.a += o.a;
        self.b += o.b;
    }
}

impl SubAssign for HtScalar {
    fn sub_assign(&mut self, o: Self) {
        self.a -= o.a;
        self.b -= o.b;
    }
}

impl Neg for HtScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b }
    }
}

impl Mul<f64> for HtScalar {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self { a: self.a * s, b: self.b * s }
    }
}

/// A complex 2x2 matrix, the image of a scalar under the embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Embedded2x2 {
    pub m: [[Complex64; 2]; 2],
}

impl Embedded2x2 {
    pub fn mul(&self, o: &Self) -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.m[r][0] * o.m[0][c] + self.m[r][1] * o.m[1][c];
            }
        }
        Self { m }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(t: f64) -> AlgebraContext {
        AlgebraContext::new(t).unwrap()
    }

    #[test]
    fn cayley_table() {
        for t in [-1.0, -0.5, 0.5, 2.0] {
            let c = ctx(t);
            let (i, j, k) = (HtScalar::I, HtScalar::J, HtScalar::K);
            let tol = 1e-15;
            assert!(c.mul(i, i).approx_eq(&HtScalar::real(-1.0), tol));
            assert!(c.mul(j, j).approx_eq(&HtScalar::real(t), tol));
            assert!(c.mul(k, k).approx_eq(&HtScalar::real(t), tol));
            assert!(c.mul(i, j).approx_eq(&k, tol));
            assert!(c.mul(j, i).approx_eq(&-k, tol));
            assert!(c.mul(j, k).approx_eq(&(i * -t), tol));
            assert!(c.mul(k, j).approx_eq(&(i * t), tol));
            assert!(c.mul(i, k).approx_eq(&-j, tol));
            assert!(c.mul(k, i).approx_eq(&j, tol));
        }
    }

    #[test]
    fn zero_scale_rejected() {
        assert_eq!(AlgebraContext::new(0.0), Err(HtError::ZeroScale));
        assert_eq!(AlgebraContext::new(f64::NAN), Err(HtError::ZeroScale));
    }

    #[test]
    fn split_zero_divisor() {
        let c = AlgebraContext::split();
        let q = HtScalar::ONE + HtScalar::J;
        assert_eq!(c.norm_form(q), 0.0);
        assert!(matches!(c.inverse(q, 1e-12), Err(HtError::ZeroDivisor(_))));
        // 1 + j_1 is a zero divisor: (1 + j)(1 - j) = 1 - t = 0
        let p = HtScalar::ONE - HtScalar::J;
        assert!(c.mul(q, p).approx_eq(&HtScalar::ZERO, 1e-15));
    }

    #[test]
    fn inverse_example() {
        let c = AlgebraContext::quaternions();
        let q = HtScalar::from_coords([1.0, 2.0, 0.5, -1.0]);
        let inv = c.inverse(q, 1e-12).unwrap();
        assert!(c.mul(q, inv).approx_eq(&HtScalar::ONE, 1e-14));
        assert!(c.mul(inv, q).approx_eq(&HtScalar::ONE, 1e-14));
    }

    #[test]
    fn unembed_rejects_unstructured() {
        let c = ctx(-1.0);
        let mut e = c.embed(HtScalar::from_coords([1.0, 0.0, 1.0, 0.0]));
        assert!(c.unembed(&e, 1e-12).is_ok());
        e.m[1][0] += Complex64::new(0.1, 0.0);
        assert!(matches!(c.unembed(&e, 1e-12), Err(HtError::NotStructured(_))));
    }
}
