//! Matrices over H_t, the embedding into complex matrices, the bilinear form
//! `[f, g] = sum_k [f_k, g_k]`, nonnegativity and the `F F^star` factorization.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{HtError, Result};
use crate::linalg::{self, CMat, RMat, RANK_RTOL};
use crate::scalar::{AlgebraContext, Embedded2x2, HtScalar};

/// A dense row-major matrix with entries in H_t.
#[derive(Debug, Clone, PartialEq)]
pub struct HtMatrix {
    rows: usize,
    cols: usize,
    data: Vec<HtScalar>,
}

impl Index<(usize, usize)> for HtMatrix {
    type Output = HtScalar;
    fn index(&self, (r, c): (usize, usize)) -> &HtScalar {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for HtMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut HtScalar {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

fn mismatch(op: &str, a: &HtMatrix, b: &HtMatrix) -> HtError {
    HtError::SizeMismatch(format!(
        "{op}: {}x{} vs {}x{}",
        a.rows, a.cols, b.rows, b.cols
    ))
}

impl HtMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![HtScalar::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { HtScalar::ONE } else { HtScalar::ZERO })
    }

    pub fn scalar(q: HtScalar) -> Self {
        Self { rows: 1, cols: 1, data: vec![q] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> HtScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<HtScalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(HtError::SizeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<HtScalar>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(HtError::SizeMismatch("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn diag(entries: &[HtScalar]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r] } else { HtScalar::ZERO })
    }

    pub fn column(entries: &[HtScalar]) -> Self {
        Self { rows: entries.len(), cols: 1, data: entries.to_vec() }
    }

    /// `[[0, I_n], [I_n, 0]]`.
    pub fn antidiag_identity(n: usize) -> Self {
        Self::from_fn(2 * n, 2 * n, |r, c| {
            if (r < n && c == r + n) || (r >= n && c + n == r) {
                HtScalar::ONE
            } else {
                HtScalar::ZERO
            }
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[HtScalar] {
        &self.data
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.shape() != o.shape() {
            return Err(mismatch("add", self, o));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        if self.shape() != o.shape() {
            return Err(mismatch("sub", self, o));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|q| *q * s).collect() }
    }

    pub fn mul(&self, o: &Self, ctx: &AlgebraContext) -> Result<Self> {
        if self.cols != o.rows {
            return Err(mismatch("mul", self, o));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let p = self.data[r * self.cols + k];
                if p == HtScalar::ZERO {
                    continue;
                }
                for c in 0..o.cols {
                    out.data[r * o.cols + c] += ctx.mul(p, o.data[k * o.cols + c]);
                }
            }
        }
        Ok(out)
    }

    /// Left multiplication of every entry by a scalar, `q M`.
    pub fn left_scalar_mul(&self, q: HtScalar, ctx: &AlgebraContext) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| ctx.mul(q, *e)).collect() }
    }

    /// Right multiplication of every entry by a scalar, `M q`.
    pub fn right_scalar_mul(&self, q: HtScalar, ctx: &AlgebraContext) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| ctx.mul(*e, q)).collect() }
    }

    /// Transpose with entrywise adjoint.
    pub fn star(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].star())
    }

    pub fn j_symmetry(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|q| q.j_symmetry()).collect() }
    }

    /// Frobenius norm of the real coordinates.
    pub fn coord_norm(&self) -> f64 {
        self.data.iter().map(|q| q.coord_norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the complex embedding.
    pub fn norm(&self, ctx: &AlgebraContext) -> f64 {
        let t2 = ctx.t() * ctx.t();
        self.data
            .iter()
            .map(|q| 2.0 * q.a.norm_sqr() + (1.0 + t2) * q.b.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Embedded Frobenius distance to another matrix of the same shape.
    pub fn dist(&self, o: &Self, ctx: &AlgebraContext) -> Result<f64> {
        Ok(self.sub(o)?.norm(ctx))
    }

    pub fn embed(&self, ctx: &AlgebraContext) -> CMat {
        let mut m = CMat::zeros(2 * self.rows, 2 * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = ctx.embed(self[(r, c)]);
                for i in 0..2 {
                    for j in 0..2 {
                        m[(2 * r + i, 2 * c + j)] = e.m[i][j];
                    }
                }
            }
        }
        m
    }

    /// Inverse of [`embed`](Self::embed) with a structure check.
    pub fn unembed(m: &CMat, ctx: &AlgebraContext, tol: f64) -> Result<Self> {
        if !m.nrows().is_multiple_of(2) || !m.ncols().is_multiple_of(2) {
            return Err(HtError::SizeMismatch(format!(
                "odd embedded size {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let out = Self::unembed_projected(m, ctx);
        let dev = linalg::max_abs(&(out.embed(ctx) - m));
        if dev > tol * (1.0 + linalg::max_abs(m)) {
            return Err(HtError::NotStructured(dev));
        }
        Ok(out)
    }

    /// Nearest structured preimage, no check. Used where structure holds by construction.
    pub fn unembed_projected(m: &CMat, ctx: &AlgebraContext) -> Self {
        let (rows, cols) = (m.nrows() / 2, m.ncols() / 2);
        Self::from_fn(rows, cols, |r, c| {
            let e = Embedded2x2 {
                m: [
                    [m[(2 * r, 2 * c)], m[(2 * r, 2 * c + 1)]],
                    [m[(2 * r + 1, 2 * c)], m[(2 * r + 1, 2 * c + 1)]],
                ],
            };
            ctx.unembed_projected(&e)
        })
    }

    /// Inverse through the embedding. `Singular` when `sigma_min / sigma_max <= rtol`.
    pub fn inverse(&self, ctx: &AlgebraContext, rtol: f64) -> Result<Self> {
        if !self.is_square() {
            return Err(HtError::SizeMismatch(format!("inverse of {}x{}", self.rows, self.cols)));
        }
        let e = self.embed(ctx);
        let inv = linalg::inverse_checked(&e, rtol).ok_or(HtError::Singular)?;
        Ok(Self::unembed_projected(&inv, ctx))
    }

    pub fn is_invertible(&self, ctx: &AlgebraContext, rtol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        self.rows == 0 || linalg::inverse_condition(&self.embed(ctx)) > rtol
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Self::from_fn(nr, nc, |r, c| self[(r0 + r, c0 + c)])
    }

    pub fn col(&self, c: usize) -> Self {
        self.block(0, c, self.rows, 1)
    }

    pub fn hstack(&self, o: &Self) -> Result<Self> {
        if self.rows != o.rows {
            return Err(mismatch("hstack", self, o));
        }
        Ok(Self::from_fn(self.rows, self.cols + o.cols, |r, c| {
            if c < self.cols {
                self[(r, c)]
            } else {
                o[(r, c - self.cols)]
            }
        }))
    }

    pub fn vstack(&self, o: &Self) -> Result<Self> {
        if self.cols != o.cols {
            return Err(mismatch("vstack", self, o));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&o.data);
        Ok(Self { rows: self.rows + o.rows, cols: self.cols, data })
    }

    /// `[[a, b], [c, d]]` from four blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        a.hstack(b)?.vstack(&c.hstack(d)?)
    }

    pub fn block_diag(a: &Self, d: &Self) -> Self {
        Self::from_blocks(a, &Self::zeros(a.rows, d.cols), &Self::zeros(d.rows, a.cols), d)
            .expect("block shapes agree")
    }

    /// Real coordinates, row-major, four per entry.
    pub fn to_real_vec(&self) -> Vec<f64> {
        self.data.iter().flat_map(|q| q.coords()).collect()
    }

    pub fn from_real_vec(rows: usize, cols: usize, x: &[f64]) -> Self {
        assert_eq!(x.len(), 4 * rows * cols);
        Self {
            rows,
            cols,
            data: x.chunks_exact(4).map(|c| HtScalar::from_coords([c[0], c[1], c[2], c[3]])).collect(),
        }
    }

    /// Number of real parameters of an `n x n` star-symmetric matrix.
    pub fn star_symmetric_dim(n: usize) -> usize {
        n + 2 * n * (n.saturating_sub(1))
    }

    /// Star-symmetric matrix from its independent real parameters: one real number per
    /// diagonal entry, four per strictly upper entry.
    pub fn star_symmetric_from_params(n: usize, x: &[f64]) -> Self {
        assert_eq!(x.len(), Self::star_symmetric_dim(n));
        let mut m = Self::zeros(n, n);
        let mut p = 0;
        for r in 0..n {
            m[(r, r)] = HtScalar::real(x[p]);
            p += 1;
            for c in r + 1..n {
                let q = HtScalar::from_coords([x[p], x[p + 1], x[p + 2], x[p + 3]]);
                p += 4;
                m[(r, c)] = q;
                m[(c, r)] = q.star();
            }
        }
        m
    }

    pub fn star_symmetry_defect(&self, ctx: &AlgebraContext) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.sub(&self.star()).map(|d| d.norm(ctx)).unwrap_or(f64::INFINITY)
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        self.shape() == o.shape() && self.sub(o).map(|d| d.coord_norm() <= tol).unwrap_or(false)
    }
}

/// `[f, g] = sum_k [f_k, g_k]` for equally sized matrices (usually columns).
pub fn vec_bilinear(f: &HtMatrix, g: &HtMatrix, ctx: &AlgebraContext) -> Result<f64> {
    if f.shape() != g.shape() {
        return Err(mismatch("bilinear", f, g));
    }
    Ok(f.entries().iter().zip(g.entries()).map(|(p, q)| ctx.bilinear(*p, *q)).sum())
}

/// The form `[f, g]_H = [f, H g]` for a star-symmetric invertible `H`.
#[derive(Debug, Clone)]
pub struct FormH {
    pub h: HtMatrix,
    pub ctx: AlgebraContext,
}

impl FormH {
    pub fn new(h: HtMatrix, ctx: AlgebraContext, tol: f64) -> Result<Self> {
        let d = h.star_symmetry_defect(&ctx);
        if d > tol * (1.0 + h.norm(&ctx)) {
            return Err(HtError::NotStarSymmetric(d));
        }
        if !h.is_invertible(&ctx, RANK_RTOL) {
            return Err(HtError::Singular);
        }
        Ok(Self { h, ctx })
    }

    pub fn eval(&self, f: &HtMatrix, g: &HtMatrix) -> Result<f64> {
        vec_bilinear(f, &self.h.mul(g, &self.ctx)?, &self.ctx)
    }
}

/// Real symmetric `Q` (size `4n`) with `[p, M p] = x^T Q x` where `x` are the real
/// coordinates of `p`, entry by entry.
pub fn quadratic_form_matrix(m: &HtMatrix, ctx: &AlgebraContext) -> Result<RMat> {
    if !m.is_square() {
        return Err(HtError::SizeMismatch("quadratic form of a non-square matrix".into()));
    }
    let n = m.nrows();
    let dim = 4 * n;
    let unit = |a: usize| {
        let mut x = [0.0; 4];
        x[a % 4] = 1.0;
        (a / 4, HtScalar::from_coords(x))
    };
    // [e_a, M e_b] = [q_a, M_{ra, rb} q_b]
    let mut raw = RMat::zeros(dim, dim);
    for a in 0..dim {
        let (ra, qa) = unit(a);
        for b in 0..dim {
            let (rb, qb) = unit(b);
            raw[(a, b)] = ctx.bilinear(qa, ctx.mul(m[(ra, rb)], qb));
        }
    }
    Ok((&raw + raw.transpose()) * 0.5)
}

/// `true` when `M = M^star` and `[p, M p] >= 0` for every `p`.
pub fn is_star_nonnegative(m: &HtMatrix, ctx: &AlgebraContext, tol: f64) -> Result<bool> {
    let d = m.star_symmetry_defect(ctx);
    if d > tol * (1.0 + m.norm(ctx)) {
        return Err(HtError::NotStarSymmetric(d));
    }
    let q = quadratic_form_matrix(m, ctx)?;
    let scale = 1.0 + q.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(linalg::sym_eigenvalues(&q).iter().all(|&l| l >= -tol * scale))
}

/// Lower-triangular `F` with `M = F F^star` for a star-nonnegative `M`, `t < 0`.
pub fn positive_factorize(m: &HtMatrix, ctx: &AlgebraContext, tol: f64) -> Result<HtMatrix> {
    if ctx.t() >= 0.0 {
        return Err(HtError::PreconditionViolated("positive factorization needs t < 0".into()));
    }
    if !m.is_square() {
        return Err(HtError::SizeMismatch("positive factorization of a non-square matrix".into()));
    }
    let d = m.star_symmetry_defect(ctx);
    let scale = 1.0 + m.norm(ctx);
    if d > tol * scale {
        return Err(HtError::NotStarSymmetric(d));
    }
    factor_rec(m, ctx, tol * scale)
}

fn factor_rec(m: &HtMatrix, ctx: &AlgebraContext, atol: f64) -> Result<HtMatrix> {
    let n = m.nrows();
    let mut n0 = n;
    for k in 0..n {
        let mkk = m[(k, k)].re();
        if mkk > atol {
            n0 = k;
            break;
        }
        if mkk < -atol {
            return Err(HtError::NotNonnegative(format!("negative pivot {mkk:.3e} at {k}")));
        }
        let row_norm = m.block(k, 0, 1, n).coord_norm();
        if row_norm > atol {
            return Err(HtError::NotNonnegative(format!(
                "zero diagonal with nonzero row (norm {row_norm:.3e}) at {k}"
            )));
        }
    }
    if n0 == n {
        return Ok(HtMatrix::zeros(n, n));
    }
    let rest = n - n0 - 1;
    let x = m[(n0, n0)].re();
    let sx = x.sqrt();
    let b = m.block(n0, n0 + 1, 1, rest);
    let dm = m.block(n0 + 1, n0 + 1, rest, rest);
    let bs = b.star();
    let schur = dm.sub(&bs.mul(&b, ctx)?.scale(1.0 / x))?;
    // keep the complement exactly symmetric
    let schur = schur.add(&schur.star())?.scale(0.5);
    let r = factor_rec(&schur, ctx, atol)?;
    let top = HtMatrix::scalar(HtScalar::real(sx)).hstack(&HtMatrix::zeros(1, rest))?;
    let bottom = bs.scale(1.0 / sx).hstack(&r)?;
    let ft = top.vstack(&bottom)?;
    Ok(HtMatrix::block_diag(&HtMatrix::zeros(n0, n0), &ft))
}

/// Eigenpair `(f, lambda)` with `A f = f lambda`, `lambda` complex. Among the eigenvalues of
/// the embedding, the one of largest modulus is taken, ties broken by larger real part and
/// then larger imaginary part.
pub fn eigenpair(a: &HtMatrix, ctx: &AlgebraContext, tol: f64) -> Result<(HtMatrix, Complex64)> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(HtError::SizeMismatch("eigenpair needs a nonempty square matrix".into()));
    }
    let e = a.embed(ctx);
    let mut ev = linalg::eigenvalues(&e).ok_or(HtError::EigenFailure)?;
    let key_tol = 1e-9 * (1.0 + linalg::max_abs(&e));
    ev.sort_by(|x, y| {
        let cmp = |p: f64, q: f64| {
            if (p - q).abs() <= key_tol {
                std::cmp::Ordering::Equal
            } else {
                q.total_cmp(&p)
            }
        };
        cmp(x.norm(), y.norm()).then(cmp(x.re, y.re)).then(cmp(x.im, y.im))
    });
    let lambda = ev[0];
    let shifted = &e - CMat::identity(e.nrows(), e.ncols()) * lambda;
    let u = linalg::smallest_singular_vector(&shifted);
    let f = crate::subspace::from_first_column(&u);
    let res = a.mul(&f, ctx)?.sub(&f.right_scalar_mul(HtScalar::new(lambda, Complex64::new(0.0, 0.0)), ctx))?;
    if res.coord_norm() > tol.max(1e-8) * (1.0 + a.coord_norm()) {
        return Err(HtError::EigenFailure);
    }
    Ok((f, lambda))
}

/// A projection `pi` together with H_t bases of its kernel and range.
#[derive(Debug, Clone)]
pub struct ProjectionDecomposition {
    pub pi: HtMatrix,
    pub kernel_basis: HtMatrix,
    pub range_basis: HtMatrix,
}

impl ProjectionDecomposition {
    /// `S = [kernel_basis, range_basis]`.
    pub fn adapted_basis(&self) -> HtMatrix {
        self.kernel_basis.hstack(&self.range_basis).expect("bases share the row count")
    }

    /// The projection with the given kernel and range.
    pub fn from_bases(
        kernel_basis: HtMatrix,
        range_basis: HtMatrix,
        ctx: &AlgebraContext,
    ) -> Result<Self> {
        let s = kernel_basis.hstack(&range_basis)?;
        if !s.is_square() {
            return Err(HtError::SizeMismatch("kernel and range do not span the space".into()));
        }
        let sinv = s.inverse(ctx, RANK_RTOL)?;
        let k = kernel_basis.ncols();
        let n = s.nrows();
        let sel = HtMatrix::block_diag(&HtMatrix::zeros(k, k), &HtMatrix::identity(n - k));
        let pi = s.mul(&sel, ctx)?.mul(&sinv, ctx)?;
        Ok(Self { pi, kernel_basis, range_basis })
    }
}

/// Check `pi^2 = pi` and compute H_t bases of kernel and range.
pub fn decompose_projection(
    pi: &HtMatrix,
    ctx: &AlgebraContext,
    tol: f64,
) -> Result<ProjectionDecomposition> {
    if !pi.is_square() {
        return Err(HtError::SizeMismatch("projection must be square".into()));
    }
    let dev = pi.mul(pi, ctx)?.dist(pi, ctx)?;
    if dev > tol * (1.0 + pi.norm(ctx)) {
        return Err(HtError::NotIdempotent(dev));
    }
    let e = pi.embed(ctx);
    let range = linalg::colspace(&e, RANK_RTOL);
    let kernel = linalg::nullspace(&e, RANK_RTOL);
    Ok(ProjectionDecomposition {
        pi: pi.clone(),
        kernel_basis: crate::subspace::module_basis(&kernel, ctx)?,
        range_basis: crate::subspace::module_basis(&range, ctx)?,
    })
}

/// H_t basis of `{g : [f, g]_H = 0 for all f in span(basis)}`.
pub fn h_orthogonal_complement(basis: &HtMatrix, form: &FormH) -> Result<HtMatrix> {
    let ctx = &form.ctx;
    let m = basis.star().mul(&form.h, ctx)?;
    let null = linalg::nullspace(&m.embed(ctx), RANK_RTOL);
    crate::subspace::module_basis(&null, ctx)
}

/// Whether the restriction of `[., .]_H` to the submodule spanned by `basis` is
/// nondegenerate, tested on the real Gram matrix of a real basis.
pub fn is_h_nondegenerate(basis: &HtMatrix, form: &FormH) -> Result<bool> {
    let ctx = &form.ctx;
    let k = basis.ncols();
    if k == 0 {
        return Ok(true);
    }
    let units = [HtScalar::ONE, HtScalar::I, HtScalar::J, HtScalar::K];
    let mut real_basis = Vec::with_capacity(4 * k);
    for c in 0..k {
        let f = basis.col(c);
        for u in units {
            real_basis.push(f.right_scalar_mul(u, ctx));
        }
    }
    let hb: Vec<HtMatrix> =
        real_basis.iter().map(|g| form.h.mul(g, ctx)).collect::<Result<_>>()?;
    let n = real_basis.len();
    let mut gram = RMat::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            gram[(a, b)] = vec_bilinear(&real_basis[a], &hb[b], ctx)?;
        }
    }
    let s = linalg::svd_real(&gram).s;
    // scale by |F|^2 |H| so that a uniformly tiny Gram matrix counts as degenerate
    let (smax, smin) = (s.first().copied().unwrap_or(0.0), s.last().copied().unwrap_or(0.0));
    let scale = smax.max(basis.coord_norm().powi(2) * form.h.coord_norm());
    Ok(scale > 0.0 && smin > RANK_RTOL * scale)
}

/// Check whether the quadratic kernel samples `K(w_k, w_j)` define a nonnegative form:
/// the block matrix of samples must be star-Hermitian and star-nonnegative.
pub fn kernel_positivity_check<F>(
    points: &[f64],
    kernel: F,
    ctx: &AlgebraContext,
    tol: f64,
) -> Result<bool>
where
    F: Fn(f64, f64) -> Result<HtMatrix>,
{
    if points.is_empty() {
        return Ok(true);
    }
    let first = kernel(points[0], points[0])?;
    let n = first.nrows();
    let p = points.len();
    let mut big = HtMatrix::zeros(n * p, n * p);
    for (k, &wk) in points.iter().enumerate() {
        for (j, &wj) in points.iter().enumerate() {
            let blk = kernel(wk, wj)?;
            if blk.shape() != (n, n) {
                return Err(HtError::SizeMismatch("kernel blocks differ in size".into()));
            }
            for r in 0..n {
                for c in 0..n {
                    big[(k * n + r, j * n + c)] = blk[(r, c)];
                }
            }
        }
    }
    let d = big.star_symmetry_defect(ctx);
    if d > tol * (1.0 + big.norm(ctx)) {
        return Err(HtError::NotStarSymmetric(d));
    }
    is_star_nonnegative(&big, ctx, tol)
}

/// Real vector of an H_t matrix flattened by coordinates; mostly for solvers.
pub fn stack_real(ms: &[HtMatrix]) -> Vec<f64> {
    ms.iter().flat_map(|m| m.to_real_vec()).collect()
}
