//! Right H_t-submodules of `H_t^N`.
//!
//! A column `f` is identified with the first column `u(f)` of its embedding, a vector in
//! `C^{2N}`. Under this identification right multiplication by `j_t` becomes the antilinear
//! map `sigma(x1, x2) = (t conj x2, conj x1)` on each coordinate pair, and submodules are the
//! complex subspaces closed under `sigma`. A submodule is represented by an `N x k` matrix
//! whose columns are a free H_t basis.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{HtError, Result};
use crate::linalg::{self, CMat, RANK_RTOL};
use crate::matrix::HtMatrix;
use crate::scalar::{AlgebraContext, HtScalar};

/// `u(f)` for every column of `f`.
pub fn first_columns(f: &HtMatrix) -> CMat {
    CMat::from_fn(2 * f.nrows(), f.ncols(), |r, c| {
        let q = f[(r / 2, c)];
        if r % 2 == 0 {
            q.a
        } else {
            q.b.conj()
        }
    })
}

pub fn from_first_column(u: &DVector<Complex64>) -> HtMatrix {
    let n = u.len() / 2;
    HtMatrix::from_fn(n, 1, |r, _| HtScalar::new(u[2 * r], u[2 * r + 1].conj()))
}

pub fn from_first_columns(w: &CMat) -> HtMatrix {
    let n = w.nrows() / 2;
    HtMatrix::from_fn(n, w.ncols(), |r, c| HtScalar::new(w[(2 * r, c)], w[(2 * r + 1, c)].conj()))
}

pub fn sigma(u: &DVector<Complex64>, ctx: &AlgebraContext) -> DVector<Complex64> {
    let t = ctx.t();
    DVector::from_fn(u.len(), |r, _| if r % 2 == 0 { u[r + 1].conj() * t } else { u[r - 1].conj() })
}

/// Orthonormal basis of the complex subspace spanned by a submodule basis.
pub fn complex_span(basis: &HtMatrix, ctx: &AlgebraContext) -> CMat {
    linalg::colspace(&basis.embed(ctx), RANK_RTOL)
}

fn residual_against(q: &CMat, v: &DVector<Complex64>) -> DVector<Complex64> {
    if q.ncols() == 0 {
        return v.clone();
    }
    let coeff = q.adjoint() * v;
    v - q * coeff
}

fn push_orthonormal(q: &mut CMat, v: &DVector<Complex64>) {
    // two passes of Gram-Schmidt
    let mut r = residual_against(q, v);
    r = residual_against(q, &r);
    let n = r.norm();
    let col = r / Complex64::new(n, 0.0);
    let k = q.ncols();
    let mut next = CMat::zeros(q.nrows(), k + 1);
    next.view_mut((0, 0), (q.nrows(), k)).copy_from(q);
    next.set_column(k, &col);
    *q = next;
}

/// Free H_t basis of a sigma-closed complex subspace given by an orthonormal basis `w`.
pub fn module_basis(w: &CMat, ctx: &AlgebraContext) -> Result<HtMatrix> {
    let n2 = w.nrows();
    let d = w.ncols();
    if d == 0 {
        return Ok(HtMatrix::zeros(n2 / 2, 0));
    }
    let sw = CMat::from_fn(n2, d, |r, c| {
        let col = w.column(c).into_owned();
        sigma(&col, ctx)[r]
    });
    let leak = linalg::max_abs(&(&sw - w * (w.adjoint() * &sw)));
    if leak > 1e-7 * (1.0 + linalg::max_abs(&sw)) {
        return Err(HtError::InternalInconsistency(format!(
            "subspace is not closed under right multiplication by j_t (leak {leak:.3e})"
        )));
    }
    if !d.is_multiple_of(2) {
        return Err(HtError::NonFreeSubmodule);
    }
    let mut candidates: Vec<DVector<Complex64>> = (0..d).map(|c| w.column(c).into_owned()).collect();
    let mix = Complex64::new(0.37, 0.71);
    for i in 0..d {
        for j in 0..d {
            if i != j {
                candidates.push(w.column(i) + w.column(j) * mix);
            }
        }
    }
    let mut q = CMat::zeros(n2, 0);
    let mut chosen: Vec<DVector<Complex64>> = Vec::with_capacity(d / 2);
    while q.ncols() < d {
        let mut best: Option<(f64, DVector<Complex64>)> = None;
        for cand in &candidates {
            let u = residual_against(&q, cand);
            let un = u.norm();
            if un < 1e-8 {
                continue;
            }
            let u = u / Complex64::new(un, 0.0);
            let su = residual_against(&q, &sigma(&u, ctx));
            let pair = CMat::from_columns(&[u.clone(), su]);
            let s = linalg::singular_values(&pair);
            let score = s.last().copied().unwrap_or(0.0);
            if best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, u));
            }
        }
        let Some((score, u)) = best else { return Err(HtError::NonFreeSubmodule) };
        if score < 1e-8 {
            return Err(HtError::NonFreeSubmodule);
        }
        push_orthonormal(&mut q, &u);
        push_orthonormal(&mut q, &sigma(&u, ctx));
        chosen.push(u);
    }
    Ok(from_first_columns(&CMat::from_columns(&chosen)))
}

/// Relative deviation of `span(basis)` from being `A`-invariant; zero when invariant.
pub fn invariance_defect(basis: &HtMatrix, a: &HtMatrix, ctx: &AlgebraContext) -> f64 {
    if basis.ncols() == 0 {
        return 0.0;
    }
    let q = complex_span(basis, ctx);
    let ea = a.embed(ctx);
    let aq = &ea * &q;
    let out = &aq - &q * (q.adjoint() * &aq);
    linalg::max_abs(&out) / (1.0 + linalg::max_abs(&ea))
}

/// Whether two bases span the same submodule.
pub fn same_span(x: &HtMatrix, y: &HtMatrix, ctx: &AlgebraContext, tol: f64) -> bool {
    if x.ncols() != y.ncols() || x.nrows() != y.nrows() {
        return false;
    }
    let qx = complex_span(x, ctx);
    let qy = complex_span(y, ctx);
    qx.ncols() == qy.ncols() && linalg::max_abs(&(&qx * qx.adjoint() - &qy * qy.adjoint())) < tol
}

/// Submodule spanned by the listed coordinate axes.
pub fn coordinate_submodule(n: usize, axes: &[usize]) -> HtMatrix {
    HtMatrix::from_fn(n, axes.len(), |r, c| if axes[c] == r { HtScalar::ONE } else { HtScalar::ZERO })
}

/// The distinct proper nonzero submodules `span{u, sigma u}` generated by eigenvectors `u`
/// of the embedding of `A`.
pub fn eigen_submodules(a: &HtMatrix, ctx: &AlgebraContext) -> Result<Vec<HtMatrix>> {
    let n = a.nrows();
    let e = a.embed(ctx);
    let ev = linalg::eigenvalues(&e).ok_or(HtError::EigenFailure)?;
    let mut out: Vec<HtMatrix> = Vec::new();
    for lambda in ev {
        let shifted = &e - CMat::identity(2 * n, 2 * n) * lambda;
        let u = linalg::smallest_singular_vector(&shifted);
        let pair = CMat::from_columns(&[u.clone(), sigma(&u, ctx)]);
        let span = linalg::colspace(&pair, 1e-8);
        if span.ncols() != 2 {
            continue;
        }
        let basis = match module_basis(&span, ctx) {
            Ok(b) => b,
            Err(HtError::NonFreeSubmodule) => continue,
            Err(err) => return Err(err),
        };
        if basis.ncols() == n {
            continue;
        }
        if out.iter().any(|m| same_span(m, &basis, ctx, 1e-6)) {
            continue;
        }
        out.push(basis);
    }
    Ok(out)
}
