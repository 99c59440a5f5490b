//! Realizations `R(x) = D + x C (I - x A)^{-1} B` of rational functions of a real variable
//! with values in H_t matrices.

use crate::batch;
use crate::error::{HtError, Result};
use crate::linalg::{self, CMat, RANK_RTOL};
use crate::matrix::HtMatrix;
use crate::scalar::AlgebraContext;

/// A realization `(A, B, C, D)` with state dimension `N`, `m` inputs and `n` outputs:
/// `A` is `N x N`, `B` is `N x m`, `C` is `n x N` and `D` is `n x m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    a: HtMatrix,
    b: HtMatrix,
    c: HtMatrix,
    d: HtMatrix,
    ctx: AlgebraContext,
}

impl Node {
    pub fn new(a: HtMatrix, b: HtMatrix, c: HtMatrix, d: HtMatrix, ctx: AlgebraContext) -> Result<Self> {
        let nst = a.nrows();
        let ok = a.is_square()
            && b.nrows() == nst
            && c.ncols() == nst
            && d.nrows() == c.nrows()
            && d.ncols() == b.ncols();
        if !ok {
            return Err(HtError::SizeMismatch(format!(
                "A {:?}, B {:?}, C {:?}, D {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        Ok(Self { a, b, c, d, ctx })
    }

    /// The constant function `D` with state dimension zero.
    pub fn constant(d: HtMatrix, ctx: AlgebraContext) -> Self {
        let (n, m) = d.shape();
        Self { a: HtMatrix::zeros(0, 0), b: HtMatrix::zeros(0, m), c: HtMatrix::zeros(n, 0), d, ctx }
    }

    pub fn a(&self) -> &HtMatrix {
        &self.a
    }
    pub fn b(&self) -> &HtMatrix {
        &self.b
    }
    pub fn c(&self) -> &HtMatrix {
        &self.c
    }
    pub fn d(&self) -> &HtMatrix {
        &self.d
    }
    pub fn ctx(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }
    pub fn input_dim(&self) -> usize {
        self.d.ncols()
    }
    pub fn output_dim(&self) -> usize {
        self.d.nrows()
    }

    /// Sum of the embedded norms of the four blocks.
    pub fn size_norm(&self) -> f64 {
        let c = &self.ctx;
        self.a.norm(c) + self.b.norm(c) + self.c.norm(c) + self.d.norm(c)
    }

    pub fn eval(&self, x: f64) -> Result<HtMatrix> {
        self.eval_with(x, RANK_RTOL)
    }

    /// Evaluate at `x`; `PoleAt(x)` when `sigma_min / sigma_max` of `I - x A` is below `rtol`.
    pub fn eval_with(&self, x: f64, rtol: f64) -> Result<HtMatrix> {
        if self.state_dim() == 0 {
            return Ok(self.d.clone());
        }
        let ctx = &self.ctx;
        let ea = self.a.embed(ctx);
        let m = CMat::identity(ea.nrows(), ea.ncols()) - ea * linalg::c(x, 0.0);
        let minv = linalg::inverse_checked(&m, rtol).ok_or(HtError::PoleAt(x))?;
        let r = self.d.embed(ctx) + self.c.embed(ctx) * minv * self.b.embed(ctx) * linalg::c(x, 0.0);
        Ok(HtMatrix::unembed_projected(&r, ctx))
    }

    /// `(S^{-1} A S, S^{-1} B, C S, D)`.
    pub fn transform(&self, s: &HtMatrix) -> Result<Self> {
        let ctx = &self.ctx;
        let si = s.inverse(ctx, RANK_RTOL)?;
        Self::new(
            si.mul(&self.a, ctx)?.mul(s, ctx)?,
            si.mul(&self.b, ctx)?,
            self.c.mul(s, ctx)?,
            self.d.clone(),
            *ctx,
        )
    }

    /// Complex dimension of the observable subspace of the embedded node.
    pub fn observability_rank(&self) -> usize {
        let ctx = &self.ctx;
        krylov_basis(&self.a.embed(ctx).adjoint(), &self.c.embed(ctx).adjoint()).ncols()
    }

    /// Complex dimension of the controllable subspace of the embedded node.
    pub fn controllability_rank(&self) -> usize {
        let ctx = &self.ctx;
        krylov_basis(&self.a.embed(ctx), &self.b.embed(ctx)).ncols()
    }

    pub fn is_observable(&self) -> bool {
        self.observability_rank() == 2 * self.state_dim()
    }

    pub fn is_controllable(&self) -> bool {
        self.controllability_rank() == 2 * self.state_dim()
    }

    pub fn is_minimal(&self) -> bool {
        self.is_observable() && self.is_controllable()
    }

    /// McMillan degree over H_t: half the complex dimension of the observable part of the
    /// controllable subspace of the embedded node, which equals the rank of its Hankel matrix.
    pub fn mcmillan_degree(&self) -> Result<usize> {
        if self.state_dim() == 0 {
            return Ok(0);
        }
        let ctx = &self.ctx;
        let ea = self.a.embed(ctx);
        let v = krylov_basis(&ea, &self.b.embed(ctx));
        if v.ncols() == 0 {
            return Ok(0);
        }
        let ac = v.adjoint() * &ea * &v;
        let cc = self.c.embed(ctx) * &v;
        let r = krylov_basis(&ac.adjoint(), &cc.adjoint()).ncols();
        if !r.is_multiple_of(2) {
            return Err(HtError::InternalInconsistency(format!("odd Hankel rank {r}")));
        }
        Ok(r / 2)
    }
}

/// Orthonormal basis of `span{B, AB, A^2 B, ...}`, grown one orthogonalized block at a
/// time so that fast decaying powers of `A` do not hide directions.
fn krylov_basis(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    let scale = 1.0 + linalg::max_abs(a) * n as f64;
    let bscale = linalg::singular_values(b).first().copied().unwrap_or(0.0);
    if bscale == 0.0 {
        return CMat::zeros(n, 0);
    }
    let mut v = linalg::colspace(b, RANK_RTOL);
    let mut fresh = v.clone();
    while v.ncols() < n && fresh.ncols() > 0 {
        let w = a * &fresh;
        let r = &w - &v * (v.adjoint() * &w);
        // twice is enough for orthogonality at working precision
        let r = &r - &v * (v.adjoint() * &r);
        let s = linalg::singular_values(&r);
        let keep = s.iter().filter(|&&x| x > RANK_RTOL * scale).count();
        if keep == 0 {
            break;
        }
        let d = linalg::svd(&r);
        fresh = d.u.columns(0, keep).into_owned();
        let mut next = CMat::zeros(n, v.ncols() + keep);
        next.columns_mut(0, v.ncols()).copy_from(&v);
        next.columns_mut(v.ncols(), keep).copy_from(&fresh);
        v = next;
    }
    v
}

fn same_algebra(r1: &Node, r2: &Node) -> Result<()> {
    if r1.ctx.t() != r2.ctx.t() {
        return Err(HtError::SizeMismatch(format!(
            "realizations over different algebras (t = {} and t = {})",
            r1.ctx.t(),
            r2.ctx.t()
        )));
    }
    Ok(())
}

/// Realization of `R1(x) R2(x)`.
pub fn node_product(r1: &Node, r2: &Node) -> Result<Node> {
    same_algebra(r1, r2)?;
    if r1.input_dim() != r2.output_dim() {
        return Err(HtError::SizeMismatch(format!(
            "product of {}x{} and {}x{} functions",
            r1.output_dim(),
            r1.input_dim(),
            r2.output_dim(),
            r2.input_dim()
        )));
    }
    let ctx = &r1.ctx;
    let (n1, n2) = (r1.state_dim(), r2.state_dim());
    let a = HtMatrix::from_blocks(
        &r1.a,
        &r1.b.mul(&r2.c, ctx)?,
        &HtMatrix::zeros(n2, n1),
        &r2.a,
    )?;
    let b = r1.b.mul(&r2.d, ctx)?.vstack(&r2.b)?;
    let c = r1.c.hstack(&r1.d.mul(&r2.c, ctx)?)?;
    let d = r1.d.mul(&r2.d, ctx)?;
    Node::new(a, b, c, d, *ctx)
}

/// Realization of `R(x)^{-1}`; needs `D` invertible.
pub fn node_inverse(r: &Node) -> Result<Node> {
    let ctx = &r.ctx;
    if !r.d.is_square() {
        return Err(HtError::DNotInvertible);
    }
    let di = r.d.inverse(ctx, RANK_RTOL).map_err(|_| HtError::DNotInvertible)?;
    let bdi = r.b.mul(&di, ctx)?;
    let a = r.a.sub(&bdi.mul(&r.c, ctx)?)?;
    let c = di.mul(&r.c, ctx)?.neg();
    Node::new(a, bdi, c, di, *ctx)
}

/// Realization of `x -> R(x)^star`, namely `D^star + x B^star (I - x A^star)^{-1} C^star`.
pub fn node_adjoint(r: &Node) -> Node {
    Node {
        a: r.a.star(),
        b: r.c.star(),
        c: r.b.star(),
        d: r.d.star(),
        ctx: r.ctx,
    }
}

/// Realization of `R1(x) + R2(x)`.
pub fn node_sum(r1: &Node, r2: &Node) -> Result<Node> {
    same_algebra(r1, r2)?;
    let ctx = &r1.ctx;
    Node::new(
        HtMatrix::block_diag(&r1.a, &r2.a),
        r1.b.vstack(&r2.b)?,
        r1.c.hstack(&r2.c)?,
        r1.d.add(&r2.d)?,
        *ctx,
    )
}

/// The invertible `S` with `S A1 = A2 S`, `S B1 = B2`, `C1 = C2 S` between two minimal
/// realizations of the same function.
pub fn similarity_between(r1: &Node, r2: &Node, tol: f64) -> Result<HtMatrix> {
    same_algebra(r1, r2)?;
    if !r1.is_minimal() || !r2.is_minimal() {
        return Err(HtError::NotMinimal);
    }
    let ctx = r1.ctx;
    let shapes_agree = r1.state_dim() == r2.state_dim()
        && r1.input_dim() == r2.input_dim()
        && r1.output_dim() == r2.output_dim();
    if !shapes_agree {
        return Err(HtError::NotSimilar(f64::INFINITY));
    }
    let scale = 1.0 + r1.size_norm() + r2.size_norm();
    let dd = r1.d.dist(&r2.d, &ctx)?;
    if dd > tol * scale {
        return Err(HtError::NotSimilar(dd));
    }
    let nst = r1.state_dim();
    let eqs = |s: &HtMatrix| -> Result<Vec<HtMatrix>> {
        Ok(vec![
            s.mul(&r1.a, &ctx)?.sub(&r2.a.mul(s, &ctx)?)?,
            s.mul(&r1.b, &ctx)?.sub(&r2.b)?,
            r1.c.sub(&r2.c.mul(s, &ctx)?)?,
        ])
    };
    let (x, _) = linalg::solve_affine(4 * nst * nst, |x| {
        let s = HtMatrix::from_real_vec(nst, nst, x);
        crate::matrix::stack_real(&eqs(&s).expect("shapes checked"))
    });
    let s = HtMatrix::from_real_vec(nst, nst, &x);
    let res = eqs(&s)?.iter().map(|m| m.norm(&ctx)).fold(0.0, f64::max);
    if res > tol * scale || !s.is_invertible(&ctx, RANK_RTOL) {
        return Err(HtError::NotSimilar(res));
    }
    Ok(s)
}

/// `max_x |R1(x) - R2(x)|` over the sample points, in the embedded Frobenius norm.
pub fn max_pointwise_difference(r1: &Node, r2: &Node, xs: &[f64]) -> Result<f64> {
    let ctx = r1.ctx;
    batch::max_ok(batch::map(xs, |&x| r1.eval(x)?.dist(&r2.eval(x)?, &ctx)))
}
