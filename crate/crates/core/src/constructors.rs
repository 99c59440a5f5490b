//! Elementary structured functions: Blaschke factors on the line and on the circle, the
//! Brune section, finite Blaschke products through a Stein equation, and power series with
//! the `⋆`-product.

use crate::error::{HtError, Result};
use crate::linalg::{self, RANK_RTOL};
use crate::matrix::HtMatrix;
use crate::realization::Node;
use crate::scalar::{AlgebraContext, HtScalar};
use crate::structured::{certificate_equations, Certificate, CertificateKind, Signature};

/// Spectral radius below which the Stein equation is accepted.
pub const SPECTRAL_RADIUS_LIMIT: f64 = 1.0 - 1e-6;
/// Default truncation order for power series.
pub const SERIES_ORDER: usize = 64;

fn residual_of(node: &Node, j: Option<&Signature>, kind: CertificateKind, h: &HtMatrix) -> Result<f64> {
    Ok(certificate_equations(node, j, kind, h)?
        .iter()
        .map(|(_, m)| m.norm(node.ctx()))
        .fold(0.0, f64::max))
}

fn scalar_node(a: HtScalar, b: HtScalar, c: HtScalar, d: HtScalar, ctx: AlgebraContext) -> Node {
    Node::new(HtMatrix::scalar(a), HtMatrix::scalar(b), HtMatrix::scalar(c), HtMatrix::scalar(d), ctx)
        .expect("1x1 blocks")
}

/// `b(x) = (1 + x alpha^star)(1 - x alpha)^{-1}`, J-unitary on the line with `J = 1`
/// and certificate `h = -1 / (alpha + alpha^star)`.
pub fn blaschke_line(alpha: HtScalar, ctx: AlgebraContext) -> Result<(Node, Certificate)> {
    let s = alpha + alpha.star();
    if s.re().abs() <= 1e-12 * (1.0 + alpha.coord_norm()) {
        return Err(HtError::DegenerateAlpha);
    }
    let node = scalar_node(alpha, s, HtScalar::ONE, HtScalar::ONE, ctx);
    let h = HtMatrix::scalar(HtScalar::real(-1.0 / s.re()));
    let kind = CertificateKind::LineJUnitary;
    let residual = residual_of(&node, Some(&Signature::identity(1)), kind, &h)?;
    Ok((node, Certificate { kind, h, residual }))
}

/// The 2x2 line J-unitary function `diag((1 + x beta^star)(1 - x alpha)^{-1},
/// (1 - x beta)^{-1}(1 + x alpha^star))` realized with `A = diag(alpha, beta)`,
/// `C = diag(alpha + beta^star, 1)`, `D = I`, `J = -[[0, 1], [1, 0]]` and
/// `H = [[0, 1], [1, 0]]`.
pub fn blaschke_line_pair(
    alpha: HtScalar,
    beta: HtScalar,
    ctx: AlgebraContext,
) -> Result<(Node, Signature, Certificate)> {
    let s = alpha + beta.star();
    if s.coord_norm() <= 1e-12 * (1.0 + alpha.coord_norm() + beta.coord_norm()) {
        return Err(HtError::DegeneratePair);
    }
    let node = Node::new(
        HtMatrix::diag(&[alpha, beta]),
        HtMatrix::diag(&[HtScalar::ONE, s.star()]),
        HtMatrix::diag(&[s, HtScalar::ONE]),
        HtMatrix::identity(2),
        ctx,
    )?;
    let j = Signature::new(HtMatrix::antidiag_identity(1).neg(), &ctx, 1e-14)?;
    let h = HtMatrix::antidiag_identity(1);
    let kind = CertificateKind::LineJUnitary;
    let residual = residual_of(&node, Some(&j), kind, &h)?;
    Ok((node, j, Certificate { kind, h, residual }))
}

/// The Brune section `I - (x/h) [beta; gamma] (1 - alpha x)^{-1} [beta^star, -gamma^star]`
/// with `alpha = -alpha^star`, `beta beta^star = gamma gamma^star`, real `h != 0` and
/// `J = diag(1, -1)`. It is J-unitary on the line with certificate `h`.
pub fn brune_section(
    alpha: HtScalar,
    beta: HtScalar,
    gamma: HtScalar,
    h: f64,
    ctx: AlgebraContext,
    tol: f64,
) -> Result<(Node, Signature, Certificate)> {
    if (alpha + alpha.star()).coord_norm() > tol {
        return Err(HtError::PreconditionViolated("alpha must satisfy alpha = -alpha^star".into()));
    }
    let (nb, ng) = (ctx.norm_form(beta), ctx.norm_form(gamma));
    if (nb - ng).abs() > tol * (1.0 + nb.abs()) {
        return Err(HtError::PreconditionViolated("beta beta^star must equal gamma gamma^star".into()));
    }
    if h == 0.0 || !h.is_finite() {
        return Err(HtError::PreconditionViolated("h must be a nonzero real number".into()));
    }
    let c = HtMatrix::column(&[beta, gamma]);
    let b = HtMatrix::from_rows(&[vec![beta.star() * (-1.0 / h), gamma.star() * (1.0 / h)]])?;
    let node = Node::new(HtMatrix::scalar(alpha), b, c, HtMatrix::identity(2), ctx)?;
    let j = Signature::new(HtMatrix::diag(&[HtScalar::ONE, HtScalar::real(-1.0)]), &ctx, 1e-14)?;
    let hm = HtMatrix::scalar(HtScalar::real(h));
    let kind = CertificateKind::LineJUnitary;
    let residual = residual_of(&node, Some(&j), kind, &hm)?;
    Ok((node, j, Certificate { kind, h: hm, residual }))
}

/// `b(x) = (1 - x alpha^star)^{-1}(x - alpha)`, J-unitary on the circle with `J = 1` and
/// certificate `h = 1 - alpha alpha^star`.
pub fn blaschke_circle(alpha: HtScalar, ctx: AlgebraContext) -> Result<(Node, Certificate)> {
    let h = 1.0 - ctx.norm_form(alpha);
    if h.abs() <= 1e-12 {
        return Err(HtError::UnimodularAlpha);
    }
    let node = scalar_node(alpha.star(), HtScalar::ONE, HtScalar::real(h), -alpha, ctx);
    let hm = HtMatrix::scalar(HtScalar::real(h));
    let kind = CertificateKind::CircleJUnitary;
    let residual = residual_of(&node, Some(&Signature::identity(1)), kind, &hm)?;
    Ok((node, Certificate { kind, h: hm, residual }))
}

#[derive(Debug, Clone)]
pub struct SteinSolution {
    pub g: HtMatrix,
    /// Distance between the linear solve and the truncated series.
    pub series_discrepancy: f64,
    pub series_terms: usize,
    pub series_converged: bool,
}

/// Solve `G - A^star G A = C^star C` for `rho(A) < 1`, by a linear solve over
/// star-symmetric `G`, checked against `sum_n A^{star n} C^star C A^n`.
pub fn stein_solve(a: &HtMatrix, c: &HtMatrix, ctx: &AlgebraContext, tol: f64) -> Result<SteinSolution> {
    if !a.is_square() || c.ncols() != a.nrows() {
        return Err(HtError::SizeMismatch("Stein equation needs A square and C with matching columns".into()));
    }
    let nst = a.nrows();
    let rho = linalg::spectral_radius(&a.embed(ctx)).ok_or(HtError::EigenFailure)?;
    if rho >= SPECTRAL_RADIUS_LIMIT {
        return Err(HtError::SpectralRadiusTooLarge(rho));
    }
    let as_ = a.star();
    let rhs = c.star().mul(c, ctx)?;
    let eq = |g: &HtMatrix| -> HtMatrix {
        g.sub(&as_.mul(g, ctx).and_then(|x| x.mul(a, ctx)).expect("square"))
            .and_then(|x| x.sub(&rhs))
            .expect("square")
    };
    let (x, _) = linalg::solve_affine(HtMatrix::star_symmetric_dim(nst), |x| {
        eq(&HtMatrix::star_symmetric_from_params(nst, x)).to_real_vec()
    });
    let g = HtMatrix::star_symmetric_from_params(nst, &x);
    let res = eq(&g).norm(ctx);
    let scale = 1.0 + g.norm(ctx) + rhs.norm(ctx);
    if res > tol * scale {
        return Err(HtError::InternalInconsistency(format!("Stein residual {res:.3e}")));
    }
    // series
    let mut sum = HtMatrix::zeros(nst, nst);
    let mut term = rhs.clone();
    let mut terms = 0;
    let mut converged = false;
    while terms < 100_000 {
        sum = sum.add(&term)?;
        terms += 1;
        if term.norm(ctx) <= 1e-3 * tol * scale {
            converged = true;
            break;
        }
        term = as_.mul(&term, ctx)?.mul(a, ctx)?;
    }
    let series_discrepancy = sum.dist(&g, ctx)?;
    if converged && series_discrepancy > tol.sqrt() * scale {
        return Err(HtError::InternalInconsistency(format!(
            "Stein solve and series differ by {series_discrepancy:.3e}"
        )));
    }
    Ok(SteinSolution { g, series_discrepancy, series_terms: terms, series_converged: converged })
}

/// The finite Blaschke product with zeros `alpha_1..alpha_N`, built from
/// `A = diag(alpha_i^star)`, `C = [1 ... 1]` and the Stein solution `G`, normalized by
/// `Theta(1) = 1`.
#[derive(Debug, Clone)]
pub struct ThetaProduct {
    pub node: Node,
    pub stein: SteinSolution,
}

pub fn theta_builder(alphas: &[HtScalar], ctx: AlgebraContext, tol: f64) -> Result<ThetaProduct> {
    let nst = alphas.len();
    let a = HtMatrix::diag(&alphas.iter().map(|q| q.star()).collect::<Vec<_>>());
    let c = HtMatrix::from_fn(1, nst, |_, _| HtScalar::ONE);
    let stein = stein_solve(&a, &c, &ctx, tol)?;
    let g_inv = stein.g.inverse(&ctx, RANK_RTOL).map_err(|_| HtError::GramSingular)?;
    let id = HtMatrix::identity(nst);
    let w = g_inv.mul(&id.sub(&a.star())?.inverse(&ctx, RANK_RTOL)?, &ctx)?.mul(&c.star(), &ctx)?;
    let b = id.sub(&a)?.mul(&w, &ctx)?;
    let d = HtMatrix::identity(1).sub(&c.mul(&w, &ctx)?)?;
    Ok(ThetaProduct { node: Node::new(a, b, c, d, ctx)?, stein })
}

impl ThetaProduct {
    pub fn certificate(&self) -> Result<Certificate> {
        let kind = CertificateKind::CircleJUnitary;
        let residual = residual_of(&self.node, Some(&Signature::identity(1)), kind, &self.stein.g)?;
        Ok(Certificate { kind, h: self.stein.g.clone(), residual })
    }

    /// `1 - (1 - x) C (I - x A)^{-1} G^{-1} (I - A^star)^{-1} C^star`.
    pub fn alt_eval(&self, x: f64) -> Result<HtMatrix> {
        let n = &self.node;
        let ctx = n.ctx();
        let id = HtMatrix::identity(n.state_dim());
        let left = id.sub(&n.a().scale(x))?.inverse(ctx, RANK_RTOL).map_err(|_| HtError::PoleAt(x))?;
        let right = id.sub(&n.a().star())?.inverse(ctx, RANK_RTOL)?;
        let g_inv = self.stein.g.inverse(ctx, RANK_RTOL)?;
        let body = n.c().mul(&left, ctx)?.mul(&g_inv, ctx)?.mul(&right, ctx)?.mul(&n.c().star(), ctx)?;
        HtMatrix::identity(1).sub(&body.scale(1.0 - x))
    }

    /// Residuals of `A^star G A + C^star C = G`, `B^star G A + D^star C = 0` and
    /// `B^star G B + D^star D = 1`, each divided by `1 +` the product of the factor norms
    /// of its terms (the scale of the rounding error when `G` is ill-conditioned).
    pub fn identity_residuals(&self) -> Result<[f64; 3]> {
        let n = &self.node;
        let ctx = n.ctx();
        let g = &self.stein.g;
        let (a, b, c, d) = (n.a(), n.b(), n.c(), n.d());
        let (na, nb, nc, nd, ng) = (a.norm(ctx), b.norm(ctx), c.norm(ctx), d.norm(ctx), g.norm(ctx));
        let r1 = a.star().mul(g, ctx)?.mul(a, ctx)?.add(&c.star().mul(c, ctx)?)?.sub(g)?;
        let r2 = b.star().mul(g, ctx)?.mul(a, ctx)?.add(&d.star().mul(c, ctx)?)?;
        let r3 = b.star().mul(g, ctx)?.mul(b, ctx)?.add(&d.star().mul(d, ctx)?)?.sub(&HtMatrix::identity(1))?;
        Ok([
            r1.norm(ctx) / (1.0 + na * ng * na + nc * nc + ng),
            r2.norm(ctx) / (1.0 + nb * ng * na + nd * nc),
            r3.norm(ctx) / (1.0 + nb * ng * nb + nd * nd),
        ])
    }
}

/// A truncated power series `sum_n f_n q^n` with coefficients on the left.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesHt {
    pub coeffs: Vec<HtScalar>,
}

impl SeriesHt {
    /// Taylor coefficients at 0 of a scalar realization: `D, CB, CAB, CA^2B, ...`.
    pub fn from_node(node: &Node, order: usize) -> Result<Self> {
        if node.input_dim() != 1 || node.output_dim() != 1 {
            return Err(HtError::SizeMismatch("series expansion needs a scalar function".into()));
        }
        let ctx = node.ctx();
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(node.d()[(0, 0)]);
        let mut ab = node.b().clone();
        for _ in 1..=order {
            let v = if node.state_dim() == 0 { HtScalar::ZERO } else { node.c().mul(&ab, ctx)?[(0, 0)] };
            coeffs.push(v);
            if node.state_dim() > 0 {
                ab = node.a().mul(&ab, ctx)?;
            }
        }
        Ok(Self { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `sum_n f_n q^n`.
    pub fn eval(&self, q: HtScalar, ctx: &AlgebraContext) -> HtScalar {
        let mut acc = HtScalar::ZERO;
        let mut qn = HtScalar::ONE;
        for f in &self.coeffs {
            acc += ctx.mul(*f, qn);
            qn = ctx.mul(qn, q);
        }
        acc
    }
}

/// Cauchy product of coefficient sequences, truncated at the smaller order.
pub fn star_product(f: &SeriesHt, g: &SeriesHt, ctx: &AlgebraContext) -> SeriesHt {
    let k = f.coeffs.len().min(g.coeffs.len());
    let coeffs = (0..k)
        .map(|n| {
            let mut s = HtScalar::ZERO;
            for i in 0..=n {
                s += ctx.mul(f.coeffs[i], g.coeffs[n - i]);
            }
            s
        })
        .collect();
    SeriesHt { coeffs }
}

pub fn star_eval(f: &SeriesHt, q: HtScalar, ctx: &AlgebraContext) -> HtScalar {
    f.eval(q, ctx)
}
