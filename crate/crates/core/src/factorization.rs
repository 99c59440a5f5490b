//! Minimal factorizations through supporting projections, J-unitary factorizations along
//! nondegenerate invariant submodules and additive decompositions of anti-symmetric
//! functions.

use crate::error::{HtError, Result};
use crate::linalg::RANK_RTOL;
use crate::matrix::{self, FormH, HtMatrix, ProjectionDecomposition};
use crate::realization::{node_inverse, Node};
use crate::scalar::AlgebraContext;
use crate::structured::{
    certificate_equations, embed_t, t_certificate, Certificate, CertificateKind, Geometry, Signature,
};
use crate::subspace;

/// `R = D R~` with `R~ = (A, B, D^{-1} C, I)`.
pub fn normalize_d(node: &Node) -> Result<(HtMatrix, Node)> {
    let ctx = node.ctx();
    if !node.d().is_square() {
        return Err(HtError::DNotInvertible);
    }
    let di = node.d().inverse(ctx, RANK_RTOL).map_err(|_| HtError::DNotInvertible)?;
    let n = Node::new(
        node.a().clone(),
        node.b().clone(),
        di.mul(node.c(), ctx)?,
        HtMatrix::identity(node.output_dim()),
        *ctx,
    )?;
    Ok((node.d().clone(), n))
}

/// `A ker(pi) ⊂ ker(pi)` and `A^x ran(pi) ⊂ ran(pi)` with `A^x = A - B D^{-1} C`.
pub fn is_supporting_projection(node: &Node, pi: &HtMatrix, tol: f64) -> Result<bool> {
    let ctx = node.ctx();
    if pi.shape() != (node.state_dim(), node.state_dim()) {
        return Err(HtError::SizeMismatch("projection size differs from the state dimension".into()));
    }
    let dec = matrix::decompose_projection(pi, ctx, tol)?;
    let ax = node_inverse(node)?.a().clone();
    Ok(subspace::invariance_defect(&dec.kernel_basis, node.a(), ctx) <= tol
        && subspace::invariance_defect(&dec.range_basis, &ax, ctx) <= tol)
}

#[derive(Debug, Clone)]
pub struct FactorPair {
    pub r1: Node,
    pub r2: Node,
    pub decomposition: ProjectionDecomposition,
}

// Split a node in the basis [kernel, range]: the kernel block realizes the left factor.
fn split_in_basis(node: &Node, dec: &ProjectionDecomposition, d1: HtMatrix, d2: HtMatrix) -> Result<(Node, Node)> {
    let ctx = *node.ctx();
    let s = dec.adapted_basis();
    let t = node.transform(&s)?;
    let k = dec.kernel_basis.ncols();
    let nst = node.state_dim();
    let (m, n) = (node.input_dim(), node.output_dim());
    let r1 = Node::new(
        t.a().block(0, 0, k, k),
        t.b().block(0, 0, k, m),
        t.c().block(0, 0, n, k),
        d1,
        ctx,
    )?;
    let r2 = Node::new(
        t.a().block(k, k, nst - k, nst - k),
        t.b().block(k, 0, nst - k, m),
        t.c().block(0, k, n, nst - k),
        d2,
        ctx,
    )?;
    Ok((r1, r2))
}

/// Minimal factorization `R = R1 R2` of a minimal realization with `D = I` along a
/// supporting projection: `R1` lives on `ker(pi)` and `R2` on `ran(pi)`, both with `D = I`.
pub fn factor_from_projection(node: &Node, pi: &HtMatrix, tol: f64) -> Result<FactorPair> {
    let ctx = node.ctx();
    let n = node.output_dim();
    if node.input_dim() != n || node.d().dist(&HtMatrix::identity(n), ctx)? > tol {
        return Err(HtError::PreconditionViolated("D must be the identity; normalize it first".into()));
    }
    if !node.is_minimal() {
        return Err(HtError::NotMinimal);
    }
    if !is_supporting_projection(node, pi, tol)? {
        return Err(HtError::NotSupporting);
    }
    let dec = matrix::decompose_projection(pi, ctx, tol)?;
    let (r1, r2) = split_in_basis(node, &dec, HtMatrix::identity(n), HtMatrix::identity(n))?;
    Ok(FactorPair { r1, r2, decomposition: dec })
}

#[derive(Debug, Clone)]
pub struct JUnitaryFactors {
    pub r1: Node,
    pub r2: Node,
    pub cert1: Certificate,
    pub cert2: Certificate,
    pub decomposition: ProjectionDecomposition,
}

// Common checks for splitting along an invariant submodule: invariance, nondegeneracy and
// the H-orthogonal complement.
fn split_subspace(
    node: &Node,
    h: &HtMatrix,
    m: &HtMatrix,
    tol: f64,
) -> Result<(ProjectionDecomposition, HtMatrix)> {
    let ctx = *node.ctx();
    let nst = node.state_dim();
    if m.nrows() != nst {
        return Err(HtError::SizeMismatch("subspace basis has the wrong number of rows".into()));
    }
    let defect = subspace::invariance_defect(m, node.a(), &ctx);
    if defect > tol {
        return Err(HtError::NotInvariant(defect));
    }
    let form = FormH::new(h.clone(), ctx, tol.max(1e-9))?;
    if !matrix::is_h_nondegenerate(m, &form)? {
        return Err(HtError::DegenerateSubspace);
    }
    let g = matrix::h_orthogonal_complement(m, &form)?;
    if g.ncols() + m.ncols() != nst {
        return Err(HtError::InternalInconsistency("complement has the wrong dimension".into()));
    }
    let dec = ProjectionDecomposition::from_bases(m.clone(), g, &ctx)?;
    let s = dec.adapted_basis();
    let hp = s.star().mul(h, &ctx)?.mul(&s, &ctx)?;
    Ok((dec, hp))
}

fn checked_certificate(
    node: &Node,
    j: Option<&Signature>,
    kind: CertificateKind,
    h: HtMatrix,
    tol: f64,
) -> Result<Certificate> {
    let ctx = node.ctx();
    let residual = certificate_equations(node, j, kind, &h)?
        .iter()
        .map(|(_, m)| m.norm(ctx))
        .fold(0.0, f64::max);
    if residual > tol * (1.0 + node.size_norm() + h.norm(ctx)) {
        return Err(HtError::InternalInconsistency(format!(
            "factor certificate residual {residual:.3e} for {kind}"
        )));
    }
    Ok(Certificate { kind, h, residual })
}

/// J-unitary factorization `R = R1 R2` along an `A`-invariant submodule `M` that is
/// nondegenerate for the certificate form. `R1` has state space `M`, `R2` the
/// H-orthogonal complement. On the line `R1 = D R~1`, `R2 = R~2`. On the circle `R1` is
/// normalized at `x = 1` and `R2 = R1^{-1} R`; this needs `A`, `I - A` and `D` invertible.
pub fn junitary_factor(
    node: &Node,
    j: &Signature,
    cert: &Certificate,
    m: &HtMatrix,
    geometry: Geometry,
    tol: f64,
) -> Result<JUnitaryFactors> {
    let kind = CertificateKind::junitary(geometry);
    if cert.kind != kind {
        return Err(HtError::KindMismatch { expected: kind.name().into(), found: cert.kind.name().into() });
    }
    let ctx = *node.ctx();
    let nst = node.state_dim();
    let id_n = HtMatrix::identity(nst);
    let d_inv = node.d().inverse(&ctx, RANK_RTOL);
    match geometry {
        Geometry::Line => {
            if d_inv.is_err() {
                return Err(HtError::DNotInvertible);
            }
        }
        Geometry::Circle => {
            let ok = d_inv.is_ok()
                && node.a().is_invertible(&ctx, RANK_RTOL)
                && id_n.sub(node.a())?.is_invertible(&ctx, RANK_RTOL);
            if !ok {
                return Err(HtError::CircleInvertibilityRequired);
            }
        }
    }
    let d_inv = d_inv?;
    let (dec, hp) = split_subspace(node, &cert.h, m, tol)?;
    let k = m.ncols();
    let h11 = hp.block(0, 0, k, k);
    let h22 = hp.block(k, k, nst - k, nst - k);
    let n = node.output_dim();
    let (t1, t2) = split_in_basis(node, &dec, node.d().clone(), HtMatrix::identity(n))?;
    let (r1, r2) = match geometry {
        Geometry::Line => {
            let r2 = Node::new(t2.a().clone(), t2.b().clone(), d_inv.mul(t2.c(), &ctx)?, t2.d().clone(), ctx)?;
            (t1, r2)
        }
        Geometry::Circle => {
            let jm = j.matrix();
            let a11 = t1.a();
            let c1 = t1.c();
            let id_k = HtMatrix::identity(k);
            // W = H11^{-1} (I - A11^star)^{-1} C1^star J
            let w = h11
                .inverse(&ctx, RANK_RTOL)?
                .mul(&id_k.sub(&a11.star())?.inverse(&ctx, RANK_RTOL)?, &ctx)?
                .mul(&c1.star(), &ctx)?
                .mul(jm, &ctx)?;
            let d1 = HtMatrix::identity(n).sub(&c1.mul(&w, &ctx)?)?;
            let b1 = id_k.sub(a11)?.mul(&w, &ctx)?;
            let d1_inv = d1.inverse(&ctx, RANK_RTOL).map_err(|_| HtError::CircleInvertibilityRequired)?;
            let r1 = Node::new(a11.clone(), b1, c1.clone(), d1, ctx)?;
            // R2 = U^{-1} R~2 with U = D^{-1} D1
            let r2 = Node::new(
                t2.a().clone(),
                t2.b().clone(),
                d1_inv.mul(t2.c(), &ctx)?,
                d1_inv.mul(node.d(), &ctx)?,
                ctx,
            )?;
            (r1, r2)
        }
    };
    let cert1 = checked_certificate(&r1, Some(j), kind, h11, tol)?;
    let cert2 = checked_certificate(&r2, Some(j), kind, h22, tol)?;
    Ok(JUnitaryFactors { r1, r2, cert1, cert2, decomposition: dec })
}

#[derive(Debug, Clone)]
pub struct AdditiveSummands {
    pub phi1: Node,
    pub phi2: Node,
    pub cert1: Certificate,
    pub cert2: Certificate,
    pub decomposition: ProjectionDecomposition,
}

/// Decomposition `phi = phi1 + phi2` of an anti-symmetric function along an `A`-invariant
/// nondegenerate submodule, obtained by factoring `T = [[I, phi], [0, I]]` and reading the
/// summands off the upper-right blocks of the factors. The constant term is split so that
/// both summands stay in the class; `skew_share2` is the skew part given to `phi2`
/// (zero by default).
pub fn additive_decomposition(
    phi: &Node,
    cert: &Certificate,
    m: &HtMatrix,
    skew_share2: Option<&HtMatrix>,
    tol: f64,
) -> Result<AdditiveSummands> {
    let kind = cert.kind;
    if kind.is_junitary() {
        return Err(HtError::KindMismatch { expected: "an anti-symmetric kind".into(), found: kind.name().into() });
    }
    let ctx = *phi.ctx();
    let n = phi.output_dim();
    let nst = phi.state_dim();
    let share = match skew_share2 {
        Some(s) => {
            if s.shape() != (n, n) || s.add(&s.star())?.norm(&ctx) > tol {
                return Err(HtError::PreconditionViolated("the skew share must be skew".into()));
            }
            s.clone()
        }
        None => HtMatrix::zeros(n, n),
    };
    let t = embed_t(phi)?;
    let t_cert = t_certificate(cert)?;
    let (dec, hp) = split_subspace(&t, &t_cert.h, m, tol)?;
    let hp = hp.neg();
    let k = m.ncols();
    let h11 = hp.block(0, 0, k, k);
    let h22 = hp.block(k, k, nst - k, nst - k);
    let (_, t_norm) = normalize_d(&t)?;
    let (t1, t2) = split_in_basis(&t_norm, &dec, HtMatrix::identity(2 * n), HtMatrix::identity(2 * n))?;
    let upper_right = |f: &Node| -> (HtMatrix, HtMatrix, HtMatrix) {
        let s = f.state_dim();
        (f.a().clone(), f.b().block(0, n, s, n), f.c().block(0, 0, n, s))
    };
    let (a1, b1, c1) = upper_right(&t1);
    let (a2, b2, c2) = upper_right(&t2);
    let d2 = match kind.geometry() {
        Geometry::Line => share,
        Geometry::Circle => b2.star().mul(&h22, &ctx)?.mul(&b2, &ctx)?.scale(0.5).add(&share)?,
    };
    let d1 = phi.d().sub(&d2)?;
    let phi1 = Node::new(a1, b1, c1, d1, ctx)?;
    let phi2 = Node::new(a2, b2, c2, d2, ctx)?;
    let cert1 = checked_certificate(&phi1, None, kind, h11, tol)?;
    let cert2 = checked_certificate(&phi2, None, kind, h22, tol)?;
    Ok(AdditiveSummands { phi1, phi2, cert1, cert2, decomposition: dec })
}

/// The first proper eigen-derived submodule of `A` that is nondegenerate for the form of
/// `H`; `DegenerateSubspace` when all of them are degenerate.
pub fn eigen_split_subspace(a: &HtMatrix, h: &HtMatrix, ctx: &AlgebraContext, tol: f64) -> Result<HtMatrix> {
    let form = FormH::new(h.clone(), *ctx, tol.max(1e-9))?;
    for m in subspace::eigen_submodules(a, ctx)? {
        if matrix::is_h_nondegenerate(&m, &form)? {
            return Ok(m);
        }
    }
    Err(HtError::DegenerateSubspace)
}
