//! Structured classes of rational functions and their Hermitian certificates.
//!
//! Four classes are supported. A J-unitary function on the line satisfies
//! `R(x) J R(-x)^star = J`, on the circle `R(x) J R(1/x)^star = J`. An anti-symmetric function
//! satisfies `phi(x) + phi(-x)^star = 0`, respectively `phi(x) + phi(1/x)^star = 0`. A minimal
//! realization of such a function carries a unique invertible star-symmetric `H` solving a
//! set of linear equations; that `H` is the certificate.

use std::fmt;
use std::str::FromStr;

use crate::batch;
use crate::error::{HtError, Result};
use crate::linalg::{self, RANK_RTOL};
use crate::matrix::{stack_real, HtMatrix};
use crate::realization::Node;
use crate::scalar::AlgebraContext;

/// Default sample points on the real line.
pub const LINE_GRID: [f64; 10] = [-0.35, -0.3, -0.2, -0.1, -0.05, 0.05, 0.1, 0.2, 0.3, 0.35];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    LineJUnitary,
    CircleJUnitary,
    LineAntiSym,
    CircleAntiSym,
}

/// Line (symmetry `x -> -x`) or circle (symmetry `x -> 1/x`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    Line,
    Circle,
}

impl CertificateKind {
    pub const ALL: [CertificateKind; 4] = [
        CertificateKind::LineJUnitary,
        CertificateKind::CircleJUnitary,
        CertificateKind::LineAntiSym,
        CertificateKind::CircleAntiSym,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::LineJUnitary => "line-junitary",
            Self::CircleJUnitary => "circle-junitary",
            Self::LineAntiSym => "line-antisym",
            Self::CircleAntiSym => "circle-antisym",
        }
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            Self::LineJUnitary | Self::LineAntiSym => Geometry::Line,
            Self::CircleJUnitary | Self::CircleAntiSym => Geometry::Circle,
        }
    }

    pub fn is_junitary(&self) -> bool {
        matches!(self, Self::LineJUnitary | Self::CircleJUnitary)
    }

    pub fn junitary(g: Geometry) -> Self {
        match g {
            Geometry::Line => Self::LineJUnitary,
            Geometry::Circle => Self::CircleJUnitary,
        }
    }

    pub fn antisym(g: Geometry) -> Self {
        match g {
            Geometry::Line => Self::LineAntiSym,
            Geometry::Circle => Self::CircleAntiSym,
        }
    }
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CertificateKind {
    type Err = HtError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HtError::PreconditionViolated(format!("unknown certificate kind '{s}'")))
    }
}

impl Geometry {
    fn denominator(&self, x: f64, y: f64) -> f64 {
        match self {
            Geometry::Line => x + y,
            Geometry::Circle => 1.0 - x * y,
        }
    }

    /// The reflection of `x`: `-x` on the line, `1/x` on the circle.
    pub fn reflect(&self, x: f64) -> f64 {
        match self {
            Geometry::Line => -x,
            Geometry::Circle => 1.0 / x,
        }
    }
}

/// A signature matrix: `J = J^star`, `J^2 = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    j: HtMatrix,
}

impl Signature {
    pub fn new(j: HtMatrix, ctx: &AlgebraContext, tol: f64) -> Result<Self> {
        if !j.is_square() {
            return Err(HtError::SizeMismatch("signature must be square".into()));
        }
        let d = j.star_symmetry_defect(ctx);
        if d > tol {
            return Err(HtError::NotStarSymmetric(d));
        }
        let sq = j.mul(&j, ctx)?.dist(&HtMatrix::identity(j.nrows()), ctx)?;
        if sq > tol {
            return Err(HtError::PreconditionViolated(format!("J^2 != I (deviation {sq:.3e})")));
        }
        Ok(Self { j })
    }

    pub fn identity(n: usize) -> Self {
        Self { j: HtMatrix::identity(n) }
    }

    /// `[[0, I_n], [I_n, 0]]`.
    pub fn antidiag(n: usize) -> Self {
        Self { j: HtMatrix::antidiag_identity(n) }
    }

    pub fn matrix(&self) -> &HtMatrix {
        &self.j
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub h: HtMatrix,
    /// Largest equation residual when the certificate was produced.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualEntry {
    pub label: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub kind: CertificateKind,
    pub entries: Vec<ResidualEntry>,
    pub tol: f64,
    pub samples_used: usize,
    pub pairs_used: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.value <= self.tol)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.value).fold(0.0, f64::max)
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.label == label).map(|e| e.value)
    }
}

fn square_function(node: &Node) -> Result<()> {
    if node.input_dim() != node.output_dim() {
        return Err(HtError::SizeMismatch(format!(
            "structured classes need square values, got {}x{}",
            node.output_dim(),
            node.input_dim()
        )));
    }
    Ok(())
}

fn signature_for<'a>(node: &Node, j: Option<&'a Signature>, kind: CertificateKind) -> Result<Option<&'a HtMatrix>> {
    if !kind.is_junitary() {
        return Ok(None);
    }
    let j = j.ok_or_else(|| HtError::PreconditionViolated(format!("{kind} needs a signature J")))?;
    if j.dim() != node.output_dim() {
        return Err(HtError::SizeMismatch(format!(
            "signature is {0}x{0}, function values are {1}x{1}",
            j.dim(),
            node.output_dim()
        )));
    }
    Ok(Some(j.matrix()))
}

/// Residual matrices of the certificate equations for `kind` at a candidate `H`.
pub fn certificate_equations(
    node: &Node,
    j: Option<&Signature>,
    kind: CertificateKind,
    h: &HtMatrix,
) -> Result<Vec<(&'static str, HtMatrix)>> {
    square_function(node)?;
    let jm = signature_for(node, j, kind)?;
    let ctx = node.ctx();
    let (a, b, c, d) = (node.a(), node.b(), node.c(), node.d());
    let (as_, bs, cs, ds) = (a.star(), b.star(), c.star(), d.star());
    let out = match kind {
        CertificateKind::LineJUnitary => {
            let j = jm.expect("checked");
            let cj = cs.mul(j, ctx)?;
            vec![
                ("lyapunov", as_.mul(h, ctx)?.add(&h.mul(a, ctx)?)?.add(&cj.mul(c, ctx)?)?),
                ("coupling", h.mul(b, ctx)?.add(&cj.mul(d, ctx)?)?),
                ("d-unitary", d.mul(j, ctx)?.mul(&ds, ctx)?.sub(j)?),
            ]
        }
        CertificateKind::CircleJUnitary => {
            let j = jm.expect("checked");
            let cj = cs.mul(j, ctx)?;
            let ah = as_.mul(h, ctx)?;
            vec![
                ("stein", ah.mul(a, ctx)?.add(&cj.mul(c, ctx)?)?.sub(h)?),
                ("coupling", ah.mul(b, ctx)?.add(&cj.mul(d, ctx)?)?),
                (
                    "feedthrough",
                    bs.mul(h, ctx)?.mul(b, ctx)?.add(&ds.mul(j, ctx)?.mul(d, ctx)?)?.sub(j)?,
                ),
            ]
        }
        CertificateKind::LineAntiSym => vec![
            ("lyapunov", as_.mul(h, ctx)?.add(&h.mul(a, ctx)?)?),
            ("coupling", h.mul(b, ctx)?.sub(&cs)?),
            ("d-skew", d.add(&ds)?),
        ],
        CertificateKind::CircleAntiSym => {
            let ah = as_.mul(h, ctx)?;
            vec![
                ("stein", ah.mul(a, ctx)?.sub(h)?),
                ("coupling", ah.mul(b, ctx)?.sub(&cs)?),
                ("feedthrough", bs.mul(h, ctx)?.mul(b, ctx)?.sub(&d.add(&ds)?)?),
            ]
        }
    };
    Ok(out)
}

/// Solve for the certificate of a minimal realization. `H` is parametrized by its
/// independent real coordinates so that `H = H^star` holds exactly. The solution is
/// accepted when every equation residual is below `tol (1 + |A| + |B| + |C| + |D|)` and
/// `H` is well conditioned.
pub fn solve_certificate(
    node: &Node,
    j: Option<&Signature>,
    kind: CertificateKind,
    tol: f64,
) -> Result<Certificate> {
    square_function(node)?;
    signature_for(node, j, kind)?;
    if !node.is_minimal() {
        return Err(HtError::NotMinimal);
    }
    let ctx = *node.ctx();
    let nst = node.state_dim();
    match kind {
        CertificateKind::LineJUnitary => {
            if !node.d().is_invertible(&ctx, RANK_RTOL) {
                return Err(HtError::DNotInvertible);
            }
        }
        CertificateKind::CircleJUnitary | CertificateKind::CircleAntiSym => {
            if !node.a().is_invertible(&ctx, RANK_RTOL) {
                return Err(HtError::AInvertibilityRequired);
            }
        }
        CertificateKind::LineAntiSym => {}
    }
    let dim = HtMatrix::star_symmetric_dim(nst);
    let (x, _) = linalg::solve_affine(dim, |x| {
        let h = HtMatrix::star_symmetric_from_params(nst, x);
        let eqs = certificate_equations(node, j, kind, &h).expect("shapes checked");
        stack_real(&eqs.into_iter().map(|(_, m)| m).collect::<Vec<_>>())
    });
    let h = HtMatrix::star_symmetric_from_params(nst, &x);
    let eqs = certificate_equations(node, j, kind, &h)?;
    let residual = eqs.iter().map(|(_, m)| m.norm(&ctx)).fold(0.0, f64::max);
    let bound = tol * (1.0 + node.size_norm());
    if residual > bound {
        let worst = eqs
            .iter()
            .max_by(|p, q| p.1.norm(&ctx).total_cmp(&q.1.norm(&ctx)))
            .map(|(l, _)| *l)
            .unwrap_or("none");
        return Err(HtError::NotInClass(format!(
            "{kind}: residual {residual:.3e} exceeds {bound:.3e} (worst equation: {worst})"
        )));
    }
    if nst > 0 && linalg::inverse_condition(&h.embed(&ctx)) <= RANK_RTOL {
        return Err(HtError::NotInClass(format!("{kind}: certificate H is singular")));
    }
    Ok(Certificate { kind, h, residual })
}

/// `C (I - x A)^{-1} H^{-1} (I - y A^star)^{-1} C^star`.
pub fn kernel_rhs(node: &Node, h_inv: &HtMatrix, x: f64, y: f64) -> Result<HtMatrix> {
    let ctx = node.ctx();
    let nst = node.state_dim();
    if nst == 0 {
        return Ok(HtMatrix::zeros(node.output_dim(), node.output_dim()));
    }
    let id = HtMatrix::identity(nst);
    let left = id.sub(&node.a().scale(x))?.inverse(ctx, RANK_RTOL).map_err(|_| HtError::PoleAt(x))?;
    let right = id.sub(&node.a().star().scale(y))?.inverse(ctx, RANK_RTOL).map_err(|_| HtError::PoleAt(y))?;
    node.c().mul(&left, ctx)?.mul(h_inv, ctx)?.mul(&right, ctx)?.mul(&node.c().star(), ctx)
}

/// The left side of the kernel identity: `(J - R(x) J R(y)^star) / d(x, y)` for J-unitary
/// kinds, `(phi(x) + phi(y)^star) / d(x, y)` for anti-symmetric kinds, with
/// `d = x + y` on the line and `d = 1 - x y` on the circle.
pub fn kernel_lhs(node: &Node, j: Option<&Signature>, kind: CertificateKind, x: f64, y: f64) -> Result<HtMatrix> {
    let ctx = node.ctx();
    let den = kind.geometry().denominator(x, y);
    let rx = node.eval(x)?;
    let ry = node.eval(y)?;
    let num = if kind.is_junitary() {
        let j = signature_for(node, j, kind)?.expect("J-unitary kind");
        j.sub(&rx.mul(j, ctx)?.mul(&ry.star(), ctx)?)?
    } else {
        rx.add(&ry.star())?
    };
    Ok(num.scale(1.0 / den))
}

fn functional_residual(node: &Node, j: Option<&HtMatrix>, kind: CertificateKind, x: f64) -> Result<f64> {
    let ctx = node.ctx();
    let rx = node.eval(x)?;
    let rr = node.eval(kind.geometry().reflect(x))?;
    let (m, size) = match j {
        Some(j) => (rx.mul(j, ctx)?.mul(&rr.star(), ctx)?.sub(j)?, rx.norm(ctx) * rr.norm(ctx) * j.norm(ctx)),
        None => (rx.add(&rr.star())?, rx.norm(ctx) + rr.norm(ctx)),
    };
    Ok(m.norm(ctx) / (1.0 + size))
}

/// Check a certificate against a realization: the algebraic equations, the functional
/// identity at the sample points, the kernel identity on sample pairs and a class-specific
/// consequence. Functional and kernel residuals are divided by `1 + size of the terms`, so
/// samples close to a pole do not report rounding noise as a defect. Sample points where
/// the function or its reflection has a pole are skipped.
pub fn verify_certificate(
    node: &Node,
    j: Option<&Signature>,
    cert: &Certificate,
    kind: CertificateKind,
    xs: &[f64],
    tol: f64,
) -> Result<VerificationReport> {
    if cert.kind != kind {
        return Err(HtError::KindMismatch { expected: kind.name().into(), found: cert.kind.name().into() });
    }
    square_function(node)?;
    let jm = signature_for(node, j, kind)?;
    let ctx = *node.ctx();
    let geom = kind.geometry();
    if cert.h.shape() != (node.state_dim(), node.state_dim()) {
        return Err(HtError::SizeMismatch("certificate size differs from the state dimension".into()));
    }
    let mut entries = vec![ResidualEntry { label: "h-symmetry", value: cert.h.star_symmetry_defect(&ctx) }];
    for (label, m) in certificate_equations(node, j, kind, &cert.h)? {
        entries.push(ResidualEntry { label, value: m.norm(&ctx) });
    }
    let h_inv = cert.h.inverse(&ctx, RANK_RTOL).map_err(|_| HtError::NotInClass("certificate H is singular".into()))?;

    // points where both x and its reflection are regular
    let regular: Vec<f64> = batch::map(xs, |&x| {
        let ok = x.is_finite()
            && (geom == Geometry::Line || x != 0.0)
            && node.eval(x).is_ok()
            && node.eval(geom.reflect(x)).is_ok();
        ok.then_some(x)
    })
    .into_iter()
    .flatten()
    .collect();

    let functional = batch::max_ok(batch::map(&regular, |&x| functional_residual(node, jm, kind, x)))?;
    entries.push(ResidualEntry { label: "functional", value: functional });

    let mut pairs = Vec::new();
    for (i, &x) in regular.iter().enumerate() {
        for &y in &regular[i..] {
            if geom.denominator(x, y).abs() > 1e-3 {
                pairs.push((x, y));
            }
        }
    }
    let kernel = batch::max_ok(batch::map(&pairs, |&(x, y)| -> Result<f64> {
        let lhs = kernel_lhs(node, j, kind, x, y)?;
        let rhs = kernel_rhs(node, &h_inv, x, y)?;
        Ok(lhs.dist(&rhs, &ctx)? / (1.0 + rhs.norm(&ctx)))
    }))?;
    entries.push(ResidualEntry { label: "kernel", value: kernel });

    match kind {
        CertificateKind::LineJUnitary => {
            // H^{-1} A^star H = -A^x
            if let Ok(inv) = crate::realization::node_inverse(node) {
                let lhs = h_inv.mul(&node.a().star(), &ctx)?.mul(&cert.h, &ctx)?;
                entries.push(ResidualEntry { label: "a-cross", value: lhs.add(inv.a())?.norm(&ctx) });
            }
        }
        CertificateKind::CircleJUnitary => {
            // A^x A^Delta = I with A^Delta = H^{-1} A^star H
            if let Ok(inv) = crate::realization::node_inverse(node) {
                let delta = h_inv.mul(&node.a().star(), &ctx)?.mul(&cert.h, &ctx)?;
                let prod = inv.a().mul(&delta, &ctx)?;
                let id = HtMatrix::identity(node.state_dim());
                entries.push(ResidualEntry { label: "a-cross-delta", value: prod.dist(&id, &ctx)? });
            }
        }
        CertificateKind::LineAntiSym => {
            let hc = h_inv.mul(&node.c().star(), &ctx)?;
            let alt = Node::new(node.a().clone(), hc, node.c().clone(), node.d().clone(), ctx)?;
            let v = crate::realization::max_pointwise_difference(node, &alt, &regular)?;
            entries.push(ResidualEntry { label: "real-form", value: v });
        }
        CertificateKind::CircleAntiSym => {
            let v = batch::max_ok(batch::map(&regular, |&x| -> Result<f64> {
                circle_antisym_alt_eval(node, &h_inv, x)?.dist(&node.eval(x)?, &ctx)
            }))?;
            entries.push(ResidualEntry { label: "real-form", value: v });
        }
    }
    Ok(VerificationReport { kind, entries, tol, samples_used: regular.len(), pairs_used: pairs.len() })
}

/// `(D - D^star)/2 + C (I + x A)(I - x A)^{-1} H^{-1} C^star / 2`.
pub fn circle_antisym_alt_eval(node: &Node, h_inv: &HtMatrix, x: f64) -> Result<HtMatrix> {
    let ctx = node.ctx();
    let d = node.d();
    let skew = d.sub(&d.star())?.scale(0.5);
    let nst = node.state_dim();
    if nst == 0 {
        return Ok(skew);
    }
    let id = HtMatrix::identity(nst);
    let ax = node.a().scale(x);
    let res = id.sub(&ax)?.inverse(ctx, RANK_RTOL).map_err(|_| HtError::PoleAt(x))?;
    let mid = id.add(&ax)?.mul(&res, ctx)?;
    let body = node.c().mul(&mid, ctx)?.mul(h_inv, ctx)?.mul(&node.c().star(), ctx)?;
    skew.add(&body.scale(0.5))
}

/// The anti-symmetric function `phi = psi - psi^#` built from a square `psi`, where
/// `psi^#(x) = psi(-x)^star` on the line and `psi(1/x)^star` on the circle (the circle
/// version also needs `A` invertible). The returned certificate is `[[0, I], [I, 0]]`.
pub fn make_phi_from_psi(psi: &Node, geometry: Geometry) -> Result<(Node, Certificate)> {
    square_function(psi)?;
    let ctx = *psi.ctx();
    let nst = psi.state_dim();
    let (a, b, c, d) = (psi.a(), psi.b(), psi.c(), psi.d());
    let node = match geometry {
        Geometry::Line => Node::new(
            HtMatrix::block_diag(a, &a.star().neg()),
            b.vstack(&c.star())?,
            c.hstack(&b.star())?,
            d.sub(&d.star())?,
            ctx,
        )?,
        Geometry::Circle => {
            let ais = a.inverse(&ctx, RANK_RTOL).map_err(|_| HtError::AInvertibilityRequired)?.star();
            Node::new(
                HtMatrix::block_diag(a, &ais),
                b.vstack(&ais.mul(&c.star(), &ctx)?)?,
                c.hstack(&b.star().mul(&ais, &ctx)?)?,
                d.sub(&d.star())?.add(&b.star().mul(&ais, &ctx)?.mul(&c.star(), &ctx)?)?,
                ctx,
            )?
        }
    };
    let kind = CertificateKind::antisym(geometry);
    let h = HtMatrix::antidiag_identity(nst);
    let residual = certificate_equations(&node, None, kind, &h)?
        .iter()
        .map(|(_, m)| m.norm(&ctx))
        .fold(0.0, f64::max);
    Ok((node, Certificate { kind, h, residual }))
}

/// `T = [[I, phi], [0, I]]` realized as `(A, [0, B], [C; 0], [[I, D], [0, I]])`.
pub fn embed_t(phi: &Node) -> Result<Node> {
    square_function(phi)?;
    let ctx = *phi.ctx();
    let n = phi.output_dim();
    let nst = phi.state_dim();
    let id = HtMatrix::identity(n);
    let zero = HtMatrix::zeros(n, n);
    Node::new(
        phi.a().clone(),
        HtMatrix::zeros(nst, n).hstack(phi.b())?,
        phi.c().vstack(&HtMatrix::zeros(n, nst))?,
        HtMatrix::from_blocks(&id, phi.d(), &zero, &id)?,
        ctx,
    )
}

/// The certificate of `T` from one of `phi`: the J-unitary kind of the same geometry with
/// `J = [[0, I], [I, 0]]` and `H_T = -H`.
pub fn t_certificate(phi_cert: &Certificate) -> Result<Certificate> {
    if phi_cert.kind.is_junitary() {
        return Err(HtError::KindMismatch {
            expected: "an anti-symmetric kind".into(),
            found: phi_cert.kind.name().into(),
        });
    }
    Ok(Certificate {
        kind: CertificateKind::junitary(phi_cert.kind.geometry()),
        h: phi_cert.h.neg(),
        residual: phi_cert.residual,
    })
}
