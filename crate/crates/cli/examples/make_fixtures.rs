//! Regenerates the documents in `fixtures/`:
//! `cargo run -p ht-rational-cli --example make_fixtures`

use ht_rational::constructors::{blaschke_circle, blaschke_line, blaschke_line_pair, brune_section, theta_builder};
use ht_rational::realization::node_product;
use ht_rational::structured::{make_phi_from_psi, solve_certificate, Certificate, CertificateKind, Geometry, Signature};
use ht_rational::subspace::coordinate_submodule;
use ht_rational::{AlgebraContext, HtMatrix, HtScalar, Node};
use ht_rational_cli::document::{MatrixDocument, NodeDocument};
use std::path::{Path, PathBuf};

fn q(x: [f64; 4]) -> HtScalar {
    HtScalar::from_coords(x)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    let path = |name: &str| -> PathBuf { dir.join(name) };
    let ctx = AlgebraContext::quaternions();
    let one = Signature::identity(1);

    let (node, cert) = blaschke_line(HtScalar::real(2.0), ctx)?;
    NodeDocument::from_node(&node)
        .with_signature(Some(&one))
        .with_certificate(&cert)
        .with_label("description", "line Blaschke factor with alpha = 2")
        .write(&path("blaschke-line.json"))?;

    let (node, cert) = blaschke_circle(q([0.3, -0.2, 0.1, 0.2]), ctx)?;
    NodeDocument::from_node(&node)
        .with_signature(Some(&one))
        .with_certificate(&cert)
        .with_label("description", "circle Blaschke factor")
        .write(&path("blaschke-circle.json"))?;

    let (node, j, cert) = brune_section(q([0.0, 0.5, 0.25, 0.0]), q([1.0, 0.0, 0.0, 0.0]), q([0.0, 0.6, 0.8, 0.0]), 2.0, ctx, 1e-12)?;
    NodeDocument::from_node(&node)
        .with_signature(Some(&j))
        .with_certificate(&cert)
        .with_label("description", "Brune section with h = 2")
        .write(&path("brune.json"))?;

    let (node, j, cert) = blaschke_line_pair(q([0.5, 0.2, 0.0, 0.1]), q([0.3, 0.0, 0.4, 0.0]), ctx)?;
    NodeDocument::from_node(&node)
        .with_signature(Some(&j))
        .with_certificate(&cert)
        .with_label("description", "2x2 J-unitary pair; every eigen-derived subspace is H-degenerate")
        .write(&path("blaschke-pair.json"))?;

    let th = theta_builder(&[q([0.5, 0.0, 0.0, 0.0]), q([0.2, 0.1, 0.0, 0.3]), q([-0.1, 0.0, 0.4, 0.1])], ctx, 1e-12)?;
    NodeDocument::from_node(&th.node)
        .with_signature(Some(&one))
        .with_certificate(&th.certificate()?)
        .with_label("description", "finite Blaschke product with three zeros")
        .write(&path("theta.json"))?;

    let (b1, _) = blaschke_line(q([0.6, 0.2, -0.1, 0.3]), ctx)?;
    let (b2, _) = blaschke_line(q([-0.4, 0.1, 0.3, 0.0]), ctx)?;
    let product = node_product(&b1, &b2)?;
    let kind = CertificateKind::LineJUnitary;
    let cert = solve_certificate(&product, Some(&one), kind, 1e-10)?;
    NodeDocument::from_node(&product)
        .with_signature(Some(&one))
        .with_certificate(&cert)
        .with_label("description", "product of two line Blaschke factors")
        .write(&path("line-product.json"))?;
    MatrixDocument::new(HtMatrix::diag(&[HtScalar::ZERO, HtScalar::ONE])).write(&path("projection-e2.json"))?;
    MatrixDocument::new(coordinate_submodule(2, &[0])).write(&path("subspace-e1.json"))?;
    MatrixDocument::new(coordinate_submodule(2, &[0, 1])).write(&path("subspace-full.json"))?;

    // psi with one pole p0 != -p0^star: phi has no nontrivial decomposition
    let psi = Node::new(
        HtMatrix::scalar(q([0.4, 0.3, -0.2, 0.1])),
        HtMatrix::identity(1),
        HtMatrix::identity(1),
        HtMatrix::zeros(1, 1),
        ctx,
    )?;
    NodeDocument::from_node(&psi).with_label("description", "psi(x) = x (1 - x p0)^{-1}").write(&path("psi.json"))?;
    for (g, name) in [(Geometry::Line, "phi-line.json"), (Geometry::Circle, "phi-circle.json")] {
        let (phi, cert) = make_phi_from_psi(&psi, g)?;
        NodeDocument::from_node(&phi)
            .with_certificate(&cert)
            .with_label("description", "anti-symmetric function built from psi.json")
            .write(&path(name))?;
    }

    // x (1 - x p)^{-1} + x (1 - x r)^{-1} with p, r purely imaginary, H = I
    let phi = Node::new(
        HtMatrix::diag(&[q([0.0, 0.3, 0.0, 0.0]), q([0.0, 0.0, 0.5, 0.2])]),
        HtMatrix::column(&[HtScalar::ONE, HtScalar::ONE]),
        HtMatrix::from_rows(&[vec![HtScalar::ONE, HtScalar::ONE]])?,
        HtMatrix::zeros(1, 1),
        ctx,
    )?;
    let cert = Certificate { kind: CertificateKind::LineAntiSym, h: HtMatrix::identity(2), residual: 0.0 };
    NodeDocument::from_node(&phi)
        .with_certificate(&cert)
        .with_label("description", "sum of two line anti-symmetric terms")
        .write(&path("phi-sum.json"))?;
    Ok(())
}
