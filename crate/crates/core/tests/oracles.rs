mod common;

use approx::assert_abs_diff_eq;
use common::*;
use ht_rational::constructors::{
    blaschke_circle, blaschke_line, blaschke_line_pair, brune_section, star_product, theta_builder, SeriesHt,
    SERIES_ORDER,
};
use ht_rational::matrix::{eigenpair, kernel_positivity_check, positive_factorize, quadratic_form_matrix};
use ht_rational::realization::{max_pointwise_difference, node_adjoint, node_inverse, node_product};
use ht_rational::structured::{
    embed_t, kernel_lhs, make_phi_from_psi, solve_certificate, t_certificate, verify_certificate,
    CertificateKind, Geometry, Signature, LINE_GRID,
};
use ht_rational::{AlgebraContext, HtError, HtMatrix, HtScalar, Node};
use num_complex::Complex64;
use rand::Rng;

const TS: [f64; 4] = [-1.0, -0.5, 0.5, 2.0];

fn inv(c: &AlgebraContext, x: HtScalar) -> HtScalar {
    c.inverse(x, 1e-14).unwrap()
}

#[test]
fn product_matches_cayley_table() {
    let mut r = rng(1);
    for &t in &TS {
        let c = ctx(t);
        for _ in 0..200 {
            let (p, s) = (rand_scalar(&mut r, 2.0), rand_scalar(&mut r, 2.0));
            assert!(c.mul(p, s).approx_eq(&cayley_mul(p, s, t), 1e-13));
        }
    }
}

#[test]
fn matrix_product_matches_embedding() {
    let mut r = rng(2);
    for &t in &TS {
        let c = ctx(t);
        for _ in 0..20 {
            let (n, k, m) = (r.random_range(1..=6), r.random_range(1..=6), r.random_range(1..=6));
            let a = rand_matrix(&mut r, n, k, 1.0);
            let b = rand_matrix(&mut r, k, m, 1.0);
            let direct = a.mul(&b, &c).unwrap().embed(&c);
            let via = a.embed(&c) * b.embed(&c);
            let err = (direct - &via).norm() / via.norm();
            assert!(err < 1e-13, "{err}");
        }
    }
}

#[test]
fn bilinear_form_is_trace_of_embedding() {
    let mut r = rng(3);
    for &t in &TS {
        let c = ctx(t);
        for _ in 0..100 {
            let (p, s) = (rand_scalar(&mut r, 1.0), rand_scalar(&mut r, 1.0));
            let tr = c.embed(p.star()).mul(&c.embed(s)).trace();
            assert_abs_diff_eq!(c.bilinear(p, s), tr.re, epsilon = 1e-13);
            assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-13);
        }
    }
}

#[test]
fn line_blaschke_closed_form() {
    let mut r = rng(4);
    for &t in &TS {
        let c = ctx(t);
        let alpha = q([0.6, 0.2, -0.1, 0.3]);
        let (node, cert) = blaschke_line(alpha, c).unwrap();
        assert_abs_diff_eq!(cert.h[(0, 0)].re(), -1.0 / 1.2, epsilon = 1e-15);
        for _ in 0..10 {
            let x: f64 = r.random_range(-0.4..0.4);
            let expect = c.mul(HtScalar::ONE + alpha.star() * x, inv(&c, HtScalar::ONE - alpha * x));
            assert!(node.eval(x).unwrap()[(0, 0)].approx_eq(&expect, 1e-12));
        }
    }
}

#[test]
fn circle_blaschke_closed_form() {
    for &t in &TS {
        let c = ctx(t);
        let alpha = q([0.3, -0.2, 0.1, 0.2]);
        let (node, cert) = blaschke_circle(alpha, c).unwrap();
        assert_abs_diff_eq!(cert.h[(0, 0)].re(), 1.0 - c.norm_form(alpha), epsilon = 1e-15);
        for x in [-0.35, -0.1, 0.2, 0.3] {
            let expect = c.mul(inv(&c, HtScalar::ONE - alpha.star() * x), HtScalar::real(x) - alpha);
            assert!(node.eval(x).unwrap()[(0, 0)].approx_eq(&expect, 1e-12));
        }
    }
}

#[test]
fn line_pair_closed_form() {
    let c = ctx(-1.0);
    let (alpha, beta) = (q([0.4, 0.1, 0.2, 0.0]), q([-0.3, 0.2, 0.0, 0.5]));
    let (node, _, _) = blaschke_line_pair(alpha, beta, c).unwrap();
    for x in [-0.3, 0.1, 0.25] {
        let v = node.eval(x).unwrap();
        let d1 = c.mul(HtScalar::ONE + beta.star() * x, inv(&c, HtScalar::ONE - alpha * x));
        let d2 = c.mul(inv(&c, HtScalar::ONE - beta * x), HtScalar::ONE + alpha.star() * x);
        assert!(v[(0, 0)].approx_eq(&d1, 1e-12));
        assert!(v[(1, 1)].approx_eq(&d2, 1e-12));
        assert!(v[(0, 1)].coord_norm() < 1e-13 && v[(1, 0)].coord_norm() < 1e-13);
    }
    // alpha = beta^star gives C = diag(2 Re alpha, 1), still a valid realization
    let a = q([0.3, 0.1, 0.2, -0.4]);
    let (node, j, cert) = blaschke_line_pair(a, a.star(), c).unwrap();
    let rep = verify_certificate(&node, Some(&j), &cert, CertificateKind::LineJUnitary, &LINE_GRID, 1e-9).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn brune_closed_form_and_certificate() {
    let c = ctx(-1.0);
    let (node, j, cert) = brune_section(HtScalar::J, HtScalar::ONE, HtScalar::ONE, 1.0, c, 1e-12).unwrap();
    for x in [-0.3, 0.2] {
        // I - x [1; 1] (1 - j x)^{-1} [1, -1]
        let g = inv(&c, HtScalar::ONE - HtScalar::J * x) * x;
        let expect = HtMatrix::from_rows(&[vec![HtScalar::ONE - g, g], vec![-g, HtScalar::ONE + g]]).unwrap();
        assert!(node.eval(x).unwrap().approx_eq(&expect, 1e-12));
    }
    let rep = verify_certificate(&node, Some(&j), &cert, CertificateKind::LineJUnitary, &LINE_GRID, 1e-9).unwrap();
    assert!(rep.passed(), "{rep:?}");
    let solved = solve_certificate(&node, Some(&j), CertificateKind::LineJUnitary, 1e-8).unwrap();
    assert!(solved.h.approx_eq(&cert.h, 1e-9));
    assert!(matches!(
        brune_section(HtScalar::ONE, HtScalar::ONE, HtScalar::ONE, 1.0, c, 1e-12),
        Err(HtError::PreconditionViolated(_))
    ));
}

#[test]
fn theta_single_zero_closed_form() {
    for &t in &[-1.0, -0.5] {
        let c = ctx(t);
        let alpha = q([0.3, 0.2, -0.2, 0.1]);
        let th = theta_builder(&[alpha], c, 1e-12).unwrap();
        let one = HtScalar::ONE;
        // the closed form is written in the state entry a = alpha^star
        let a = th.node.a()[(0, 0)];
        assert!(a.approx_eq(&alpha.star(), 0.0));
        for x in [-0.4, -0.1, 0.15, 0.4] {
            let expect = c.mul(
                c.mul(c.mul(inv(&c, one - a * x), HtScalar::real(x) - a.star()), one - a),
                inv(&c, one - a.star()),
            );
            assert!(th.node.eval(x).unwrap()[(0, 0)].approx_eq(&expect, 1e-12));
        }
    }
}

#[test]
fn star_product_of_conjugate_blaschkes_is_real() {
    let c = ctx(-1.0);
    let alpha = q([0.3, 0.4, -0.2, 0.1]);
    let (ba, _) = blaschke_circle(alpha, c).unwrap();
    let (bs, _) = blaschke_circle(alpha.star(), c).unwrap();
    let f = SeriesHt::from_node(&ba, SERIES_ORDER).unwrap();
    let g = SeriesHt::from_node(&bs, SERIES_ORDER).unwrap();
    assert!(f.coeffs[0].approx_eq(&-alpha, 1e-15));
    let prod = star_product(&f, &g, &c);
    for coeff in &prod.coeffs {
        assert!(coeff.is_real(1e-13), "{coeff:?}");
    }
    let det = c.norm_form(alpha);
    let x0 = alpha.re();
    let mut r = rng(5);
    for _ in 0..20 {
        let mut p = rand_scalar(&mut r, 1.0);
        // spectral norm of the embedding of p is at most |a| + |b| for t = -1
        p = p * (0.3 * r.random::<f64>() / (p.a.norm() + p.b.norm()));
        let p2 = c.mul(p, p);
        let num = p2 - p * (2.0 * x0) + HtScalar::real(det);
        let den = p2 * det - p * (2.0 * x0) + HtScalar::ONE;
        let expect = c.mul(num, inv(&c, den));
        assert!(prod.eval(p, &c).approx_eq(&expect, 1e-10));
    }
}

#[test]
fn phi_from_psi_matches_closed_form() {
    let c = ctx(-1.0);
    let p0 = q([0.3, 0.2, -0.4, 0.1]);
    let geo = Node::new(HtMatrix::scalar(p0), HtMatrix::scalar(p0), HtMatrix::identity(1), HtMatrix::identity(1), c).unwrap();
    let psi = node_product(&geo, &geo).unwrap();
    let one = HtScalar::ONE;
    let sq = |s: HtScalar| c.mul(s, s);
    let (line, _) = make_phi_from_psi(&psi, Geometry::Line).unwrap();
    let (circle, cert) = make_phi_from_psi(&psi, Geometry::Circle).unwrap();
    for x in [-0.3, -0.05, 0.2, 0.35] {
        let psi_x = sq(inv(&c, one - p0 * x));
        let line_expect = psi_x - sq(inv(&c, one + p0.star() * x));
        assert!(line.eval(x).unwrap()[(0, 0)].approx_eq(&line_expect, 1e-12));
        let circle_expect = psi_x - sq(inv(&c, HtScalar::real(x) - p0.star())) * (x * x);
        assert!(circle.eval(x).unwrap()[(0, 0)].approx_eq(&circle_expect, 1e-12));
    }
    let rep = verify_certificate(&circle, None, &cert, CertificateKind::CircleAntiSym, &LINE_GRID, 1e-9).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn t_embedding_certificates() {
    let c = ctx(-1.0);
    // line: phi = x (1 - x p)^{-1} with zero real part p, H = 1
    let p = q([0.0, 0.3, 0.2, -0.1]);
    let phi = Node::new(HtMatrix::scalar(p), HtMatrix::identity(1), HtMatrix::identity(1), HtMatrix::zeros(1, 1), c).unwrap();
    let cert = solve_certificate(&phi, None, CertificateKind::LineAntiSym, 1e-9).unwrap();
    let t = embed_t(&phi).unwrap();
    let tc = t_certificate(&cert).unwrap();
    let j = Signature::antidiag(1);
    let rep = verify_certificate(&t, Some(&j), &tc, CertificateKind::LineJUnitary, &LINE_GRID, 1e-9).unwrap();
    assert!(rep.passed(), "{rep:?}");
    let solved = solve_certificate(&t, Some(&j), CertificateKind::LineJUnitary, 1e-8).unwrap();
    assert!(solved.h.approx_eq(&cert.h.neg(), 1e-9));

    // circle: phi = (1 + x p0)(1 - x p0)^{-1} / 2 with p0 p0^star = 1
    let p0 = q([0.6, 0.0, 0.0, 0.8]);
    let phi = Node::new(HtMatrix::scalar(p0), HtMatrix::identity(1), HtMatrix::scalar(p0), HtMatrix::scalar(HtScalar::real(0.5)), c)
        .unwrap();
    let x = 0.2;
    let expect = c.mul(HtScalar::ONE + p0 * x, inv(&c, HtScalar::ONE - p0 * x)) * 0.5;
    assert!(phi.eval(x).unwrap()[(0, 0)].approx_eq(&expect, 1e-12));
    let cert = solve_certificate(&phi, None, CertificateKind::CircleAntiSym, 1e-9).unwrap();
    assert!(cert.h.approx_eq(&HtMatrix::identity(1), 1e-9));
    let t = embed_t(&phi).unwrap();
    let tc = t_certificate(&cert).unwrap();
    let rep = verify_certificate(&t, Some(&j), &tc, CertificateKind::CircleJUnitary, &LINE_GRID, 1e-9).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn kernel_positivity_follows_sign_of_h() {
    let c = ctx(-1.0);
    let j = Signature::identity(1);
    let pts = [0.05, 0.1, 0.2, 0.3];
    for (alpha, positive) in [(q([-0.5, 0.2, 0.1, 0.3]), true), (q([0.5, 0.2, 0.1, 0.3]), false)] {
        let (node, _) = blaschke_line(alpha, c).unwrap();
        let k = |x: f64, y: f64| kernel_lhs(&node, Some(&j), CertificateKind::LineJUnitary, x, y);
        assert_eq!(kernel_positivity_check(&pts, k, &c, 1e-9).unwrap(), positive);
        let neg = |x: f64, y: f64| k(x, y).map(|m| m.neg());
        assert_eq!(kernel_positivity_check(&pts, neg, &c, 1e-9).unwrap(), !positive);
    }
}

#[test]
fn ff_star_on_a_fixed_matrix() {
    let c = ctx(-1.0);
    let g = HtMatrix::from_rows(&[
        vec![q([1.0, 0.5, 0.0, -0.2]), q([0.0, 1.0, 0.3, 0.0])],
        vec![q([0.2, 0.0, 1.0, 1.0]), q([0.5, -0.5, 0.0, 0.1])],
    ])
    .unwrap();
    let m = g.mul(&g.star(), &c).unwrap();
    let f = positive_factorize(&m, &c, 1e-10).unwrap();
    assert!(f.mul(&f.star(), &c).unwrap().approx_eq(&m, 1e-12));
    assert_eq!(f[(0, 1)], HtScalar::ZERO);
    let qf = quadratic_form_matrix(&m, &c).unwrap();
    assert!((&qf - qf.transpose()).abs().max() < 1e-14);
}

#[test]
fn eigenpair_selection_order() {
    let c = ctx(-1.0);
    // embedding eigenvalues of 0.5 + 0.5 i are 0.5 +- 0.5 i; of -0.8 real
    let a = HtMatrix::diag(&[q([0.5, 0.5, 0.0, 0.0]), HtScalar::real(-0.6)]);
    let (f, l) = eigenpair(&a, &c, 1e-9).unwrap();
    assert!((l - Complex64::new(0.5, 0.5)).norm() < 1e-12);
    let lhs = a.mul(&f, &c).unwrap();
    let rhs = f.right_scalar_mul(HtScalar::new(l, Complex64::new(0.0, 0.0)), &c);
    assert!(lhs.approx_eq(&rhs, 1e-12));
}

#[test]
fn inverse_and_adjoint_nodes() {
    let c = ctx(0.5);
    let mut r = rng(6);
    let a = rand_matrix(&mut r, 2, 2, 0.5);
    let node = Node::new(a, rand_matrix(&mut r, 2, 1, 1.0), rand_matrix(&mut r, 1, 2, 1.0), HtMatrix::scalar(q([1.0, 0.2, 0.1, 0.0])), c).unwrap();
    let ni = node_inverse(&node).unwrap();
    let na = node_adjoint(&node);
    for x in [-0.2, 0.1, 0.3] {
        let v = node.eval(x).unwrap();
        let prod = v.mul(&ni.eval(x).unwrap(), &c).unwrap();
        assert!(prod.approx_eq(&HtMatrix::identity(1), 1e-11));
        assert!(na.eval(x).unwrap().approx_eq(&v.star(), 1e-12));
    }
    let prod = node_product(&node, &ni).unwrap();
    let id = Node::constant(HtMatrix::identity(1), c);
    assert!(max_pointwise_difference(&prod, &id, &[0.1, 0.2]).unwrap() < 1e-11);
}
