mod common;

use common::*;
use ht_rational::constructors::{
    blaschke_circle, blaschke_line, stein_solve, star_product, theta_builder, SeriesHt,
};
use ht_rational::factorization::is_supporting_projection;
use ht_rational::linalg;
use ht_rational::matrix::{decompose_projection, eigenpair, positive_factorize};
use ht_rational::realization::{
    max_pointwise_difference, node_adjoint, node_inverse, node_product, similarity_between,
};
use ht_rational::structured::{
    kernel_lhs, kernel_rhs, solve_certificate, verify_certificate, CertificateKind, Signature, LINE_GRID,
};
use ht_rational::{AlgebraContext, HtMatrix, HtScalar, Node};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn any_t() -> impl Strategy<Value = f64> {
    prop_oneof![Just(-1.0), Just(-0.5), Just(0.5), Just(1.0), Just(2.0), -3.0..-0.1f64, 0.1..3.0f64]
}

fn neg_t() -> impl Strategy<Value = f64> {
    prop_oneof![Just(-1.0), -3.0..-0.1f64]
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn rel(a: &linalg::CMat, b: &linalg::CMat) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

// a node with a contracted state matrix, so that small x stays away from poles
fn rand_node(r: &mut ChaCha8Rng, nst: usize, m: usize, c: AlgebraContext) -> Node {
    let a = rand_matrix(r, nst, nst, 1.0);
    let ra = linalg::spectral_radius(&a.embed(&c)).unwrap().max(1e-3);
    let a = a.scale(0.8 / ra);
    let d = HtMatrix::identity(m).add(&rand_matrix(r, m, m, 0.1)).unwrap();
    Node::new(a, rand_matrix(r, nst, m, 1.0), rand_matrix(r, m, nst, 1.0), d, c).unwrap()
}

// D + x C (I - x A)^{-1} B computed on the complex embeddings
fn embedded_eval(n: &Node, x: f64) -> linalg::CMat {
    let c = n.ctx();
    let ea = n.a().embed(c);
    let k = ea.nrows();
    let res = (linalg::CMat::identity(k, k) - ea * linalg::c(x, 0.0)).try_inverse().unwrap();
    n.d().embed(c) + n.c().embed(c) * res * n.b().embed(c) * linalg::c(x, 0.0)
}

fn grid() -> Vec<f64> {
    vec![-0.3, -0.15, -0.05, 0.05, 0.15, 0.3]
}

// a line alpha with |alpha + alpha^star| bounded away from 0
fn line_alpha(r: &mut ChaCha8Rng) -> HtScalar {
    let mut a = rand_scalar(r, 1.0);
    let re: f64 = r.random_range(0.1..1.0);
    a.a.re = if r.random::<bool>() { re } else { -re };
    a
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn star_is_an_anti_automorphism(seed in any::<u64>(), t in any_t()) {
        let c = ctx(t);
        let mut r = rng(seed);
        let (p, s) = (rand_scalar(&mut r, 2.0), rand_scalar(&mut r, 2.0));
        prop_assert_eq!(p.star().star(), p);
        prop_assert!(c.mul(p, s).star().approx_eq(&c.mul(s.star(), p.star()), 1e-13));
        prop_assert!(!p.approx_eq(&p.star(), 1e-9) || p.is_real(1e-9));
        let re = HtScalar::real(p.re());
        prop_assert_eq!(re.star(), re);
    }

    #[test]
    fn embedding_is_a_homomorphism(seed in any::<u64>(), t in any_t()) {
        let c = ctx(t);
        let mut r = rng(seed);
        let (p, s) = (rand_scalar(&mut r, 2.0), rand_scalar(&mut r, 2.0));
        let (ep, es) = (c.embed(p).m, c.embed(s).m);
        let sum = c.embed(p + s).m;
        let prod = c.embed(c.mul(p, s)).m;
        let via = c.embed(p).mul(&c.embed(s)).m;
        for i in 0..2 {
            for k in 0..2 {
                prop_assert!((sum[i][k] - ep[i][k] - es[i][k]).norm() < 1e-14);
                prop_assert!((prod[i][k] - via[i][k]).norm() <= 1e-12 * (1.0 + via[i][k].norm()));
            }
        }
        let det = c.embed(p).det();
        prop_assert!((det.re - c.norm_form(p)).abs() <= 1e-12 * (1.0 + det.norm()));
        prop_assert!(det.im.abs() < 1e-12);
        prop_assert!((c.norm_form(p) - c.mul(p, p.star()).re()).abs() < 1e-12);
    }

    #[test]
    fn bilinear_form_is_symmetric(seed in any::<u64>(), t in any_t()) {
        let c = ctx(t);
        let mut r = rng(seed);
        let (p, s) = (rand_scalar(&mut r, 2.0), rand_scalar(&mut r, 2.0));
        prop_assert!((c.bilinear(p, s) - c.bilinear(s, p)).abs() < 1e-12);
        prop_assert!((c.bilinear(p, p) - 2.0 * c.norm_form(p)).abs() < 1e-12);
    }

    #[test]
    fn j_symmetry_is_an_automorphism(seed in any::<u64>(), t in any_t()) {
        let c = ctx(t);
        let mut r = rng(seed);
        let (p, s) = (rand_scalar(&mut r, 2.0), rand_scalar(&mut r, 2.0));
        let lhs = c.mul(p, s).j_symmetry();
        prop_assert!(lhs.approx_eq(&c.mul(p.j_symmetry(), s.j_symmetry()), 1e-13));
        // (a, -b) is conjugation by i
        prop_assert!(p.j_symmetry().approx_eq(&c.mul(c.mul(HtScalar::I, p), -HtScalar::I), 1e-12));
        prop_assert_eq!(p.j_symmetry().j_symmetry(), p);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn matrix_ops_match_embedding(seed in any::<u64>(), t in any_t(), n in 1usize..=8, k in 1usize..=8, m in 1usize..=8) {
        let c = ctx(t);
        let mut r = rng(seed);
        let a = rand_matrix(&mut r, n, k, 1.0);
        let b = rand_matrix(&mut r, k, m, 1.0);
        let a2 = rand_matrix(&mut r, n, k, 1.0);
        prop_assert!(rel(&a.mul(&b, &c).unwrap().embed(&c), &(a.embed(&c) * b.embed(&c))) < 1e-12);
        prop_assert!(rel(&a.add(&a2).unwrap().embed(&c), &(a.embed(&c) + a2.embed(&c))) < 1e-14);
        prop_assert!(a.mul(&b, &c).unwrap().star().approx_eq(&b.star().mul(&a.star(), &c).unwrap(), 1e-12));
    }

    #[test]
    fn svd_reconstructs_embedded_matrices(seed in any::<u64>(), t in any_t(), n in 1usize..=6, k in 1usize..=6) {
        let c = ctx(t);
        let mut r = rng(seed);
        let e = rand_matrix(&mut r, n, k, 1.0).embed(&c);
        let d = linalg::svd(&e);
        let s = linalg::CMat::from_fn(d.u.ncols(), d.v.ncols(), |i, j| linalg::c(if i == j { d.s[i] } else { 0.0 }, 0.0));
        prop_assert!(rel(&(&d.u * s * d.v.adjoint()), &e) < 1e-13);
    }

    #[test]
    fn conjugated_projections_decompose(seed in any::<u64>(), t in any_t(), n in 2usize..=4) {
        let c = ctx(t);
        let mut r = rng(seed);
        let s = HtMatrix::identity(n).scale(2.0).add(&rand_matrix(&mut r, n, n, 0.5)).unwrap();
        prop_assume!(s.is_invertible(&c, 1e-6));
        let k = r.random_range(0..=n);
        let sel = HtMatrix::from_fn(n, n, |i, j| if i == j && i >= k { HtScalar::ONE } else { HtScalar::ZERO });
        let pi = s.inverse(&c, 1e-12).unwrap().mul(&sel, &c).unwrap().mul(&s, &c).unwrap();
        let dec = decompose_projection(&pi, &c, 1e-8).unwrap();
        prop_assert_eq!(dec.kernel_basis.ncols(), k);
        prop_assert_eq!(dec.range_basis.ncols(), n - k);
        prop_assert!(pi.mul(&dec.kernel_basis, &c).unwrap().coord_norm() < 1e-9);
        let back = pi.mul(&dec.range_basis, &c).unwrap();
        prop_assert!(back.dist(&dec.range_basis, &c).unwrap() < 1e-9);
    }

    #[test]
    fn inverse_commutes_with_star(seed in any::<u64>(), t in any_t(), n in 1usize..=6) {
        let c = ctx(t);
        let mut r = rng(seed);
        let a = HtMatrix::identity(n).scale(3.0).add(&rand_matrix(&mut r, n, n, 1.0)).unwrap();
        prop_assume!(a.is_invertible(&c, 1e-8));
        let ai = a.inverse(&c, 1e-12).unwrap();
        let cond = a.norm(&c) * ai.norm(&c);
        let rhs = a.star().inverse(&c, 1e-12).unwrap();
        prop_assert!(ai.star().dist(&rhs, &c).unwrap() < 1e-13 * cond * rhs.norm(&c));
        let id = a.mul(&ai, &c).unwrap();
        prop_assert!(id.dist(&HtMatrix::identity(n), &c).unwrap() < 1e-13 * cond);
    }

    #[test]
    fn symmetric_split(seed in any::<u64>(), t in any_t(), n in 1usize..=6) {
        let c = ctx(t);
        let mut r = rng(seed);
        let a = rand_matrix(&mut r, n, n, 1.0);
        let sym = a.add(&a.star()).unwrap().scale(0.5);
        let skew = a.sub(&a.star()).unwrap().scale(0.5);
        prop_assert!(sym.star_symmetry_defect(&c) < 1e-15);
        prop_assert!(skew.add(&skew.star()).unwrap().coord_norm() < 1e-15);
        prop_assert!(sym.add(&skew).unwrap().approx_eq(&a, 1e-15));
    }

    #[test]
    fn star_symmetric_eigenvalues_are_real(seed in any::<u64>(), t in neg_t(), n in 1usize..=5) {
        let c = ctx(t);
        let mut r = rng(seed);
        let g = rand_matrix(&mut r, n, n, 1.0);
        let a = g.add(&g.star()).unwrap();
        let (f, l) = eigenpair(&a, &c, 1e-9).unwrap();
        prop_assert!(l.im.abs() < 1e-8, "{}", l);
        let lhs = a.mul(&f, &c).unwrap();
        let rhs = f.scale(l.re);
        prop_assert!(lhs.dist(&rhs, &c).unwrap() < 1e-8 * (1.0 + a.norm(&c)));
        for ev in linalg::eigenvalues(&a.embed(&c)).unwrap() {
            prop_assert!(ev.im.abs() < 1e-8);
        }
    }

    #[test]
    fn positive_factorization_reconstructs(seed in any::<u64>(), t in neg_t(), n in 1usize..=5, k in 1usize..=5) {
        let c = ctx(t);
        let mut r = rng(seed);
        let g = rand_matrix(&mut r, n, k, 1.0);
        let m = g.mul(&g.star(), &c).unwrap();
        let f = positive_factorize(&m, &c, 1e-10).unwrap();
        let back = f.mul(&f.star(), &c).unwrap();
        prop_assert!(back.dist(&m, &c).unwrap() < 1e-9 * (1.0 + m.norm(&c)));
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn node_product_inverse_adjoint_pointwise(seed in any::<u64>(), t in any_t(), n1 in 1usize..=3, n2 in 1usize..=3, m in 1usize..=2) {
        let c = ctx(t);
        let mut r = rng(seed);
        let r1 = rand_node(&mut r, n1, m, c);
        let r2 = rand_node(&mut r, n2, m, c);
        let prod = node_product(&r1, &r2).unwrap();
        let inv = node_inverse(&r1).unwrap();
        let adj = node_adjoint(&r1);
        for x in grid() {
            let (v1, v2) = (r1.eval(x), r2.eval(x));
            let (Ok(v1), Ok(v2)) = (v1, v2) else { continue };
            let scale = 1.0 + v1.norm(&c) * v2.norm(&c);
            let p = prod.eval(x).unwrap();
            prop_assert!(p.dist(&v1.mul(&v2, &c).unwrap(), &c).unwrap() < 1e-9 * scale);
            if let Ok(vi) = inv.eval(x) {
                let id = v1.mul(&vi, &c).unwrap();
                prop_assert!(id.dist(&HtMatrix::identity(m), &c).unwrap() < 1e-9 * (1.0 + vi.norm(&c) * v1.norm(&c)));
            }
            prop_assert!(adj.eval(x).unwrap().dist(&v1.star(), &c).unwrap() < 1e-9 * (1.0 + v1.norm(&c)));
            // evaluation commutes with the embedding
            let via = embedded_eval(&prod, x);
            prop_assert!(rel(&p.embed(&c), &via) < 1e-10);
        }
        let (d1, d2, d) = (r1.mcmillan_degree().unwrap(), r2.mcmillan_degree().unwrap(), prod.mcmillan_degree().unwrap());
        prop_assert!(d <= d1 + d2);
    }

    #[test]
    fn similarity_is_recovered(seed in any::<u64>(), t in any_t(), nst in 1usize..=3) {
        let c = ctx(t);
        let mut r = rng(seed);
        let node = rand_node(&mut r, nst, 1, c);
        prop_assume!(node.is_minimal());
        let s = HtMatrix::identity(nst).scale(2.0).add(&rand_matrix(&mut r, nst, nst, 0.5)).unwrap();
        prop_assume!(s.is_invertible(&c, 1e-6));
        let moved = node.transform(&s).unwrap();
        prop_assert!(max_pointwise_difference(&node, &moved, &grid()).unwrap() < 1e-9);
        let found = similarity_between(&node, &moved, 1e-8).unwrap();
        let expect = s.inverse(&c, 1e-12).unwrap();
        prop_assert!(found.dist(&expect, &c).unwrap() < 1e-7 * (1.0 + expect.norm(&c)));
    }

    #[test]
    fn padded_nodes_keep_their_degree(seed in any::<u64>(), t in any_t(), nst in 1usize..=3, pad in 1usize..=2) {
        let c = ctx(t);
        let mut r = rng(seed);
        let node = rand_node(&mut r, nst, 1, c);
        prop_assume!(node.is_minimal());
        let extra = rand_matrix(&mut r, pad, pad, 0.3);
        let a = HtMatrix::block_diag(node.a(), &extra);
        let b = node.b().vstack(&HtMatrix::zeros(pad, 1)).unwrap();
        let cc = node.c().hstack(&rand_matrix(&mut r, 1, pad, 1.0)).unwrap();
        let padded = Node::new(a, b, cc, node.d().clone(), c).unwrap();
        prop_assert!(!padded.is_controllable());
        prop_assert!(!padded.is_minimal());
        prop_assert_eq!(padded.mcmillan_degree().unwrap(), nst);
        prop_assert!(max_pointwise_difference(&node, &padded, &grid()).unwrap() < 1e-10);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn line_blaschke_products_are_certified(seed in any::<u64>(), t in any_t(), k in 1usize..=3) {
        let c = ctx(t);
        let mut r = rng(seed);
        let mut node = blaschke_line(line_alpha(&mut r), c).unwrap().0;
        for _ in 1..k {
            node = node_product(&node, &blaschke_line(line_alpha(&mut r), c).unwrap().0).unwrap();
        }
        prop_assume!(node.is_minimal());
        let j = Signature::identity(1);
        let kind = CertificateKind::LineJUnitary;
        let cert = solve_certificate(&node, Some(&j), kind, 1e-8).unwrap();
        prop_assert!(cert.h.star_symmetry_defect(&c) == 0.0);
        let rep = verify_certificate(&node, Some(&j), &cert, kind, &LINE_GRID, 1e-8).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
        let h_inv = cert.h.inverse(&c, 1e-12).unwrap();
        for _ in 0..20 {
            let x: f64 = r.random_range(-0.35..0.35);
            let y: f64 = r.random_range(-0.35..0.35);
            if (x + y).abs() < 0.05 {
                continue;
            }
            let (Ok(lhs), Ok(rhs)) = (kernel_lhs(&node, Some(&j), kind, x, y), kernel_rhs(&node, &h_inv, x, y)) else { continue };
            prop_assert!(lhs.dist(&rhs, &c).unwrap() < 1e-8 * (1.0 + rhs.norm(&c)));
        }

        // the certificate moves with a change of state coordinates: H' = S^star H S
        let s = HtMatrix::identity(k).scale(2.0).add(&rand_matrix(&mut r, k, k, 0.5)).unwrap();
        prop_assume!(s.is_invertible(&c, 1e-6));
        let moved = node.transform(&s).unwrap();
        let cert2 = solve_certificate(&moved, Some(&j), kind, 1e-8).unwrap();
        let expect = s.star().mul(&cert.h, &c).unwrap().mul(&s, &c).unwrap();
        prop_assert!(cert2.h.dist(&expect, &c).unwrap() < 1e-7 * (1.0 + expect.norm(&c)));
    }

    #[test]
    fn circle_blaschke_products_are_certified(seed in any::<u64>(), t in any_t(), k in 1usize..=3) {
        let c = ctx(t);
        let mut r = rng(seed);
        let mut node = blaschke_circle(rand_scalar(&mut r, 0.5), c).unwrap().0;
        for _ in 1..k {
            node = node_product(&node, &blaschke_circle(rand_scalar(&mut r, 0.5), c).unwrap().0).unwrap();
        }
        prop_assume!(node.is_minimal() && node.a().is_invertible(&c, 1e-8));
        let j = Signature::identity(1);
        let kind = CertificateKind::CircleJUnitary;
        let cert = solve_certificate(&node, Some(&j), kind, 1e-8).unwrap();
        let rep = verify_certificate(&node, Some(&j), &cert, kind, &LINE_GRID, 1e-8).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
        prop_assert!(rep.get("a-cross-delta").unwrap() < 1e-8);
    }

    #[test]
    fn stein_solution_and_theta_identities(seed in any::<u64>(), t in neg_t(), n in 1usize..=5) {
        let c = ctx(t);
        let mut r = rng(seed);
        let alphas: Vec<HtScalar> = (0..n).map(|_| rand_scalar(&mut r, 0.35)).collect();
        let a = HtMatrix::diag(&alphas);
        let stein = stein_solve(&a, &HtMatrix::from_fn(1, n, |_, _| HtScalar::ONE), &c, 1e-12).unwrap();
        prop_assert!(stein.g.star_symmetry_defect(&c) < 1e-10);
        prop_assert!(stein.series_converged && stein.series_discrepancy < 1e-8);
        let th = theta_builder(&alphas, c, 1e-12).unwrap();
        for res in th.identity_residuals().unwrap() {
            prop_assert!(res < 1e-8);
        }
        for x in grid() {
            let v = th.node.eval(x).unwrap();
            prop_assert!(v.dist(&th.alt_eval(x).unwrap(), &c).unwrap() < 1e-9);
        }
    }

    #[test]
    fn star_product_is_associative_and_distributive(seed in any::<u64>(), t in any_t(), k in 1usize..=12) {
        let c = ctx(t);
        let mut r = rng(seed);
        let mut series = || SeriesHt { coeffs: (0..=k).map(|_| rand_scalar(&mut r, 1.0)).collect() };
        let (f, g, h) = (series(), series(), series());
        let lhs = star_product(&star_product(&f, &g, &c), &h, &c);
        let rhs = star_product(&f, &star_product(&g, &h, &c), &c);
        let gh = SeriesHt { coeffs: g.coeffs.iter().zip(&h.coeffs).map(|(x, y)| *x + *y).collect() };
        let dist = star_product(&f, &gh, &c);
        let (fg, fh) = (star_product(&f, &g, &c), star_product(&f, &h, &c));
        for i in 0..=k {
            prop_assert!(lhs.coeffs[i].approx_eq(&rhs.coeffs[i], 1e-10));
            prop_assert!(dist.coeffs[i].approx_eq(&(fg.coeffs[i] + fh.coeffs[i]), 1e-10));
        }
        let one = SeriesHt { coeffs: vec![HtScalar::ONE; 1].into_iter().chain(std::iter::repeat_n(HtScalar::ZERO, k)).collect() };
        prop_assert_eq!(star_product(&one, &f, &c), f);
    }

    #[test]
    fn supporting_projections_follow_similarity(seed in any::<u64>(), t in neg_t()) {
        let c = ctx(t);
        let mut r = rng(seed);
        let b1 = blaschke_line(line_alpha(&mut r), c).unwrap().0;
        let b2 = blaschke_line(line_alpha(&mut r), c).unwrap().0;
        let node = node_product(&b1, &b2).unwrap();
        prop_assume!(node.is_minimal());
        let pi = HtMatrix::diag(&[HtScalar::ZERO, HtScalar::ONE]);
        prop_assert!(is_supporting_projection(&node, &pi, 1e-9).unwrap());
        let s = HtMatrix::identity(2).scale(2.0).add(&rand_matrix(&mut r, 2, 2, 0.5)).unwrap();
        prop_assume!(s.is_invertible(&c, 1e-6));
        let si = s.inverse(&c, 1e-12).unwrap();
        let moved = node.transform(&s).unwrap();
        // the state map of the moved node is S^{-1} A S, so pi moves to S^{-1} pi S
        let pi2 = si.mul(&pi, &c).unwrap().mul(&s, &c).unwrap();
        prop_assert!(is_supporting_projection(&moved, &pi2, 1e-8).unwrap());
    }
}
