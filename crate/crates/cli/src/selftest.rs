//! Self-test: the acceptance criteria of the library, runnable from the command line.
//! Every criterion is deterministic (fixed seeds) and reports PASS or FAIL with a detail
//! line; failures never abort the run.

use ht_rational::constructors::{
    blaschke_circle, blaschke_line, star_eval, star_product, theta_builder, SeriesHt, SERIES_ORDER,
};
use ht_rational::factorization::{
    additive_decomposition, factor_from_projection, is_supporting_projection, junitary_factor,
};
use ht_rational::linalg;
use ht_rational::matrix::{is_star_nonnegative, positive_factorize};
use ht_rational::realization::{max_pointwise_difference, node_product};
use ht_rational::structured::{
    kernel_lhs, kernel_rhs, make_phi_from_psi, solve_certificate, verify_certificate, Certificate,
    CertificateKind, Geometry, Signature, LINE_GRID,
};
use ht_rational::subspace::{coordinate_submodule, eigen_submodules};
use ht_rational::{AlgebraContext, HtError, HtMatrix, HtScalar, Node};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "quaternion-sanity"),
    (2, "embedding-oracle"),
    (3, "line-junitary"),
    (4, "circle-junitary"),
    (5, "kernel-identities"),
    (6, "theta-stein"),
    (7, "minimal-factorization"),
    (8, "ff-star"),
    (9, "star-product"),
    (10, "non-minimality"),
    (11, "antisymmetric"),
    (12, "wall-clock"),
];

/// Deliberate faults for checking that the self-test can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Run the quaternion fixture with `t = +1` instead of `t = -1`.
    FlipT,
}

impl std::str::FromStr for Fault {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "flip-t" => Ok(Fault::FlipT),
            _ => Err(format!("unknown fault '{s}' (known: flip-t)")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Criterion names or numbers to run; empty runs all.
    pub filter: Vec<String>,
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("{status} {:>2} {:<22} {:>8.3}s  {}", self.id, self.name, self.seconds, self.detail)
    }
}

type Outcome = Result<String, String>;

const TS: [f64; 4] = [-1.0, -0.5, 0.5, 2.0];
const WALL_CLOCK_LIMIT: f64 = 60.0;

fn selected(filter: &[String], id: u8, name: &str) -> bool {
    filter.is_empty() || filter.iter().any(|f| f == name || f.parse::<u8>().ok() == Some(id))
}

pub fn unknown_filters(filter: &[String]) -> Vec<String> {
    filter.iter().filter(|f| !CRITERIA.iter().any(|(id, name)| selected(&[(*f).clone()], *id, name))).cloned().collect()
}

fn run_one(id: u8, fault: Option<Fault>) -> Outcome {
    match id {
        1 => quaternion_sanity(fault),
        2 => embedding_oracle(),
        3 => line_junitary(),
        4 => circle_junitary(),
        5 => kernel_identities(),
        6 => theta_stein(),
        7 => minimal_factorization(),
        8 => ff_star(),
        9 => star_product_closed_form(),
        10 => non_minimality(),
        11 => antisymmetric(),
        _ => unreachable!("criterion {id}"),
    }
}

fn timed(id: u8, name: &'static str, f: impl FnOnce() -> Outcome) -> CriterionResult {
    let start = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match out {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult { id, name, passed, detail, seconds }
}

/// Run the selected criteria in order, calling `report` after each one.
pub fn run(opts: &Options, mut report: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let start = Instant::now();
    let mut results = Vec::new();
    for (id, name) in CRITERIA.iter().take(11) {
        if selected(&opts.filter, *id, name) {
            let r = timed(*id, name, || run_one(*id, opts.fault));
            report(&r);
            results.push(r);
        }
    }
    let (id, name) = CRITERIA[11];
    if selected(&opts.filter, id, name) {
        let r = timed(id, name, || {
            // on its own it times a full run of the other criteria
            if results.len() < 11 {
                for (id, _) in CRITERIA.iter().take(11) {
                    let _ = catch_unwind(AssertUnwindSafe(|| run_one(*id, opts.fault)));
                }
            }
            let total = start.elapsed().as_secs_f64();
            let msg = format!("full self-test took {total:.2}s (limit {WALL_CLOCK_LIMIT}s)");
            if total < WALL_CLOCK_LIMIT {
                Ok(msg)
            } else {
                Err(msg)
            }
        });
        report(&r);
        results.push(r);
    }
    results
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ctx(t: f64) -> AlgebraContext {
    AlgebraContext::new(t).expect("nonzero t")
}

fn rand_scalar(r: &mut ChaCha8Rng, scale: f64) -> HtScalar {
    HtScalar::from_coords([
        r.random_range(-scale..scale),
        r.random_range(-scale..scale),
        r.random_range(-scale..scale),
        r.random_range(-scale..scale),
    ])
}

fn rand_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> HtMatrix {
    HtMatrix::from_fn(rows, cols, |_, _| rand_scalar(r, scale))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(what: &str, r: ht_rational::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn sample_grid() -> Vec<f64> {
    (0..11).map(|i| -0.4 + 0.08 * i as f64).collect()
}

fn quaternion_sanity(fault: Option<Fault>) -> Outcome {
    let t = if fault == Some(Fault::FlipT) { 1.0 } else { -1.0 };
    let c = ctx(t);
    let (one, i, j, k) = (HtScalar::ONE, HtScalar::I, HtScalar::J, HtScalar::K);
    let start = Instant::now();
    // Hamilton's table: row x column
    let basis = [one, i, j, k];
    let table = [
        [one, i, j, k],
        [i, -one, k, -j],
        [j, -k, -one, i],
        [k, j, -i, -one],
    ];
    for (r, &p) in basis.iter().enumerate() {
        for (s, &q) in basis.iter().enumerate() {
            let got = c.mul(p, q);
            check(got == table[r][s], || {
                format!("basis product {r}x{s} is {:?}, expected {:?}", got.coords(), table[r][s].coords())
            })?;
        }
    }
    let mut r = rng(1);
    let mut min_norm = f64::INFINITY;
    for _ in 0..1000 {
        let q = rand_scalar(&mut r, 1.0);
        if q == HtScalar::ZERO {
            continue;
        }
        let n = c.norm_form(q);
        check(n > 0.0, || format!("norm form {n} <= 0 at {:?}", q.coords()))?;
        min_norm = min_norm.min(n / q.coord_norm_sqr());
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 1.0, || format!("took {secs:.2}s"))?;
    Ok(format!("16 basis products exact; norm form positive on 1000 samples (min ratio {min_norm:.3})"))
}

fn embedding_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for n in 0..1000 {
        let c = ctx(TS[n % 4]);
        let (p, q) = (rand_scalar(&mut r, 2.0), rand_scalar(&mut r, 2.0));
        let lhs = c.embed(c.mul(p, q)).m;
        let rhs = c.embed(p).mul(&c.embed(q)).m;
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                num += (lhs[a][b] - rhs[a][b]).norm_sqr();
                den += rhs[a][b].norm_sqr();
            }
        }
        worst = worst.max((num / den.max(f64::MIN_POSITIVE)).sqrt());
    }
    for n in 0..200 {
        let c = ctx(TS[n % 4]);
        let (a, b, d) = (r.random_range(1..=6), r.random_range(1..=6), r.random_range(1..=6));
        let x = rand_matrix(&mut r, a, b, 1.0);
        let y = rand_matrix(&mut r, b, d, 1.0);
        let lhs = core("product", x.mul(&y, &c))?.embed(&c);
        let rhs = x.embed(&c) * y.embed(&c);
        worst = worst.max((lhs - &rhs).norm() / rhs.norm());
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst < 1e-12, || format!("relative residual {worst:.3e}"))?;
    check(secs < 5.0, || format!("took {secs:.2}s"))?;
    Ok(format!("1000 scalar and 200 matrix pairs, worst relative residual {worst:.1e}"))
}

fn line_junitary() -> Outcome {
    let mut r = rng(3);
    let j = Signature::identity(1);
    let kind = CertificateKind::LineJUnitary;
    let (mut worst_h, mut worst_res, mut count) = (0.0f64, 0.0f64, 0);
    while count < 100 {
        let t = TS[count % 4];
        let c = ctx(t);
        let alpha = rand_scalar(&mut r, 1.0);
        let s = alpha + alpha.star();
        if s.re().abs() <= 0.1 {
            continue;
        }
        count += 1;
        let (node, _) = core("blaschke_line", blaschke_line(alpha, c))?;
        let cert = core("solve", solve_certificate(&node, Some(&j), kind, 1e-8))?;
        worst_h = worst_h.max((cert.h[(0, 0)] - HtScalar::real(-1.0 / s.re())).coord_norm());
        let rep = core("verify", verify_certificate(&node, Some(&j), &cert, kind, &LINE_GRID, 1e-8))?;
        worst_res = worst_res.max(rep.max_residual());
        check(rep.passed(), || format!("t = {t}, alpha = {:?}: {:?}", alpha.coords(), rep.entries))?;
    }
    check(worst_h < 1e-9, || format!("|h + 1/(alpha + alpha^star)| = {worst_h:.3e}"))?;
    Ok(format!("100 samples, |h - h_expected| <= {worst_h:.1e}, residuals <= {worst_res:.1e}"))
}

fn circle_junitary() -> Outcome {
    let mut r = rng(4);
    let j = Signature::identity(1);
    let kind = CertificateKind::CircleJUnitary;
    let (mut worst_h, mut count, mut skipped) = (0.0f64, 0, 0);
    while count < 100 {
        let t = TS[count % 4];
        let c = ctx(t);
        let alpha = rand_scalar(&mut r, 1.0);
        let nf = c.norm_form(alpha);
        if (1.0 - nf).abs() <= 0.1 {
            continue;
        }
        // the circle theory needs A = alpha^star invertible
        if nf.abs() <= 0.05 {
            skipped += 1;
            continue;
        }
        count += 1;
        let (node, _) = core("blaschke_circle", blaschke_circle(alpha, c))?;
        let cert = core("solve", solve_certificate(&node, Some(&j), kind, 1e-8))?;
        let h = cert.h[(0, 0)];
        let err = (h - HtScalar::real(1.0 - nf)).coord_norm();
        worst_h = worst_h.max(err);
        let rep = core("verify", verify_certificate(&node, Some(&j), &cert, kind, &LINE_GRID, 1e-8))?;
        check(rep.passed(), || format!("t = {t}, alpha = {:?}: {:?}", alpha.coords(), rep.entries))?;
    }
    check(worst_h < 1e-9, || format!("|h - (1 - alpha alpha^star)| = {worst_h:.3e}"))?;
    Ok(format!("100 samples ({skipped} with nearly singular alpha skipped), |h - h_expected| <= {worst_h:.1e}"))
}

fn kernel_pairs(geometry: Geometry, seed: u64) -> Vec<(f64, f64)> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < 20 {
        let (x, y): (f64, f64) = (r.random_range(-0.35..0.35), r.random_range(-0.35..0.35));
        let den = match geometry {
            Geometry::Line => x + y,
            Geometry::Circle => 1.0 - x * y,
        };
        if den.abs() > 0.05 {
            out.push((x, y));
        }
    }
    out
}

pub type Example = (CertificateKind, Node, Option<Signature>, Certificate);

/// The canonical example of each class with its certificate.
pub fn canonical_examples() -> ht_rational::Result<Vec<Example>> {
    let c = ctx(-1.0);
    let q = HtScalar::from_coords;
    let (lj, lj_cert) = blaschke_line(q([0.6, 0.2, -0.1, 0.3]), c)?;
    let (cj, cj_cert) = blaschke_circle(q([0.3, -0.2, 0.1, 0.2]), c)?;
    // x (1 - x p)^{-1} with p = -p^star
    let p = q([0.0, 0.3, 0.2, -0.1]);
    let la = Node::new(HtMatrix::scalar(p), HtMatrix::identity(1), HtMatrix::identity(1), HtMatrix::zeros(1, 1), c)?;
    // (1 + x p0)(1 - x p0)^{-1} / 2 with p0 p0^star = 1
    let p0 = q([0.6, 0.0, 0.0, 0.8]);
    let ca = Node::new(
        HtMatrix::scalar(p0),
        HtMatrix::identity(1),
        HtMatrix::scalar(p0),
        HtMatrix::scalar(HtScalar::real(0.5)),
        c,
    )?;
    let unit = |kind| Certificate { kind, h: HtMatrix::identity(1), residual: 0.0 };
    Ok(vec![
        (CertificateKind::LineJUnitary, lj, Some(Signature::identity(1)), lj_cert),
        (CertificateKind::CircleJUnitary, cj, Some(Signature::identity(1)), cj_cert),
        (CertificateKind::LineAntiSym, la, None, unit(CertificateKind::LineAntiSym)),
        (CertificateKind::CircleAntiSym, ca, None, unit(CertificateKind::CircleAntiSym)),
    ])
}

fn kernel_identities() -> Outcome {
    let mut parts = Vec::new();
    for (n, (kind, node, j, cert)) in core("examples", canonical_examples())?.into_iter().enumerate() {
        let ctx = *node.ctx();
        let h_inv = core("H inverse", cert.h.inverse(&ctx, 1e-12))?;
        let mut worst = 0.0f64;
        for (x, y) in kernel_pairs(kind.geometry(), 50 + n as u64) {
            let lhs = core("kernel lhs", kernel_lhs(&node, j.as_ref(), kind, x, y))?;
            let rhs = core("kernel rhs", kernel_rhs(&node, &h_inv, x, y))?;
            worst = worst.max(core("dist", lhs.dist(&rhs, &ctx))?);
        }
        check(worst < 1e-8, || format!("{kind}: kernel residual {worst:.3e}"))?;
        parts.push(format!("{kind} {worst:.1e}"));
    }
    Ok(format!("20 pairs each: {}", parts.join(", ")))
}

fn theta_stein() -> Outcome {
    let mut r = rng(6);
    let mut worst = [0.0f64; 3];
    let mut trials = 0;
    for t in [-1.0, -0.5, 0.5] {
        let c = ctx(t);
        for n in 1..=5 {
            for _ in 0..3 {
                let alphas: Vec<HtScalar> = loop {
                    let cand: Vec<HtScalar> = (0..n).map(|_| rand_scalar(&mut r, 0.35)).collect();
                    let a = HtMatrix::diag(&cand);
                    let rho = linalg::spectral_radius(&a.embed(&c)).unwrap_or(1.0);
                    if rho < 0.9 {
                        break cand;
                    }
                };
                trials += 1;
                let th = core("theta", theta_builder(&alphas, c, 1e-12))?;
                check(th.stein.series_converged, || "Stein series did not converge".into())?;
                worst[0] = worst[0].max(th.stein.series_discrepancy);
                for v in core("identities", th.identity_residuals())? {
                    worst[1] = worst[1].max(v);
                }
                for x in sample_grid() {
                    let direct = core("eval", th.node.eval(x))?;
                    let alt = core("alt", th.alt_eval(x))?;
                    worst[2] = worst[2].max(core("dist", direct.dist(&alt, &c))?);
                }
            }
        }
    }
    check(worst[0] < 1e-8, || format!("Stein solve vs series {:.3e}", worst[0]))?;
    check(worst[1] < 1e-8, || format!("relative identity residual {:.3e}", worst[1]))?;
    check(worst[2] < 1e-9, || format!("alternative form {:.3e}", worst[2]))?;

    // one zero: alpha = 1/2 gives (x - 1/2)(1 - x/2)^{-1}
    let c = ctx(-1.0);
    let th = core("theta", theta_builder(&[HtScalar::real(0.5)], c, 1e-12))?;
    let mut worst_b = 0.0f64;
    for x in sample_grid() {
        let v = core("eval", th.node.eval(x))?[(0, 0)];
        worst_b = worst_b.max((v - HtScalar::real((x - 0.5) / (1.0 - 0.5 * x))).coord_norm());
    }
    // a quaternion zero: the closed form in the state entry a = alpha^star is
    // (1 - x a)^{-1} (x - a^star)(1 - a)(1 - a^star)^{-1}
    let alpha = HtScalar::from_coords([0.3, 0.2, -0.2, 0.1]);
    let th = core("theta", theta_builder(&[alpha], c, 1e-12))?;
    let a = alpha.star();
    let inv = |q: HtScalar| c.inverse(q, 1e-14).expect("invertible");
    for x in sample_grid() {
        let v = core("eval", th.node.eval(x))?[(0, 0)];
        let one = HtScalar::ONE;
        let expect = c.mul(c.mul(c.mul(inv(one - a * x), HtScalar::real(x) - a.star()), one - a), inv(one - a.star()));
        worst_b = worst_b.max((v - expect).coord_norm());
    }
    check(worst_b < 1e-10, || format!("single-zero closed form {worst_b:.3e}"))?;
    Ok(format!(
        "{trials} products: series {:.1e}, identities {:.1e}, alternative form {:.1e}, single zero {worst_b:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn line_alpha(r: &mut ChaCha8Rng) -> HtScalar {
    let mut a = rand_scalar(r, 1.0);
    let re: f64 = r.random_range(0.1..1.0);
    a.a.re = if r.random::<bool>() { re } else { -re };
    a
}

fn minimal_factorization() -> Outcome {
    let mut r = rng(7);
    let grid = sample_grid();
    let j = Signature::identity(1);
    let kind = CertificateKind::LineJUnitary;
    let (mut worst_prod, mut worst_cert) = (0.0f64, 0.0f64);
    for n in 0..20 {
        let c = ctx(TS[n % 4]);
        let (b1, _) = core("blaschke_line", blaschke_line(line_alpha(&mut r), c))?;
        let (b2, _) = core("blaschke_line", blaschke_line(line_alpha(&mut r), c))?;
        let node = core("product", node_product(&b1, &b2))?;
        let pi = HtMatrix::diag(&[HtScalar::ZERO, HtScalar::ONE]);
        check(core("support", is_supporting_projection(&node, &pi, 1e-9))?, || "canonical projection rejected".into())?;
        let pair = core("factor", factor_from_projection(&node, &pi, 1e-9))?;
        let prod = core("product", node_product(&pair.r1, &pair.r2))?;
        worst_prod = worst_prod.max(core("compare", max_pointwise_difference(&prod, &node, &grid))?);
        worst_prod = worst_prod.max(core("compare", max_pointwise_difference(&pair.r1, &b1, &grid))?);
        let degrees = (
            core("degree", pair.r1.mcmillan_degree())?,
            core("degree", pair.r2.mcmillan_degree())?,
            core("degree", node.mcmillan_degree())?,
        );
        check(degrees == (1, 1, 2), || format!("degrees {degrees:?}"))?;

        let cert = core("solve", solve_certificate(&node, Some(&j), kind, 1e-8))?;
        let m = coordinate_submodule(2, &[0]);
        let f = core("J-unitary split", junitary_factor(&node, &j, &cert, &m, Geometry::Line, 1e-8))?;
        let prod = core("product", node_product(&f.r1, &f.r2))?;
        worst_prod = worst_prod.max(core("compare", max_pointwise_difference(&prod, &node, &grid))?);
        for (factor, fc) in [(&f.r1, &f.cert1), (&f.r2, &f.cert2)] {
            let rep = core("verify", verify_certificate(factor, Some(&j), fc, kind, &LINE_GRID, 1e-8))?;
            worst_cert = worst_cert.max(rep.max_residual());
            check(rep.passed(), || format!("factor certificate: {:?}", rep.entries))?;
        }
    }
    check(worst_prod < 1e-8, || format!("product residual {worst_prod:.3e}"))?;
    Ok(format!("20 products: degrees 1 + 1 = 2, product residual {worst_prod:.1e}, factor certificates {worst_cert:.1e}"))
}

fn ff_star() -> Outcome {
    let c = ctx(-1.0);
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = r.random_range(1..=5);
        let k = r.random_range(1..=5);
        let f = rand_matrix(&mut r, n, k, 1.0);
        let m = core("FF*", f.mul(&f.star(), &c))?;
        let g = core("factorize", positive_factorize(&m, &c, 1e-10))?;
        let back = core("GG*", g.mul(&g.star(), &c))?;
        worst = worst.max(core("dist", back.dist(&m, &c))?);
    }
    check(worst < 1e-9, || format!("reconstruction residual {worst:.3e}"))?;
    for _ in 0..20 {
        let n = r.random_range(1..=5);
        let f = rand_matrix(&mut r, n, n, 1.0);
        let mut m = core("FF*", f.mul(&f.star(), &c))?;
        let i = r.random_range(0..n);
        m[(i, i)] = HtScalar::real(-1.0);
        check(!core("form", is_star_nonnegative(&m, &c, 1e-10))?, || "negative diagonal not detected".into())?;
        match positive_factorize(&m, &c, 1e-10) {
            Err(HtError::NotNonnegative(_)) => {}
            other => return Err(format!("expected NotNonnegative, got {other:?}")),
        }
    }
    Ok(format!("100 factorizations, residual <= {worst:.1e}; 20 indefinite matrices rejected"))
}

fn star_product_closed_form() -> Outcome {
    let c = ctx(-1.0);
    let mut r = rng(9);
    let alpha = rand_scalar(&mut r, 0.4);
    let (ba, _) = core("blaschke", blaschke_circle(alpha, c))?;
    let (bs, _) = core("blaschke", blaschke_circle(alpha.star(), c))?;
    let f = core("series", SeriesHt::from_node(&ba, SERIES_ORDER))?;
    let g = core("series", SeriesHt::from_node(&bs, SERIES_ORDER))?;
    let prod = star_product(&f, &g, &c);
    let det = c.norm_form(alpha);
    let re = alpha.re();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = rand_scalar(&mut r, 1.0);
        // the embedded operator norm of p is sqrt(|a|^2 + |b|^2) for t = -1
        let p = p * (0.3 * r.random::<f64>() / p.coord_norm());
        let p2 = c.mul(p, p);
        let num = p2 - p * (2.0 * re) + HtScalar::real(det);
        let den = p2 * det - p * (2.0 * re) + HtScalar::ONE;
        let expect = c.mul(num, core("inverse", c.inverse(den, 1e-14))?);
        worst = worst.max((star_eval(&prod, p, &c) - expect).coord_norm());
    }
    check(worst < 1e-6, || format!("series vs closed form {worst:.3e}"))?;
    Ok(format!("20 points, order {SERIES_ORDER}: difference {worst:.1e}"))
}

fn non_minimality() -> Outcome {
    let mut r = rng(10);
    let mut count = 0;
    let mut tries = 0;
    while count < 50 {
        tries += 1;
        if tries > 500 {
            return Err("could not draw minimal base realizations".into());
        }
        let c = ctx(TS[count % 4]);
        let nst = r.random_range(1..=3);
        let m = r.random_range(1..=2);
        let a = rand_matrix(&mut r, nst, nst, 0.5);
        let node = Node::new(
            a,
            rand_matrix(&mut r, nst, m, 1.0),
            rand_matrix(&mut r, m, nst, 1.0),
            HtMatrix::identity(m),
            c,
        )
        .map_err(|e| e.to_string())?;
        if !node.is_minimal() {
            continue;
        }
        count += 1;
        let pad = r.random_range(1..=2);
        let padded = Node::new(
            HtMatrix::block_diag(node.a(), &rand_matrix(&mut r, pad, pad, 0.5)),
            core("stack", node.b().vstack(&HtMatrix::zeros(pad, m)))?,
            core("stack", node.c().hstack(&rand_matrix(&mut r, m, pad, 1.0)))?,
            node.d().clone(),
            c,
        )
        .map_err(|e| e.to_string())?;
        check(!padded.is_controllable(), || "padded node reported controllable".into())?;
        let deg = core("degree", padded.mcmillan_degree())?;
        check(deg == nst, || format!("degree {deg}, expected {nst}"))?;
    }
    Ok("50 padded realizations flagged non-controllable with the unpadded degree".into())
}

fn antisymmetric() -> Outcome {
    let c = ctx(-1.0);
    let mut r = rng(11);
    let xs: Vec<f64> = [0.1, 0.15, 0.2, 0.3, 0.35].iter().flat_map(|&x| [x, -x]).collect();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let nst = r.random_range(1..=2);
        let psi = Node::new(
            rand_matrix(&mut r, nst, nst, 0.4),
            rand_matrix(&mut r, nst, 1, 1.0),
            rand_matrix(&mut r, 1, nst, 1.0),
            rand_matrix(&mut r, 1, 1, 1.0),
            c,
        )
        .map_err(|e| e.to_string())?;
        for geometry in [Geometry::Line, Geometry::Circle] {
            let (phi, _) = core("phi from psi", make_phi_from_psi(&psi, geometry))?;
            for &x in &xs {
                let (Ok(v), Ok(w)) = (phi.eval(x), phi.eval(geometry.reflect(x))) else { continue };
                let s = core("sum", v.add(&w.star()))?;
                worst = worst.max(s.norm(&c));
            }
        }
    }
    check(worst < 1e-9, || format!("anti-symmetry residual {worst:.3e}"))?;

    // psi with a single pole p0 != -p0^star: no proper eigen-derived subspace splits phi
    let p0 = HtScalar::from_coords([0.4, 0.3, -0.2, 0.1]);
    let psi = Node::new(HtMatrix::scalar(p0), HtMatrix::identity(1), HtMatrix::identity(1), HtMatrix::zeros(1, 1), c)
        .map_err(|e| e.to_string())?;
    let mut tried = 0;
    for geometry in [Geometry::Line, Geometry::Circle] {
        let (phi, cert) = core("phi from psi", make_phi_from_psi(&psi, geometry))?;
        let subs = core("eigen submodules", eigen_submodules(phi.a(), &c))?;
        check(!subs.is_empty(), || "no eigen-derived subspaces".into())?;
        for m in &subs {
            tried += 1;
            match additive_decomposition(&phi, &cert, m, None, 1e-8) {
                Err(HtError::DegenerateSubspace) => {}
                other => return Err(format!("{geometry:?}: expected DegenerateSubspace, got {:?}", other.map(|_| ()))),
            }
        }
    }
    Ok(format!("anti-symmetry residual {worst:.1e} on 20 functions; {tried} eigen subspaces degenerate"))
}
