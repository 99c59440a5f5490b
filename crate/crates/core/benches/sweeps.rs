use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ht_rational::batch;
use ht_rational::constructors::blaschke_line;
use ht_rational::realization::node_product;
use ht_rational::structured::{kernel_lhs, kernel_rhs, solve_certificate, CertificateKind, Signature};
use ht_rational::{AlgebraContext, HtMatrix, HtScalar, Node};
use std::hint::black_box;

fn product_node(k: usize, ctx: AlgebraContext) -> Node {
    let mut node: Option<Node> = None;
    for i in 0..k {
        let s = i as f64;
        let alpha = HtScalar::from_coords([0.3 + 0.1 * s, 0.2 - 0.05 * s, 0.1 * (s - 1.0), 0.15]);
        let (b, _) = blaschke_line(alpha, ctx).unwrap();
        node = Some(match node {
            None => b,
            Some(n) => node_product(&n, &b).unwrap(),
        });
    }
    node.unwrap()
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -0.35 + 0.7 * i as f64 / (n - 1) as f64).collect()
}

fn eval_sweep(c: &mut Criterion) {
    let ctx = AlgebraContext::quaternions();
    let mut group = c.benchmark_group("eval-sweep");
    for k in [2, 4, 8] {
        let node = product_node(k, ctx);
        let xs = grid(512);
        group.bench_with_input(BenchmarkId::new("parallel", k), &xs, |b, xs| {
            b.iter(|| batch::map(xs, |&x| node.eval(black_box(x)).map(|m| m.norm(&ctx))))
        });
        group.bench_with_input(BenchmarkId::new("sequential", k), &xs, |b, xs| {
            b.iter(|| batch::map_seq(xs, |&x| node.eval(black_box(x)).map(|m| m.norm(&ctx))))
        });
    }
    group.finish();
}

fn kernel_sweep(c: &mut Criterion) {
    let ctx = AlgebraContext::quaternions();
    let j = Signature::identity(1);
    let kind = CertificateKind::LineJUnitary;
    let mut group = c.benchmark_group("kernel-sweep");
    for k in [2, 4] {
        let node = product_node(k, ctx);
        let cert = solve_certificate(&node, Some(&j), kind, 1e-8).unwrap();
        let h_inv = cert.h.inverse(&ctx, 1e-12).unwrap();
        let xs = grid(24);
        let pairs: Vec<(f64, f64)> = xs
            .iter()
            .flat_map(|&x| xs.iter().map(move |&y| (x, y)))
            .filter(|(x, y)| (x + y).abs() > 1e-3)
            .collect();
        let residual = |&(x, y): &(f64, f64)| -> f64 {
            let lhs = kernel_lhs(&node, Some(&j), kind, x, y).unwrap();
            let rhs: HtMatrix = kernel_rhs(&node, &h_inv, x, y).unwrap();
            lhs.dist(&rhs, &ctx).unwrap()
        };
        group.bench_with_input(BenchmarkId::new("parallel", k), &pairs, |b, p| b.iter(|| batch::map(p, residual)));
        group.bench_with_input(BenchmarkId::new("sequential", k), &pairs, |b, p| {
            b.iter(|| batch::map_seq(p, residual))
        });
    }
    group.finish();
}

criterion_group!(benches, eval_sweep, kernel_sweep);
criterion_main!(benches);
