#![allow(dead_code)]

use ht_rational::{AlgebraContext, HtMatrix, HtScalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(x: [f64; 4]) -> HtScalar {
    HtScalar::from_coords(x)
}

pub fn ctx(t: f64) -> AlgebraContext {
    AlgebraContext::new(t).unwrap()
}

pub fn rand_scalar(r: &mut impl Rng, scale: f64) -> HtScalar {
    q([
        r.random_range(-scale..scale),
        r.random_range(-scale..scale),
        r.random_range(-scale..scale),
        r.random_range(-scale..scale),
    ])
}

pub fn rand_matrix(r: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> HtMatrix {
    HtMatrix::from_fn(rows, cols, |_, _| rand_scalar(r, scale))
}

/// Scalar with zero real part, e.g. `alpha = -alpha^star`.
pub fn rand_pure(r: &mut impl Rng, scale: f64) -> HtScalar {
    let mut s = rand_scalar(r, scale);
    s.a.re = 0.0;
    s
}

/// Independent product through the Cayley table of the basis `1, i, j_t, k_t`.
pub fn cayley_mul(p: HtScalar, q: HtScalar, t: f64) -> HtScalar {
    // table[a][b] = (coefficient, basis index) of e_a e_b
    let table: [[(f64, usize); 4]; 4] = [
        [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
        [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
        [(1.0, 2), (-1.0, 3), (t, 0), (-t, 1)],
        [(1.0, 3), (1.0, 2), (t, 1), (t, 0)],
    ];
    let (x, y) = (p.coords(), q.coords());
    let mut out = [0.0; 4];
    for a in 0..4 {
        for b in 0..4 {
            let (c, idx) = table[a][b];
            out[idx] += c * x[a] * y[b];
        }
    }
    HtScalar::from_coords(out)
}
