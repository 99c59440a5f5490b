//! Dense complex and real helpers used on embedded matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

/// Relative singular-value threshold used for ranks and invertibility.
pub const RANK_RTOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense decompositions run in faer; nalgebra's SVD can stop early and leave
/// reconstruction errors far above rounding level.
trait Entry: faer::traits::ComplexField + nalgebra::Scalar + Copy {
    fn real_part(self) -> f64;
}

impl Entry for f64 {
    fn real_part(self) -> f64 {
        self
    }
}

impl Entry for Complex64 {
    fn real_part(self) -> f64 {
        self.re
    }
}

fn to_faer<T: Entry>(m: &DMatrix<T>) -> faer::Mat<T> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer<T: Entry>(m: faer::MatRef<'_, T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `m = U diag(s) V^*` with `s` descending.
pub struct Svd<T: nalgebra::Scalar> {
    pub s: Vec<f64>,
    pub u: DMatrix<T>,
    pub v: DMatrix<T>,
}

fn svd_of<T: Entry>(m: &DMatrix<T>) -> Svd<T> {
    let f = to_faer(m);
    let d = f.svd().expect("svd of a finite matrix");
    let k = m.nrows().min(m.ncols());
    let s = (0..k).map(|i| d.S().column_vector()[i].real_part()).collect();
    Svd { s, u: from_faer(d.U()), v: from_faer(d.V()) }
}

pub fn svd(m: &CMat) -> Svd<Complex64> {
    svd_of(m)
}

pub fn svd_real(m: &RMat) -> Svd<f64> {
    svd_of(m)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("svd of a finite matrix")
}

pub fn rank(m: &CMat, rtol: f64) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rtol * smax).count()
}

/// `sigma_min / sigma_max`, zero for a zero or empty matrix.
pub fn inverse_condition(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 && m.nrows() == m.ncols() => lo / hi,
        _ => 0.0,
    }
}

pub fn inverse_checked(m: &CMat, rtol: f64) -> Option<CMat> {
    assert_eq!(m.nrows(), m.ncols());
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    if inverse_condition(m) <= rtol {
        return None;
    }
    m.clone().try_inverse()
}

fn svd_full(m: &CMat) -> (Vec<f64>, CMat, CMat) {
    let d = svd(m);
    (d.s, d.u, d.v)
}

/// Orthonormal basis of the column space.
pub fn colspace(m: &CMat, rtol: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let (s, u, _) = svd_full(m);
    let smax = s[0];
    let r = if smax == 0.0 { 0 } else { s.iter().filter(|&&x| x > rtol * smax).count() };
    u.view((0, 0), (m.nrows(), r)).into_owned()
}

/// Orthonormal basis of the null space.
pub fn nullspace(m: &CMat, rtol: f64) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMat::identity(n, n);
    }
    let (s, _, v) = svd_full(m);
    let smax = s[0];
    let r = if smax == 0.0 { 0 } else { s.iter().filter(|&&x| x > rtol * smax).count() };
    let r = r.min(n);
    v.view((0, r), (n, n - r)).into_owned()
}

/// Right singular vector for the smallest singular value of a square matrix.
pub fn smallest_singular_vector(m: &CMat) -> DVector<Complex64> {
    let (_, _, v) = svd_full(m);
    let n = m.ncols();
    v.column(n - 1).into_owned()
}

pub fn eigenvalues(m: &CMat) -> Option<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Some(Vec::new());
    }
    to_faer(m).eigenvalues().ok()
}

pub fn spectral_radius(m: &CMat) -> Option<f64> {
    Some(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Minimum-norm least-squares solution of `m x = b`.
pub fn lstsq(m: &RMat, b: &DVector<f64>) -> DVector<f64> {
    if m.ncols() == 0 {
        return DVector::zeros(0);
    }
    let d = svd_real(m);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let mut x = DVector::zeros(m.ncols());
    for (i, &si) in d.s.iter().enumerate() {
        if si > smax * 1e-13 {
            let coef = d.u.column(i).dot(b) / si;
            x += d.v.column(i) * coef;
        }
    }
    x
}

pub fn sym_eigenvalues(q: &RMat) -> Vec<f64> {
    if q.nrows() == 0 {
        return Vec::new();
    }
    let sym = (q + q.transpose()) * 0.5;
    to_faer(&sym).self_adjoint_eigenvalues(faer::Side::Lower).expect("eigenvalues of a finite matrix")
}

/// `max |m_ij|`.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Solve the affine least-squares problem `min |f(x)|` for an affine map `f: R^n -> R^m`.
/// Returns the minimizer and the residual `|f(x)|`.
pub fn solve_affine<F>(n: usize, f: F) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = vec![0.0; n];
    let f0 = f(&x);
    let m = f0.len();
    let mut a = RMat::zeros(m, n);
    for j in 0..n {
        x[j] = 1.0;
        let fj = f(&x);
        x[j] = 0.0;
        for i in 0..m {
            a[(i, j)] = fj[i] - f0[i];
        }
    }
    let rhs = DVector::from_iterator(m, f0.iter().map(|v| -v));
    let sol = lstsq(&a, &rhs);
    let sol: Vec<f64> = sol.iter().copied().collect();
    let res = f(&sol).iter().map(|v| v * v).sum::<f64>().sqrt();
    (sol, res)
}
