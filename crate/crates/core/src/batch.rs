//! Data-parallel maps for sample sweeps. With the `parallel` feature (on by default) [`map`]
//! runs on the rayon pool; without it, it is [`map_seq`].

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_seq(items, f)
}

/// Largest value, propagating the first error. NaN counts as largest.
pub fn max_ok<E>(values: Vec<Result<f64, E>>) -> Result<f64, E> {
    let mut acc = 0.0f64;
    for v in values {
        let v = v?;
        if v.is_nan() || v > acc {
            acc = if v.is_nan() { f64::INFINITY } else { v };
        }
    }
    Ok(acc)
}
