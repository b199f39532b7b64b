//! Small ambient-space vectors and the handful of slice helpers the rest of
//! the crate is written against.

use smallvec::SmallVec;

/// Coordinates in R^{n+1}. Inline storage covers the circle and the
/// 2-sphere cases without allocating.
pub type Vector = SmallVec<[f64; 4]>;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn zeros(dim: usize) -> Vector {
    SmallVec::from_elem(0.0, dim)
}

/// The j-th standard basis vector (zero based).
pub fn basis(dim: usize, j: usize) -> Vector {
    let mut v = zeros(dim);
    v[j] = 1.0;
    v
}

pub fn scaled(a: &[f64], s: f64) -> Vector {
    a.iter().map(|x| x * s).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `acc += s * a`
#[inline]
pub fn axpy(acc: &mut [f64], s: f64, a: &[f64]) {
    for (o, x) in acc.iter_mut().zip(a) {
        *o += s * x;
    }
}

/// Largest absolute coordinate difference.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
