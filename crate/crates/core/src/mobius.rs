//! Points of the sphere S^n and ball B^{n+1}, and the Möbius group acting on
//! them in the normal form `x ↦ g_w(ρ·x)`.
//!
//! `g_w` is the orientation preserving Möbius map sending the origin to `w`
//! and fixing `±w/|w|`:
//!
//! ```text
//! g_w(x) = (x(1 - |w|²) + w(1 + |x|² + 2<w,x>)) / (1 + |w|²|x|² + 2<w,x>)
//! ```
//!
//! with inverse `g_{-w}`. Every element of the group factors uniquely as
//! `g_w ∘ ρ` with `w = g(0)` and `ρ` orthogonal.

use std::ops::{Add, Div, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::vector::{self, Vector};

/// Points with `|x| >= 1 - BALL_MARGIN` are not accepted as ball points.
pub const BALL_MARGIN: f64 = 1e-15;

/// Tolerance used when deciding that a point lies on the closed ball.
pub const CLOSED_BALL_SLACK: f64 = 1e-12;

const ORTHO_TOL: f64 = 1e-12;

/// A point of S^n, stored by its ambient coordinates and renormalised on
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint(Vector);

impl SpherePoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let r = vector::norm(coords);
        if !r.is_finite() || r == 0.0 {
            return Err(Error::DegeneratePoint);
        }
        Ok(SpherePoint(coords.iter().map(|x| x / r).collect()))
    }

    /// Standard basis vector `e_{j+1}` (zero based index).
    pub fn basis(dim: usize, j: usize) -> Self {
        SpherePoint(vector::basis(dim, j))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }
}

/// A point of the open ball B^{n+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint(Vector);

impl BallPoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let r = vector::norm(coords);
        if !r.is_finite() || r >= 1.0 - BALL_MARGIN {
            return Err(Error::OutsideBall { norm: r });
        }
        Ok(BallPoint(coords.iter().copied().collect()))
    }

    pub fn origin(dim: usize) -> Self {
        BallPoint(vector::zeros(dim))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        vector::norm(&self.0)
    }

    pub fn negated(&self) -> Self {
        BallPoint(self.0.iter().map(|x| -x).collect())
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }
}

/// Minimal arithmetic needed to evaluate `g_w` over both reals and
/// complex-step perturbations.
pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Mul<f64, Output = Self>
{
    fn from_f64(x: f64) -> Self;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

fn gw_generic<T: Scalar>(w: &[f64], x: &[T]) -> Vec<T> {
    let s = vector::norm_sq(w);
    let mut xx = T::from_f64(0.0);
    let mut wx = T::from_f64(0.0);
    for (xi, wi) in x.iter().zip(w) {
        xx = xx + *xi * *xi;
        wx = wx + *xi * *wi;
    }
    let den = T::from_f64(1.0) + xx * s + wx * 2.0;
    let coef = T::from_f64(1.0) + xx + wx * 2.0;
    x.iter()
        .zip(w)
        .map(|(xi, wi)| (*xi * (1.0 - s) + coef * *wi) / den)
        .collect()
}

/// Writes `g_w(x)` into `out`. No validation; `|w| < 1` and `|x| <= 1` are
/// the caller's responsibility.
#[inline]
pub(crate) fn gw_into(w: &[f64], x: &[f64], out: &mut [f64]) {
    let s = vector::norm_sq(w);
    let xx = vector::norm_sq(x);
    let wx = vector::dot(w, x);
    let den = 1.0 + s * xx + 2.0 * wx;
    let a = (1.0 - s) / den;
    let b = (1.0 + xx + 2.0 * wx) / den;
    for ((o, xi), wi) in out.iter_mut().zip(x).zip(w) {
        *o = a * xi + b * wi;
    }
}

/// `g_{-w}(ζ)` for a unit vector `ζ`, in the form
/// `(1-|w|²)(ζ-w)/|ζ-w|² - w`, which keeps full relative accuracy when `ζ`
/// and `w` are both close to the same boundary point.
#[inline]
pub(crate) fn g_minus_w_on_sphere(w: &[f64], zeta: &[f64], out: &mut [f64]) {
    let a = 1.0 - vector::norm_sq(w);
    let den: f64 = zeta.iter().zip(w).map(|(z, v)| (z - v) * (z - v)).sum();
    let c = a / den;
    for ((o, z), wi) in out.iter_mut().zip(zeta).zip(w) {
        *o = c * (z - wi) - wi;
    }
}

/// Evaluates `g_w(x)` for `|w| < 1` and `x` in the closed ball.
pub fn apply_gw(w: &[f64], x: &[f64]) -> Result<Vector> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            found: x.len(),
        });
    }
    let rw = vector::norm(w);
    if !(rw < 1.0) {
        return Err(Error::OutsideBall { norm: rw });
    }
    let rx = vector::norm(x);
    if !(rx <= 1.0 + CLOSED_BALL_SLACK) {
        return Err(Error::OutsideClosedBall { norm: rx });
    }
    let mut out = vector::zeros(x.len());
    gw_into(w, x, &mut out);
    Ok(out)
}

/// Conformal Jacobian determinant of `g_w` at a sphere point,
/// `((1-|w|²)/|ζ+w|²)^n`.
pub fn gw_boundary_jacobian(w: &[f64], zeta: &[f64]) -> f64 {
    let n = (zeta.len() - 1) as i32;
    let s = vector::norm_sq(w);
    let d: f64 = zeta.iter().zip(w).map(|(z, v)| (z + v) * (z + v)).sum();
    ((1.0 - s) / d).powi(n)
}

/// Distance for the metric `2|dx|/(1-|x|²)`.
pub fn hyperbolic_distance(a: &BallPoint, b: &BallPoint) -> f64 {
    let d = vector::dist(a.coords(), b.coords());
    let den = ((1.0 - vector::norm_sq(a.coords())) * (1.0 - vector::norm_sq(b.coords()))).sqrt();
    2.0 * (d / den).asinh()
}

/// Element of the Möbius group in the factorised form `x ↦ g_w(ρ·x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusMap {
    w: BallPoint,
    rho: DMatrix<f64>,
    det_sign: i8,
}

impl MobiusMap {
    pub fn identity(dim: usize) -> Self {
        MobiusMap {
            w: BallPoint::origin(dim),
            rho: DMatrix::identity(dim, dim),
            det_sign: 1,
        }
    }

    /// The pure translation `g_w`.
    pub fn translation(w: BallPoint) -> Self {
        let dim = w.dim();
        MobiusMap {
            w,
            rho: DMatrix::identity(dim, dim),
            det_sign: 1,
        }
    }

    /// An orthogonal linear map; rejected if `ρᵀρ` differs from the identity
    /// by more than 1e-12.
    pub fn rotation(rho: DMatrix<f64>) -> Result<Self> {
        let dim = rho.nrows();
        Self::from_parts(BallPoint::origin(dim), rho)
    }

    /// The reflection `c` in the hyperplane `x_{n+1} = 0`.
    pub fn reflection(dim: usize) -> Self {
        let mut rho = DMatrix::identity(dim, dim);
        rho[(dim - 1, dim - 1)] = -1.0;
        MobiusMap {
            w: BallPoint::origin(dim),
            rho,
            det_sign: -1,
        }
    }

    /// Rotation by `theta` in the `(i, j)` coordinate plane.
    pub fn planar_rotation(dim: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut rho = DMatrix::identity(dim, dim);
        let (s, c) = theta.sin_cos();
        rho[(i, i)] = c;
        rho[(j, j)] = c;
        rho[(i, j)] = -s;
        rho[(j, i)] = s;
        MobiusMap {
            w: BallPoint::origin(dim),
            rho,
            det_sign: 1,
        }
    }

    pub fn from_parts(w: BallPoint, rho: DMatrix<f64>) -> Result<Self> {
        let dim = w.dim();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rho.nrows(),
            });
        }
        let defect = (rho.transpose() * &rho - DMatrix::<f64>::identity(dim, dim)).amax();
        if !(defect <= ORTHO_TOL) {
            return Err(Error::NotOrthogonal { defect });
        }
        let det_sign = if rho.determinant() > 0.0 { 1 } else { -1 };
        Ok(MobiusMap { w, rho, det_sign })
    }

    /// A random element with translation part of norm at most `max_radius`
    /// and a Haar-distributed orthogonal part (orientation reversing with
    /// probability 1/2 unless `orientation_preserving`).
    pub fn random<R: Rng + ?Sized>(
        dim: usize,
        max_radius: f64,
        orientation_preserving: bool,
        rng: &mut R,
    ) -> Self {
        let rho = random_orthogonal(dim, orientation_preserving, rng);
        let w = random_ball_point(dim, max_radius, rng);
        let det_sign = if rho.determinant() > 0.0 { 1 } else { -1 };
        MobiusMap { w, rho, det_sign }
    }

    pub fn dim(&self) -> usize {
        self.w.dim()
    }

    pub fn translation_part(&self) -> &BallPoint {
        &self.w
    }

    pub fn rotation_part(&self) -> &DMatrix<f64> {
        &self.rho
    }

    pub fn det_sign(&self) -> i8 {
        self.det_sign
    }

    pub fn is_identity(&self) -> bool {
        self.w.norm() == 0.0 && self.rho == DMatrix::identity(self.dim(), self.dim())
    }

    fn rotate(&self, x: &[f64]) -> Vector {
        let dim = self.dim();
        let mut out = vector::zeros(dim);
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..dim).map(|j| self.rho[(i, j)] * x[j]).sum();
        }
        out
    }

    /// `g_w(ρ·x)` for `x` in the closed ball. No validation.
    pub fn apply(&self, x: &[f64]) -> Vector {
        let y = self.rotate(x);
        let mut out = vector::zeros(y.len());
        gw_into(self.w.coords(), &y, &mut out);
        out
    }

    pub fn apply_checked(&self, x: &[f64]) -> Result<Vector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let r = vector::norm(x);
        if !(r <= 1.0 + CLOSED_BALL_SLACK) {
            return Err(Error::OutsideClosedBall { norm: r });
        }
        Ok(self.apply(x))
    }

    pub fn apply_sphere(&self, zeta: &SpherePoint) -> SpherePoint {
        SpherePoint::new(&self.apply(zeta.coords())).expect("Möbius image of a sphere point")
    }

    pub fn apply_ball(&self, x: &BallPoint) -> Result<BallPoint> {
        BallPoint::new(&self.apply(x.coords()))
    }

    /// Canonical form of `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let dim = self.dim();
        let origin = vector::zeros(dim);
        let w_new = self.apply(&other.apply(&origin));
        // Rounding can only push the image of 0 to the boundary when the
        // factors are already at the edge of representability.
        let w_ball = BallPoint::new(&w_new).unwrap_or_else(|_| {
            let r = vector::norm(&w_new);
            BallPoint(vector::scaled(&w_new, (1.0 - 2.0 * BALL_MARGIN) / r))
        });
        let back = w_ball.negated();
        let mut cols = DMatrix::<f64>::zeros(dim, dim);
        let mut tmp = vector::zeros(dim);
        for j in 0..dim {
            let e = vector::basis(dim, j);
            let y = self.apply(&other.apply(&e));
            gw_into(back.coords(), &y, &mut tmp);
            for i in 0..dim {
                cols[(i, j)] = tmp[i];
            }
        }
        let rho = gram_schmidt(cols);
        let det_sign = if rho.determinant() > 0.0 { 1 } else { -1 };
        MobiusMap {
            w: w_ball,
            rho,
            det_sign,
        }
    }

    /// `(g_w∘ρ)⁻¹ = ρᵀ∘g_{-w}`, returned in canonical form.
    pub fn inverse(&self) -> MobiusMap {
        let w_inv = self.rho.transpose() * nalgebra::DVector::from_column_slice(self.w.coords());
        let w_inv: Vector = w_inv.iter().map(|x| -x).collect();
        MobiusMap {
            w: BallPoint(w_inv),
            rho: self.rho.transpose(),
            det_sign: self.det_sign,
        }
    }

    /// Differential of the map at `x`, exact to rounding (complex-step
    /// forward differentiation of the rational formula).
    pub fn differential(&self, x: &[f64]) -> DMatrix<f64> {
        let dim = self.dim();
        let y = self.rotate(x);
        let h = 1e-30;
        let mut dg = DMatrix::<f64>::zeros(dim, dim);
        for j in 0..dim {
            let pert: Vec<Complex64> = y
                .iter()
                .enumerate()
                .map(|(k, v)| Complex64::new(*v, if k == j { h } else { 0.0 }))
                .collect();
            let out = gw_generic(self.w.coords(), &pert);
            for i in 0..dim {
                dg[(i, j)] = out[i].im / h;
            }
        }
        dg * &self.rho
    }

    /// `|Jac_g(ζ)|` for the restriction of `g` to S^n; the orthogonal part
    /// contributes a factor 1.
    pub fn boundary_jacobian_norm(&self, zeta: &SpherePoint) -> f64 {
        let y = self.rotate(zeta.coords());
        gw_boundary_jacobian(self.w.coords(), &y)
    }
}

fn gram_schmidt(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let dim = m.nrows();
    for j in 0..dim {
        for k in 0..j {
            let proj: f64 = (0..dim).map(|i| m[(i, j)] * m[(i, k)]).sum();
            for i in 0..dim {
                m[(i, j)] -= proj * m[(i, k)];
            }
        }
        let r: f64 = (0..dim).map(|i| m[(i, j)] * m[(i, j)]).sum::<f64>().sqrt();
        debug_assert!(r > ORTHO_TOL, "degenerate column in orthogonal part");
        for i in 0..dim {
            m[(i, j)] /= r;
        }
    }
    m
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix with the sign fix).
pub fn random_orthogonal<R: Rng + ?Sized>(
    dim: usize,
    orientation_preserving: bool,
    rng: &mut R,
) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if orientation_preserving && q.determinant() < 0.0 {
        for i in 0..dim {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Uniformly random direction scaled by a radius uniform in `[0, max_radius]`.
pub fn random_ball_point<R: Rng + ?Sized>(dim: usize, max_radius: f64, rng: &mut R) -> BallPoint {
    let dir = random_sphere_point(dim, rng);
    let r = max_radius * rng.random::<f64>();
    BallPoint(vector::scaled(dir.coords(), r))
}

pub fn random_sphere_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> SpherePoint {
    loop {
        let v: Vector = (0..dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        if let Ok(p) = SpherePoint::new(&v) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn gw_sends_origin_to_w() {
        let w = [0.3, -0.2, 0.1];
        let out = apply_gw(&w, &[0.0; 3]).unwrap();
        assert!(vector::max_abs_diff(&out, &w) < 1e-16);
    }

    #[test]
    fn gw_fixes_direction_of_w() {
        let out = apply_gw(&[0.5, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert!(vector::max_abs_diff(&out, &[1.0, 0.0, 0.0]) < 1e-15);
        let out = apply_gw(&[0.5, 0.0, 0.0], &[-1.0, 0.0, 0.0]).unwrap();
        assert!(vector::max_abs_diff(&out, &[-1.0, 0.0, 0.0]) < 1e-15);
    }

    #[test]
    fn gw_rejects_boundary_centre() {
        assert!(matches!(
            apply_gw(&[1.0, 0.0], &[0.0, 0.0]),
            Err(Error::OutsideBall { .. })
        ));
        assert!(apply_gw(&[0.2, 0.0], &[1.5, 0.0]).is_err());
    }

    #[test]
    fn gw_inverse_round_trip() {
        let mut rng = rng();
        for dim in 2..=4 {
            for k in 0..1000 {
                let w = random_ball_point(dim, 0.95, &mut rng);
                let x: Vector = if k % 2 == 0 {
                    random_sphere_point(dim, &mut rng).into_vector()
                } else {
                    random_ball_point(dim, 0.99, &mut rng).into_vector()
                };
                let y = apply_gw(w.coords(), &x).unwrap();
                let back = apply_gw(w.negated().coords(), &y).unwrap();
                assert!(vector::max_abs_diff(&back, &x) < 1e-12, "dim {dim}");
            }
        }
    }

    #[test]
    fn ball_point_rejects_near_boundary() {
        assert!(BallPoint::new(&[1.0 - 1e-16, 0.0]).is_err());
        assert!(BallPoint::new(&[0.999_999, 0.0]).is_ok());
        assert!(BallPoint::new(&[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn sphere_point_is_renormalised() {
        let p = SpherePoint::new(&[3.0, 4.0]).unwrap();
        assert!((vector::norm(p.coords()) - 1.0).abs() < 1e-15);
        assert!(SpherePoint::new(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn reflection_flips_last_coordinate() {
        let c = MobiusMap::reflection(3);
        let out = c.apply(&[0.1, 0.2, 0.3]);
        assert_eq!(out.as_slice(), &[0.1, 0.2, -0.3]);
        assert_eq!(c.det_sign(), -1);
    }

    #[test]
    fn composition_of_radial_maps() {
        let g = MobiusMap::translation(BallPoint::new(&[0.5, 0.0]).unwrap());
        let gg = g.compose(&g);
        let w = gg.translation_part().coords();
        assert!((w[0] - 0.8).abs() < 1e-15);
        assert!(w[1].abs() < 1e-15);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = rng();
        for dim in 2..=4 {
            for _ in 0..50 {
                let f = MobiusMap::random(dim, 0.8, false, &mut rng);
                let g = MobiusMap::random(dim, 0.8, false, &mut rng);
                let h = MobiusMap::random(dim, 0.8, false, &mut rng);
                let x = random_ball_point(dim, 0.9, &mut rng);
                let left = f.compose(&g).compose(&h).apply(x.coords());
                let right = f.compose(&g.compose(&h)).apply(x.coords());
                let direct = f.apply(&g.apply(&h.apply(x.coords())));
                assert!(vector::max_abs_diff(&left, &direct) < 1e-12);
                assert!(vector::max_abs_diff(&right, &direct) < 1e-12);
            }
        }
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let mut rng = rng();
        for _ in 0..50 {
            let g = MobiusMap::random(3, 0.9, false, &mut rng);
            let id = g.compose(&g.inverse());
            assert!(id.translation_part().norm() < 1e-12);
            let defect = (id.rotation_part() - DMatrix::<f64>::identity(3, 3)).amax();
            assert!(defect < 1e-12);
        }
    }

    #[test]
    fn translation_then_rotation_keeps_translation_part() {
        let mut rng = rng();
        let w = BallPoint::new(&[0.1, 0.4, -0.3]).unwrap();
        let rot = MobiusMap::rotation(random_orthogonal(3, true, &mut rng)).unwrap();
        let g = MobiusMap::translation(w.clone()).compose(&rot);
        assert!(vector::max_abs_diff(g.translation_part().coords(), w.coords()) < 1e-15);
    }

    #[test]
    fn canonical_form_reproduces_action() {
        let mut rng = rng();
        for _ in 0..100 {
            let g = MobiusMap::random(3, 0.9, false, &mut rng);
            let rebuilt =
                MobiusMap::from_parts(g.translation_part().clone(), g.rotation_part().clone())
                    .unwrap();
            let canon = MobiusMap::identity(3).compose(&g);
            let x = random_sphere_point(3, &mut rng);
            let a = g.apply(x.coords());
            assert!(vector::max_abs_diff(&a, &rebuilt.apply(x.coords())) < 1e-12);
            assert!(vector::max_abs_diff(&a, &canon.apply(x.coords())) < 1e-12);
            assert_eq!(canon.det_sign(), g.det_sign());
        }
    }

    #[test]
    fn sphere_is_preserved() {
        let mut rng = rng();
        for _ in 0..500 {
            let g = MobiusMap::random(3, 0.95, false, &mut rng);
            let z = random_sphere_point(3, &mut rng);
            assert!((vector::norm(&g.apply(z.coords())) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_orthogonal_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            MobiusMap::rotation(m),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn boundary_jacobian_values() {
        let z = SpherePoint::basis(3, 0);
        assert_eq!(MobiusMap::identity(3).boundary_jacobian_norm(&z), 1.0);
        let g = MobiusMap::translation(BallPoint::new(&[0.5, 0.0, 0.0]).unwrap());
        assert!((g.boundary_jacobian_norm(&z) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_jacobian_matches_area_distortion() {
        // Finite-difference area ratio of a small geodesic square at ζ.
        let g = MobiusMap::translation(BallPoint::new(&[0.5, 0.0, 0.0]).unwrap());
        let z = SpherePoint::basis(3, 0);
        let h = 1e-5;
        let img = |a: f64, b: f64| {
            let p = SpherePoint::new(&[1.0, a, b]).unwrap();
            g.apply(p.coords())
        };
        let du = vector::scaled(&vector::sub(&img(h, 0.0), &img(-h, 0.0)), 0.5 / h);
        let dv = vector::scaled(&vector::sub(&img(0.0, h), &img(0.0, -h)), 0.5 / h);
        let cross = [
            du[1] * dv[2] - du[2] * dv[1],
            du[2] * dv[0] - du[0] * dv[2],
            du[0] * dv[1] - du[1] * dv[0],
        ];
        let area = vector::norm(&cross);
        assert!((area - g.boundary_jacobian_norm(&z)).abs() < 1e-8);
    }

    #[test]
    fn boundary_jacobian_of_inverse_is_harmonic_kernel() {
        let mut rng = rng();
        for _ in 0..100 {
            let w = random_ball_point(3, 0.9, &mut rng);
            let z = random_sphere_point(3, &mut rng);
            let g = MobiusMap::translation(w.negated());
            let s = vector::norm_sq(w.coords());
            let d = vector::norm_sq(&vector::sub(z.coords(), w.coords()));
            let kernel = ((1.0 - s) / d).powi(2);
            assert!((g.boundary_jacobian_norm(&z) - kernel).abs() <= 1e-12 * kernel.max(1.0));
        }
    }

    #[test]
    fn differential_is_conformal_on_the_sphere() {
        let mut rng = rng();
        for _ in 0..100 {
            let g = MobiusMap::random(3, 0.9, false, &mut rng);
            let z = random_sphere_point(3, &mut rng);
            let d = g.differential(z.coords());
            // Tangent basis at ζ.
            let zc = z.coords();
            let a = if zc[0].abs() < 0.9 {
                [1.0, 0.0, 0.0]
            } else {
                [0.0, 1.0, 0.0]
            };
            let mut t1 = vector::sub(&a, &vector::scaled(zc, vector::dot(&a, zc)));
            let r = vector::norm(&t1);
            t1.iter_mut().for_each(|x| *x /= r);
            let t2 = [
                zc[1] * t1[2] - zc[2] * t1[1],
                zc[2] * t1[0] - zc[0] * t1[2],
                zc[0] * t1[1] - zc[1] * t1[0],
            ];
            let tangent = DMatrix::from_columns(&[
                nalgebra::DVector::from_column_slice(&t1),
                nalgebra::DVector::from_column_slice(&t2),
            ]);
            let sv = (d * tangent).singular_values();
            assert!((sv[0] - sv[1]).abs() <= 1e-8 * sv[0]);
        }
    }

    #[test]
    fn differential_matches_central_differences() {
        let mut rng = rng();
        let g = MobiusMap::random(3, 0.7, false, &mut rng);
        let x = [0.1, -0.2, 0.3];
        let d = g.differential(&x);
        let h = 1e-6;
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let col = vector::scaled(&vector::sub(&g.apply(&xp), &g.apply(&xm)), 0.5 / h);
            for i in 0..3 {
                assert!((col[i] - d[(i, j)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn hyperbolic_distance_along_radius() {
        let o = BallPoint::origin(3);
        assert_eq!(hyperbolic_distance(&o, &o), 0.0);
        for r in [0.1, 0.5, 0.9, 0.99] {
            let p = BallPoint::new(&[r, 0.0, 0.0]).unwrap();
            let expect = ((1.0 + r) / (1.0 - r)).ln();
            assert!((hyperbolic_distance(&o, &p) - expect).abs() < 1e-13 * expect.max(1.0));
        }
    }

    #[test]
    fn hyperbolic_distance_is_invariant() {
        let mut rng = rng();
        for _ in 0..50 {
            let g = MobiusMap::random(3, 0.9, false, &mut rng);
            let a = random_ball_point(3, 0.9, &mut rng);
            let b = random_ball_point(3, 0.9, &mut rng);
            let d0 = hyperbolic_distance(&a, &b);
            let d1 = hyperbolic_distance(&g.apply_ball(&a).unwrap(), &g.apply_ball(&b).unwrap());
            assert!((d0 - d1).abs() < 1e-10);
        }
    }
}
