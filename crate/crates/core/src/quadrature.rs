//! Quadrature rules for the normalised surface measure η₀ on S^n.
//!
//! * `n = 1`: `2^level` equispaced nodes with equal weights (trapezoidal
//!   rule, exact for trigonometric polynomials of degree `< 2^level`).
//! * `n = 2`: Gauss–Legendre in `cos θ` times equispaced azimuth,
//!   `level × 2·level` nodes, exact for spherical polynomials of degree
//!   `< 2·level`.
//! * `n >= 3`: `4^level` quasi-random points (antipodally paired) with equal
//!   weights; integrals come with a standard error estimate.
//!
//! Every rule is symmetric under `x ↦ -x` and under the reflection of the
//! last coordinate, node for node, so the Euclidean mean of the rule is zero
//! to rounding.

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::vector::{self, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Trapezoidal,
    GaussProduct,
    MonteCarlo,
}

/// A weighted node set on S^n; weights are positive and sum to one.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
    kind: RuleKind,
}

/// Integral estimate. `std_error` is present for Monte Carlo rules only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: Option<f64>,
}

/// Largest level of the circle rule (`2^level` nodes).
pub const MAX_CIRCLE_LEVEL: usize = 20;

/// Largest level of the Gauss product rule on S² (`2·level²` nodes).
pub const MAX_SPHERE_LEVEL: usize = 512;

/// Largest level of the quasi-random rule (`4^level` nodes).
pub const MAX_MONTE_CARLO_LEVEL: usize = 10;

/// Builds the rule of the given level for S^n.
pub fn make_rule(n: usize, level: usize) -> Result<QuadratureRule> {
    let max = match n {
        1 => MAX_CIRCLE_LEVEL,
        2 => MAX_SPHERE_LEVEL,
        _ => MAX_MONTE_CARLO_LEVEL,
    };
    if !(3..=max).contains(&level) {
        return Err(Error::UnsupportedLevel { level, max });
    }
    match n {
        0 => Err(Error::UnsupportedDimension { n }),
        1 => Ok(circle_rule(level)),
        2 => Ok(sphere_rule(level)),
        _ => Ok(monte_carlo_rule(n, level)),
    }
}

fn circle_rule(level: usize) -> QuadratureRule {
    let count = 1usize << level;
    let mut nodes = vec![0.0; 2 * count];
    let half = count / 2;
    for k in 0..=half {
        let (s, c) = (std::f64::consts::TAU * k as f64 / count as f64).sin_cos();
        let (s, c) = if k == 0 {
            (0.0, 1.0)
        } else if k == half {
            (0.0, -1.0)
        } else if 4 * k == count {
            (1.0, 0.0)
        } else {
            (s, c)
        };
        nodes[2 * k] = c;
        nodes[2 * k + 1] = s;
        if k != 0 && k != half {
            let m = count - k;
            nodes[2 * m] = c;
            nodes[2 * m + 1] = -s;
        }
    }
    QuadratureRule {
        dim: 2,
        nodes,
        weights: vec![1.0 / count as f64; count],
        order: count - 1,
        kind: RuleKind::Trapezoidal,
    }
}

/// Gauss–Legendre nodes on [-1, 1] forced to exact mirror symmetry.
fn symmetric_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(count.try_into().expect("count >= 3"));
    let mut pairs: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (*x, *w)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut xs = vec![0.0; count];
    let mut ws = vec![0.0; count];
    for i in 0..count / 2 {
        let j = count - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[j].1 + pairs[i].1);
        xs[i] = -x;
        xs[j] = x;
        ws[i] = w;
        ws[j] = w;
    }
    if count % 2 == 1 {
        xs[count / 2] = 0.0;
        ws[count / 2] = pairs[count / 2].1;
    }
    (xs, ws)
}

fn sphere_rule(level: usize) -> QuadratureRule {
    let rings = level;
    let az = 2 * level;
    let (xs, ws) = symmetric_legendre(rings);
    let wsum: f64 = ws.iter().sum();
    // Azimuthal cosines/sines with exact symmetry φ ↦ -φ.
    let mut trig = vec![(0.0, 0.0); az];
    for k in 0..=az / 2 {
        let (s, c) = (std::f64::consts::TAU * k as f64 / az as f64).sin_cos();
        let (s, c) = if k == 0 {
            (0.0, 1.0)
        } else if k == az / 2 {
            (0.0, -1.0)
        } else {
            (s, c)
        };
        trig[k] = (c, s);
        if k != 0 && k != az / 2 {
            trig[az - k] = (c, -s);
        }
    }
    let mut nodes = Vec::with_capacity(3 * rings * az);
    let mut weights = Vec::with_capacity(rings * az);
    for (x, w) in xs.iter().zip(&ws) {
        let rho = (1.0 - x * x).sqrt();
        for (c, s) in &trig {
            nodes.extend_from_slice(&[rho * c, rho * s, *x]);
            weights.push(w / wsum / az as f64);
        }
    }
    QuadratureRule {
        dim: 3,
        nodes,
        weights,
        order: 2 * level - 1,
        kind: RuleKind::GaussProduct,
    }
}

fn monte_carlo_rule(n: usize, level: usize) -> QuadratureRule {
    let dim = n + 1;
    let count = 1usize << (2 * level);
    let half = count / 2;
    let uniforms = dim + dim % 2;
    // Additive recurrence with the generalised golden ratio.
    let mut phi: f64 = 2.0;
    for _ in 0..50 {
        phi = (1.0 + phi).powf(1.0 / (uniforms as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=uniforms).map(|j| phi.powi(-(j as i32))).collect();
    let mut nodes = vec![0.0; dim * count];
    let mut u = vec![0.0; uniforms];
    let mut g = vec![0.0; uniforms];
    for k in 0..half {
        for (uj, aj) in u.iter_mut().zip(&alpha) {
            *uj = (0.5 + (k as f64 + 1.0) * aj).fract();
        }
        for p in 0..uniforms / 2 {
            let u1 = u[2 * p].max(1e-300);
            let r = (-2.0 * u1.ln()).sqrt();
            let (s, c) = (std::f64::consts::TAU * u[2 * p + 1]).sin_cos();
            g[2 * p] = r * c;
            g[2 * p + 1] = r * s;
        }
        let norm = vector::norm(&g[..dim]);
        for j in 0..dim {
            let v = g[j] / norm;
            nodes[dim * (2 * k) + j] = v;
            nodes[dim * (2 * k + 1) + j] = -v;
        }
    }
    QuadratureRule {
        dim,
        nodes,
        weights: vec![1.0 / count as f64; count],
        order: 0,
        kind: RuleKind::MonteCarlo,
    }
}

impl QuadratureRule {
    /// Ambient dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sphere dimension `n`.
    pub fn sphere_dim(&self) -> usize {
        self.dim - 1
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Polynomial exactness degree (0 for Monte Carlo rules).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[self.dim * i..self.dim * (i + 1)]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.nodes.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    /// Integral with a standard error for Monte Carlo rules.
    pub fn estimate<F: Fn(&[f64]) -> f64>(&self, f: F) -> Estimate {
        let values: Vec<f64> = self.nodes().map(&f).collect();
        let value: f64 = values.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
        let std_error = (self.kind == RuleKind::MonteCarlo).then(|| {
            let n = values.len() as f64;
            let var = values.iter().map(|v| (v - value).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        });
        Estimate { value, std_error }
    }

    /// Integral of a vector valued function with `out_dim` components.
    pub fn integrate_vector<F: Fn(&[f64], &mut [f64])>(&self, out_dim: usize, f: F) -> Vector {
        let mut acc = vector::zeros(out_dim);
        let mut tmp = vector::zeros(out_dim);
        for (x, w) in self.nodes().zip(&self.weights) {
            f(x, &mut tmp);
            vector::axpy(&mut acc, *w, &tmp);
        }
        acc
    }

    /// The same rule with every node multiplied by the orthogonal matrix `rho`.
    pub fn rotated(&self, rho: &DMatrix<f64>) -> QuadratureRule {
        let dim = self.dim;
        let mut nodes = vec![0.0; self.nodes.len()];
        for (src, dst) in self
            .nodes
            .chunks_exact(dim)
            .zip(nodes.chunks_exact_mut(dim))
        {
            for i in 0..dim {
                dst[i] = (0..dim).map(|j| rho[(i, j)] * src[j]).sum();
            }
            let r = vector::norm(dst);
            dst.iter_mut().for_each(|x| *x /= r);
        }
        QuadratureRule {
            nodes,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent 1D reference: ∫ t^k over [-1,1] / 2.
    fn legendre_moment(k: usize) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            1.0 / (k as f64 + 1.0)
        }
    }

    #[test]
    fn rejects_low_level() {
        assert!(matches!(
            make_rule(2, 2),
            Err(Error::UnsupportedLevel { level: 2, .. })
        ));
        assert!(make_rule(0, 5).is_err());
    }

    #[test]
    fn circle_rule_shape() {
        let r = make_rule(1, 6).unwrap();
        assert_eq!(r.len(), 64);
        assert!(r.weights().iter().all(|w| *w == 1.0 / 64.0));
        assert_eq!(r.node(0), &[1.0, 0.0]);
    }

    #[test]
    fn sphere_rule_shape() {
        let r = make_rule(2, 32).unwrap();
        assert_eq!(r.len(), 32 * 64);
        assert_eq!(r.order(), 63);
        assert!((r.weights().iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rules_have_zero_mean() {
        for (n, level) in [(1, 3), (1, 8), (2, 3), (2, 17), (2, 32), (3, 4), (4, 3)] {
            let r = make_rule(n, level).unwrap();
            let m = r.integrate_vector(n + 1, |x, out| out.copy_from_slice(x));
            assert!(vector::norm(&m) < 1e-12, "n={n} level={level}");
            assert!((r.weights().iter().sum::<f64>() - 1.0).abs() < 1e-13);
            assert!(r.nodes().all(|x| (vector::norm(x) - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn second_moments() {
        // ∫ ζᵢζⱼ dη₀ = δᵢⱼ/(n+1)
        for (n, level) in [(1, 5), (2, 32)] {
            let r = make_rule(n, level).unwrap();
            for i in 0..=n {
                for j in 0..=n {
                    let v = r.integrate(|x| x[i] * x[j]);
                    let expect = if i == j { 1.0 / (n as f64 + 1.0) } else { 0.0 };
                    assert!((v - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zonal_polynomials_are_exact_to_degree_63() {
        let r = make_rule(2, 32).unwrap();
        for k in 0..=63 {
            let v = r.integrate(|x| x[2].powi(k as i32));
            assert!((v - legendre_moment(k)).abs() < 1e-12, "degree {k}");
        }
        // Tilted zonal polynomial: about the axis (1,1,1)/√3.
        let a = 1.0 / 3f64.sqrt();
        for k in [2usize, 10, 40, 63] {
            let v = r.integrate(|x| (a * (x[0] + x[1] + x[2])).powi(k as i32));
            assert!((v - legendre_moment(k)).abs() < 1e-12, "tilted degree {k}");
        }
    }

    #[test]
    fn trapezoid_is_spectral() {
        let r = make_rule(1, 6).unwrap();
        // ∫ e^{cos θ} dθ/2π = I₀(1)
        let i0 = 1.266_065_877_752_008_4;
        assert!((r.integrate(|x| x[0].exp()) - i0).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_reports_error() {
        let r = make_rule(3, 5).unwrap();
        let e = r.estimate(|x| x[0] * x[0]);
        let se = e.std_error.unwrap();
        assert!(se > 0.0);
        assert!((e.value - 0.25).abs() < 10.0 * se.max(1e-4));
        assert!(make_rule(2, 8)
            .unwrap()
            .estimate(|x| x[0])
            .std_error
            .is_none());
    }

    #[test]
    fn reflection_symmetry_is_exact() {
        let r = make_rule(2, 9).unwrap();
        // Adding 0.0 identifies -0.0 with 0.0.
        let bits = |v: f64| (v + 0.0).to_bits();
        let mut pts: Vec<[u64; 3]> = r
            .nodes()
            .map(|x| [bits(x[0]), bits(x[1]), bits(x[2])])
            .collect();
        pts.sort();
        for x in r.nodes() {
            let c = [bits(x[0]), bits(x[1]), bits(-x[2])];
            let y = [bits(x[0]), bits(-x[1]), bits(x[2])];
            assert!(pts.binary_search(&c).is_ok());
            assert!(pts.binary_search(&y).is_ok());
        }
    }
}
