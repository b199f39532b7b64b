//! The vector field `V_μ` and the conformal barycenter `B(μ)`, its unique
//! zero in the ball.
//!
//! ```text
//! V_μ(w) = (1 - |w|²)/2 · ∫ g_{-w}(ζ) dμ(ζ)
//! ```
//!
//! The solver never takes a Newton step away from the origin. At the
//! current iterate `w` it recentres, `ν = (g_{-w})_*μ`, solves the linear
//! model `V_ν(0) + Jac_V(0)·δ = 0` with
//! `Jac_V(0)ε = -∫(ε - ζ<ε,ζ>) dν`, and maps the step back with `g_w`.
//! Conformal naturality makes this an ordinary Newton iteration in
//! disguise.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{self, SphereMeasure};
use crate::mobius::{self, BallPoint, BALL_MARGIN};
use crate::vector::{self, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Convergence threshold on the normalised field `|∫ g_{-w}(ζ) dμ|`.
    pub tol: f64,
    pub max_iters: usize,
    /// Largest Newton step, measured at the recentred origin.
    pub clamp: f64,
    /// Quadrature level used when a rule is built from this config.
    pub level: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-12,
            max_iters: 200,
            clamp: 0.5,
            level: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldValue {
    pub at: BallPoint,
    /// Euclidean components of `V_μ(w)`.
    pub vector: Vector,
    /// `V_μ(w)` divided by `(1 - |w|²)/2`.
    pub normalized: Vector,
}

/// Multiple of `ε/(1 - |w|²)` below which a stalled iteration is accepted
/// as limited by floating-point precision rather than failed.
pub const ROUNDOFF_SLACK: f64 = 256.0;

/// Consecutive steps reducing the residual by less than half that count as
/// a stall once the residual is below the floating-point floor.
const STALL_STEPS: usize = 4;

fn roundoff_floor(w: &[f64]) -> f64 {
    ROUNDOFF_SLACK * f64::EPSILON / (1.0 - vector::norm_sq(w))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarycenterResult {
    pub point: BallPoint,
    /// Norm of the normalised field at `point`.
    pub residual: f64,
    pub iterations: usize,
    /// `residual <= tol`. A result with `converged == false` is returned
    /// only when the line search stalled at the floating-point floor
    /// `ROUNDOFF_SLACK·ε/(1 - |w|²)`.
    pub converged: bool,
}

/// Flat weighted point set; the working form of a measure.
#[derive(Debug, Clone)]
pub(crate) struct Cloud {
    pub dim: usize,
    pub points: Vec<f64>,
    pub masses: Vec<f64>,
}

impl Cloud {
    pub fn from_measure(mu: &SphereMeasure) -> Self {
        let mut points = Vec::with_capacity(mu.support_len() * mu.dim());
        let mut masses = Vec::with_capacity(mu.support_len());
        for (x, m) in mu.points() {
            points.extend_from_slice(x);
            masses.push(m);
        }
        Cloud {
            dim: mu.dim(),
            points,
            masses,
        }
    }

    /// Writes `g_{-w}(ζᵢ)` into `buf` and returns `Σ mᵢ g_{-w}(ζᵢ)`.
    fn recentre(&self, w: &[f64], buf: &mut Vec<f64>) -> Vector {
        buf.resize(self.points.len(), 0.0);
        let mut acc = vector::zeros(self.dim);
        for ((x, y), m) in self
            .points
            .chunks_exact(self.dim)
            .zip(buf.chunks_exact_mut(self.dim))
            .zip(&self.masses)
        {
            mobius::g_minus_w_on_sphere(w, x, y);
            vector::axpy(&mut acc, *m, y);
        }
        acc
    }

    fn largest_mass(&self) -> f64 {
        self.masses.iter().copied().fold(0.0, f64::max)
    }
}

fn ensure_admissible(mu: &SphereMeasure) -> Result<()> {
    let adm = measure::check_admissible(mu);
    match adm.offender() {
        Some((p, m)) => Err(Error::Inadmissible {
            point: p.coords().to_vec(),
            mass: *m,
        }),
        None => Ok(()),
    }
}

/// `V_μ(w)` from the expanded integrand.
pub fn field(mu: &SphereMeasure, w: &BallPoint) -> Result<FieldValue> {
    if w.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: w.dim(),
        });
    }
    ensure_admissible(mu)?;
    Ok(field_unchecked(mu, w))
}

pub(crate) fn field_unchecked(mu: &SphereMeasure, w: &BallPoint) -> FieldValue {
    let mut normalized = vector::zeros(mu.dim());
    let mut y = vector::zeros(mu.dim());
    for (x, m) in mu.points() {
        mobius::g_minus_w_on_sphere(w.coords(), x, &mut y);
        vector::axpy(&mut normalized, m, &y);
    }
    let f = 0.5 * (1.0 - vector::norm_sq(w.coords()));
    FieldValue {
        at: w.clone(),
        vector: vector::scaled(&normalized, f),
        normalized,
    }
}

/// `Jac_V(0)`, the matrix of `ε ↦ -∫(ε - ζ<ε,ζ>) dμ`.
pub fn field_jacobian_at_zero(mu: &SphereMeasure) -> Result<DMatrix<f64>> {
    ensure_admissible(mu)?;
    let cloud = Cloud::from_measure(mu);
    Ok(jacobian_of_points(cloud.dim, &cloud.points, &cloud.masses))
}

pub(crate) fn jacobian_of_points(dim: usize, points: &[f64], masses: &[f64]) -> DMatrix<f64> {
    let mut j = DMatrix::<f64>::zeros(dim, dim);
    let mut total = 0.0;
    for (x, m) in points.chunks_exact(dim).zip(masses) {
        total += m;
        for a in 0..dim {
            for b in 0..dim {
                j[(a, b)] += m * x[a] * x[b];
            }
        }
    }
    for a in 0..dim {
        j[(a, a)] -= total;
    }
    j
}

/// The conformal barycenter, starting from the (clamped) Euclidean mean.
pub fn barycenter(mu: &SphereMeasure, cfg: &SolverConfig) -> Result<BarycenterResult> {
    ensure_admissible(mu)?;
    let cloud = Cloud::from_measure(mu);
    let start = initial_guess(&cloud);
    solve_cloud(&cloud, &start, cfg)
}

/// As [`barycenter`], from a caller supplied starting point.
pub fn barycenter_from(
    mu: &SphereMeasure,
    start: &BallPoint,
    cfg: &SolverConfig,
) -> Result<BarycenterResult> {
    ensure_admissible(mu)?;
    let cloud = Cloud::from_measure(mu);
    solve_cloud(&cloud, start.coords(), cfg)
}

pub(crate) fn initial_guess(cloud: &Cloud) -> Vector {
    let mut m = vector::zeros(cloud.dim);
    for (x, w) in cloud.points.chunks_exact(cloud.dim).zip(&cloud.masses) {
        vector::axpy(&mut m, *w, x);
    }
    let r = vector::norm(&m);
    if r > 0.9 {
        vector::scaled(&m, 0.9 / r)
    } else {
        m
    }
}

pub(crate) fn solve_cloud(
    cloud: &Cloud,
    start: &[f64],
    cfg: &SolverConfig,
) -> Result<BarycenterResult> {
    let dim = cloud.dim;
    let mut w: Vector = start.iter().copied().collect();
    let mut buf = Vec::with_capacity(cloud.points.len());
    let mut trial = Vec::with_capacity(cloud.points.len());
    let mut mean = cloud.recentre(&w, &mut buf);
    let mut residual = vector::norm(&mean);
    let mut history = vec![residual];
    let mut iterations = 0;
    let mut stalled = false;
    let mut slow = 0;
    let mut previous = residual;
    while residual > cfg.tol && iterations < cfg.max_iters {
        iterations += 1;
        let jac = jacobian_of_points(dim, &buf, &cloud.masses);
        let rhs = DVector::from_iterator(dim, mean.iter().map(|v| -0.5 * v));
        let Some(step) = jac.lu().solve(&rhs) else {
            break;
        };
        let mut delta: Vector = step.iter().copied().collect();
        let len = vector::norm(&delta);
        if len > cfg.clamp {
            delta.iter_mut().for_each(|v| *v *= cfg.clamp / len);
        }
        let mut accepted = false;
        for _ in 0..60 {
            let mut cand = vector::zeros(dim);
            mobius::gw_into(&w, &delta, &mut cand);
            if vector::norm(&cand) < 1.0 - BALL_MARGIN {
                let cand_mean = cloud.recentre(&cand, &mut trial);
                let r = vector::norm(&cand_mean);
                if r < residual {
                    w = cand;
                    mean = cand_mean;
                    residual = r;
                    std::mem::swap(&mut buf, &mut trial);
                    accepted = true;
                    break;
                }
            }
            delta.iter_mut().for_each(|v| *v *= 0.5);
        }
        history.push(residual);
        let floor = roundoff_floor(&w);
        slow = if residual > 0.5 * previous { slow + 1 } else { 0 };
        previous = residual;
        if !accepted || (slow >= STALL_STEPS && residual <= floor) {
            stalled = true;
            break;
        }
    }
    let converged = residual <= cfg.tol;
    let floor = roundoff_floor(&w);
    if !converged && !(stalled && residual <= floor) {
        return Err(Error::NoConvergence {
            iterations,
            residual,
            largest_atom: cloud.largest_mass(),
            history,
        });
    }
    Ok(BarycenterResult {
        point: BallPoint::new(&w)?,
        residual,
        iterations,
        converged,
    })
}

/// Outcome of the direction bound test at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionBound {
    /// `μ` of the closed cap around `e₁`.
    pub cap_mass: f64,
    pub threshold: f64,
    /// Whether `cap_mass >= threshold`.
    pub hypothesis: bool,
    /// `<V_μ(0), e₁>`.
    pub inner_product: f64,
}

impl DirectionBound {
    /// The implication "hypothesis ⇒ positive inner product".
    pub fn holds(&self) -> bool {
        !self.hypothesis || self.inner_product > 0.0
    }
}

/// Closed cap `{ζ : |ζ - e₁| <= δ}` of chordal radius `δ ∈ (0, √2)` with
/// threshold `(1 + δ²/2)/2`.
pub fn direction_bound_check(mu: &SphereMeasure, delta: f64) -> Result<DirectionBound> {
    if !(delta > 0.0 && delta < std::f64::consts::SQRT_2) {
        return Err(Error::InvalidArgument(format!(
            "chordal radius {delta} not in (0, √2)"
        )));
    }
    // |ζ - e₁|² = 2 - 2ζ₁
    let cos_bound = 1.0 - 0.5 * delta * delta;
    Ok(cap_check(mu, cos_bound, (1.0 + 0.5 * delta * delta) / 2.0))
}

/// Cap of geodesic radius `π/4` with threshold `2/3`.
pub fn simple_direction_bound_check(mu: &SphereMeasure) -> DirectionBound {
    cap_check(mu, std::f64::consts::FRAC_PI_4.cos(), 2.0 / 3.0)
}

fn cap_check(mu: &SphereMeasure, cos_bound: f64, threshold: f64) -> DirectionBound {
    let cap_mass = mu.integrate(|x| if x[0] >= cos_bound { 1.0 } else { 0.0 });
    let inner_product = 0.5 * mu.mean()[0];
    DirectionBound {
        cap_mass,
        threshold,
        hypothesis: cap_mass >= threshold,
        inner_product,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InwardProbe {
    /// Smallest sampled radius from which the field points inwards all the
    /// way out to 0.999.
    pub radius: f64,
    /// False when even the outermost shell fails (quadrature breakdown).
    pub found: bool,
    /// Largest `<V(w), w>/|w|` over the accepted shells.
    pub worst: f64,
}

const PROBE_OUTER: f64 = 0.999;
const PROBE_SHELLS: usize = 200;

/// Scans shells `|w| = r` from 0.999 inwards along `samples` fixed
/// directions and returns the smallest `r` such that `<V_μ(w), w> < 0` on
/// every sampled shell between `r` and 0.999.
pub fn inward_radius_probe(mu: &SphereMeasure, samples: usize) -> Result<InwardProbe> {
    ensure_admissible(mu)?;
    let dim = mu.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d2a);
    let dirs: Vec<Vector> = (0..samples.max(1))
        .map(|_| mobius::random_sphere_point(dim, &mut rng).into_vector())
        .collect();
    let mut radius = PROBE_OUTER;
    let mut found = false;
    let mut worst = f64::NEG_INFINITY;
    for k in (1..=PROBE_SHELLS).rev() {
        let r = PROBE_OUTER * k as f64 / PROBE_SHELLS as f64;
        let mut shell_worst = f64::NEG_INFINITY;
        for d in &dirs {
            let w = BallPoint::new(&vector::scaled(d, r))?;
            let v = field_unchecked(mu, &w);
            shell_worst = shell_worst.max(vector::dot(&v.vector, d));
        }
        if shell_worst >= 0.0 {
            break;
        }
        worst = worst.max(shell_worst);
        radius = r;
        found = true;
    }
    Ok(InwardProbe {
        radius,
        found,
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{random_ball_point, MobiusMap, SpherePoint};
    use crate::quadrature::make_rule;

    fn atoms(dim: usize, list: &[(&[f64], f64)]) -> SphereMeasure {
        SphereMeasure::from_atoms(
            dim,
            list.iter()
                .map(|(p, m)| (SpherePoint::new(p).unwrap(), *m))
                .collect(),
        )
        .unwrap()
    }

    /// Independent oracle: RK4 integration of `ẇ = V_μ(w)` until the field
    /// is negligible.
    fn flow_oracle(mu: &SphereMeasure) -> Vector {
        let v = |w: &[f64]| field_unchecked(mu, &BallPoint::new(w).unwrap()).vector;
        let mut w = vector::zeros(mu.dim());
        let h = 0.5;
        for _ in 0..100_000 {
            let k1 = v(&w);
            if vector::norm(&k1) <= 1e-13 {
                break;
            }
            let k2 = v(&vector::add(&w, &vector::scaled(&k1, h / 2.0)));
            let k3 = v(&vector::add(&w, &vector::scaled(&k2, h / 2.0)));
            let k4 = v(&vector::add(&w, &vector::scaled(&k3, h)));
            for i in 0..w.len() {
                w[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        w
    }

    #[test]
    fn field_at_origin_of_uniform_vanishes() {
        let mu = SphereMeasure::uniform(&make_rule(2, 16).unwrap());
        let f = field(&mu, &BallPoint::origin(3)).unwrap();
        assert!(vector::norm(&f.vector) < 1e-13);
    }

    #[test]
    fn field_at_origin_is_half_the_mean() {
        let mu = atoms(
            3,
            &[
                (&[1.0, 0.0, 0.0], 0.4),
                (&[-1.0, 0.0, 0.0], 0.3),
                (&[0.0, 1.0, 0.0], 0.3),
            ],
        );
        let f = field(&mu, &BallPoint::origin(3)).unwrap();
        assert!(vector::max_abs_diff(&f.vector, &[0.05, 0.15, 0.0]) < 1e-16);
    }

    #[test]
    fn normalised_field_is_bounded() {
        let mu = atoms(
            3,
            &[
                (&[1.0, 0.0, 0.0], 0.4),
                (&[0.0, 0.0, 1.0], 0.3),
                (&[0.0, 1.0, 0.0], 0.3),
            ],
        );
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let w = random_ball_point(3, 0.999, &mut rng);
            let f = field(&mu, &w).unwrap();
            assert!(vector::norm(&f.normalized) <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn field_rejects_inadmissible() {
        let mu = atoms(2, &[(&[1.0, 0.0], 0.55), (&[-1.0, 0.0], 0.45)]);
        assert!(matches!(
            field(&mu, &BallPoint::origin(2)),
            Err(Error::Inadmissible { .. })
        ));
    }

    #[test]
    fn field_is_natural() {
        let rule = make_rule(2, 8).unwrap();
        let mu = SphereMeasure::with_density(
            &rule,
            vec![
                (SpherePoint::new(&[1.0, 0.0, 0.0]).unwrap(), 0.3),
                (SpherePoint::new(&[0.0, 0.6, 0.8]).unwrap(), 0.2),
            ],
            rule.nodes().map(|x| 1.0 + 0.5 * x[0] * x[1]).collect(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let g = MobiusMap::random(3, 0.8, false, &mut rng);
            let w = random_ball_point(3, 0.8, &mut rng);
            let lhs = g.differential(w.coords())
                * DVector::from_column_slice(&field(&mu, &w).unwrap().vector);
            let gw = g.apply_ball(&w).unwrap();
            let rhs = field(&mu.pushforward(&g), &gw).unwrap().vector;
            for i in 0..3 {
                assert!((lhs[i] - rhs[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn jacobian_of_uniform() {
        for (n, level) in [(1usize, 6), (2, 32)] {
            let mu = SphereMeasure::uniform(&make_rule(n, level).unwrap());
            let j = field_jacobian_at_zero(&mu).unwrap();
            let expect = -(n as f64) / (n as f64 + 1.0);
            let dev = (j - DMatrix::<f64>::identity(n + 1, n + 1) * expect).amax();
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mu = atoms(
            3,
            &[
                (&[1.0, 0.0, 0.0], 0.4),
                (&[0.0, 0.0, 1.0], 0.3),
                (&[0.0, 1.0, 0.3], 0.3),
            ],
        );
        let j = field_jacobian_at_zero(&mu).unwrap();
        let h = 1e-5;
        for c in 0..3 {
            let mut p = vector::zeros(3);
            p[c] = h;
            let fp = field(&mu, &BallPoint::new(&p).unwrap()).unwrap().vector;
            p[c] = -h;
            let fm = field(&mu, &BallPoint::new(&p).unwrap()).unwrap().vector;
            for r in 0..3 {
                assert!(((fp[r] - fm[r]) / (2.0 * h) - j[(r, c)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn uniform_barycenter_is_origin() {
        for (n, level) in [(1, 8), (2, 32)] {
            let mu = SphereMeasure::uniform(&make_rule(n, level).unwrap());
            let b = barycenter(&mu, &SolverConfig::default()).unwrap();
            assert!(b.point.norm() <= 1e-12);
            assert!(b.converged);
        }
    }

    #[test]
    fn harmonic_measure_barycenter_is_centre() {
        let rule = make_rule(2, 32).unwrap();
        let eta = SphereMeasure::uniform(&rule);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let w = random_ball_point(3, 0.9, &mut rng);
            let mu = eta.pushforward(&MobiusMap::translation(w.clone()));
            let b = barycenter(&mu, &SolverConfig::default()).unwrap();
            assert!(vector::dist(b.point.coords(), w.coords()) < 1e-9);
        }
    }

    #[test]
    fn three_atoms_match_flow_oracle() {
        let mu = atoms(
            3,
            &[
                (&[1.0, 0.0, 0.0], 1.0 / 3.0),
                (&[0.0, 1.0, 0.0], 1.0 / 3.0),
                (&[0.0, 0.0, 1.0], 1.0 / 3.0),
            ],
        );
        let b = barycenter(&mu, &SolverConfig::default()).unwrap();
        let p = b.point.coords();
        assert!((p[0] - p[1]).abs() < 1e-10 && (p[1] - p[2]).abs() < 1e-10);
        let oracle = flow_oracle(&mu);
        assert!(vector::dist(p, &oracle) < 1e-9, "{p:?} vs {oracle:?}");
    }

    #[test]
    fn agrees_with_flow_oracle_on_random_measures() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let k = 3 + (rand::Rng::random::<u32>(&mut rng) % 5) as usize;
            let raw: Vec<f64> = (0..k)
                .map(|_| 0.2 + rand::Rng::random::<f64>(&mut rng))
                .collect();
            let total: f64 = raw.iter().sum();
            let list: Vec<(SpherePoint, f64)> = raw
                .iter()
                .map(|m| (mobius::random_sphere_point(3, &mut rng), m / total))
                .collect();
            let mu = SphereMeasure::from_atoms(3, list).unwrap();
            if !measure::check_admissible(&mu).admissible {
                continue;
            }
            let b = barycenter(&mu, &SolverConfig::default()).unwrap();
            let oracle = flow_oracle(&mu);
            assert!(vector::dist(b.point.coords(), &oracle) < 1e-9);
        }
    }

    #[test]
    fn centred_iff_zero_mean() {
        let cfg = SolverConfig::default();
        let sym = atoms(
            3,
            &[
                (&[1.0, 0.0, 0.0], 0.25),
                (&[-1.0, 0.0, 0.0], 0.25),
                (&[0.0, 0.6, 0.8], 0.25),
                (&[0.0, -0.6, -0.8], 0.25),
            ],
        );
        assert!(barycenter(&sym, &cfg).unwrap().point.norm() <= 1e-12);
        let skew = atoms(
            3,
            &[
                (&[1.0, 0.0, 0.0], 0.3),
                (&[-1.0, 0.0, 0.0], 0.2),
                (&[0.0, 1.0, 0.0], 0.25),
                (&[0.0, -1.0, 0.0], 0.25),
            ],
        );
        assert!(barycenter(&skew, &cfg).unwrap().point.norm() > 1e-3);
    }

    #[test]
    fn near_half_atom_still_converges() {
        let mu = atoms(
            2,
            &[
                (&[1.0, 0.0], 0.499),
                (&[0.0, 1.0], 0.2505),
                (&[0.0, -1.0], 0.2505),
            ],
        );
        let b = barycenter(&mu, &SolverConfig::default()).unwrap();
        assert!(b.point.norm() > 0.9);
    }

    #[test]
    fn reports_no_convergence() {
        let mu = atoms(
            3,
            &[
                (&[1.0, 0.0, 0.0], 0.4),
                (&[0.0, 0.0, 1.0], 0.3),
                (&[0.0, 1.0, 0.0], 0.3),
            ],
        );
        let cfg = SolverConfig {
            max_iters: 1,
            ..SolverConfig::default()
        };
        match barycenter(&mu, &cfg) {
            Err(Error::NoConvergence {
                history,
                largest_atom,
                ..
            }) => {
                assert_eq!(largest_atom, 0.4);
                assert_eq!(history.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multistart_agrees() {
        let mu = atoms(
            3,
            &[
                (&[1.0, 0.0, 0.0], 0.4),
                (&[0.0, 0.0, 1.0], 0.35),
                (&[0.0, 1.0, 0.0], 0.25),
            ],
        );
        let cfg = SolverConfig::default();
        let b0 = barycenter(&mu, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let s = random_ball_point(3, 0.95, &mut rng);
            let b = barycenter_from(&mu, &s, &cfg).unwrap();
            assert!(vector::dist(b.point.coords(), b0.point.coords()) < 1e-8);
        }
    }

    #[test]
    fn direction_bound() {
        let pair = atoms(2, &[(&[1.0, 0.0], 0.49), (&[-1.0, 0.0], 0.51)]);
        let d = direction_bound_check(&pair, 0.3).unwrap();
        assert!(!d.hypothesis && d.holds());

        let mu = atoms(3, &[(&[1.0, 0.2, 0.0], 0.9), (&[-1.0, 0.0, 0.0], 0.1)]);
        let d = direction_bound_check(&mu, 1.0).unwrap();
        assert!((d.cap_mass - 0.9).abs() < 1e-15);
        assert!(d.hypothesis && d.inner_product > 0.0);

        assert!(direction_bound_check(&mu, 1.5).is_err());
        assert!(simple_direction_bound_check(&mu).holds());
    }

    #[test]
    fn inward_probe_uniform() {
        let mu = SphereMeasure::uniform(&make_rule(2, 16).unwrap());
        let p = inward_radius_probe(&mu, 16).unwrap();
        assert!(p.found);
        assert!(p.radius < 0.01);
    }

    #[test]
    fn inward_probe_harmonic() {
        let rule = make_rule(2, 32).unwrap();
        let w = BallPoint::new(&[0.5, 0.0, 0.0]).unwrap();
        let mu = SphereMeasure::uniform(&rule).pushforward(&MobiusMap::translation(w));
        let p = inward_radius_probe(&mu, 32).unwrap();
        assert!(p.found && p.radius < 1.0 && p.worst < 0.0);
    }

    #[test]
    fn inward_probe_rejects_inadmissible() {
        let mu = atoms(2, &[(&[1.0, 0.0], 0.45), (&[-1.0, 0.0], 0.55)]);
        assert!(matches!(
            inward_radius_probe(&mu, 8),
            Err(Error::Inadmissible { .. })
        ));
    }
}
