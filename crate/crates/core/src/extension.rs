//! The barycentric extension `Φ = E(φ)` of a sphere map into the ball.
//!
//! For interior `z` the value is `B(φ_*η_z)`. The pushforward is never
//! materialised: `φ_*η_z = (φ∘g_z)_*η₀`, so the sample cloud consists of
//! the images under `φ∘g_z` of a discretisation of `η₀` built from a fixed
//! rule. On the sphere `Φ = φ`.
//!
//! Derivatives use the implicit system
//!
//! ```text
//! F(z, w) = ∫ g_{-w}(φ(ζ)) ((1 - |z|²)/|z - ζ|²)ⁿ dη₀(ζ) = 0
//! ```
//!
//! evaluated after transporting `(z, w)` to `(0, 0)`, where
//! `J_wF = -2∫(I - ψψᵀ) dη₀` and `J_zF = 2n ∫ ψ ζᵀ dη₀` for the recentred
//! map `ψ = g_{-w}∘φ∘g_z`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::barycenter::{self, Cloud, SolverConfig};
use crate::error::{Error, Result};
use crate::measure;
use crate::mobius::{self, BallPoint, SpherePoint, BALL_MARGIN, CLOSED_BALL_SLACK};
use crate::quadrature::QuadratureRule;
use crate::sphere_map::SphereMap;
use crate::vector::{self, Vector};

/// Coordinate resolution of the memo cache.
pub const CACHE_QUANTUM: f64 = 1e-13;

/// Number of jittered rules tried when the map fails on a node.
const JITTER_ATTEMPTS: u64 = 4;

/// Largest normalised node mass accepted for split transport; beyond it
/// the kernel is unresolved and plain pullback sampling is used.
const MAX_SPLIT_MASS: f64 = 0.05;


#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionValue {
    pub point: Vector,
    /// Normalised field residual; zero for boundary evaluations.
    pub residual: f64,
    pub iterations: usize,
    /// `z` was on the sphere and `φ(z)` was returned directly.
    pub boundary: bool,
    /// Two or more samples coincided: the sampled pushforward has atoms
    /// heavier than a single node.
    pub atomic: bool,
    /// Rotations of the rule that had to be tried after map failures.
    pub jitter: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitSystemValue {
    /// `F(z, w)`: the normalised field of `φ_*η_z` at `w`.
    pub f: Vector,
    /// `J_wF` in recentred coordinates.
    pub jw: DMatrix<f64>,
    /// `J_zF` in recentred coordinates.
    pub jz: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityRow {
    pub radius: f64,
    /// `sup |Φ(z) - φ(ζ₀)|` over the sampled `z` with `|z - ζ₀| <= radius`.
    pub sup_distance: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub rows: Vec<ContinuityRow>,
    /// Whether the sup distances are non-increasing as the radius shrinks.
    pub shrinking: bool,
}

/// A sphere map bundled with the quadrature rule and solver settings used
/// to extend it.
pub struct ExtensionEvaluator {
    phi: Arc<dyn SphereMap>,
    rule: QuadratureRule,
    solver: SolverConfig,
    cache: Option<Mutex<HashMap<Vec<i64>, ExtensionValue>>>,
}

impl ExtensionEvaluator {
    pub fn new(
        phi: Arc<dyn SphereMap>,
        rule: QuadratureRule,
        solver: SolverConfig,
    ) -> Result<Self> {
        if phi.dim() != rule.dim() {
            return Err(Error::DimensionMismatch {
                expected: rule.dim(),
                found: phi.dim(),
            });
        }
        Ok(ExtensionEvaluator {
            phi,
            rule,
            solver,
            cache: None,
        })
    }

    /// Enables memoisation keyed by coordinates quantised at
    /// [`CACHE_QUANTUM`].
    pub fn with_cache(mut self) -> Self {
        self.cache = Some(Mutex::new(HashMap::new()));
        self
    }

    pub fn dim(&self) -> usize {
        self.rule.dim()
    }

    pub fn map(&self) -> &Arc<dyn SphereMap> {
        &self.phi
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn solver(&self) -> &SolverConfig {
        &self.solver
    }

    /// `Φ(z)` for `z` in the closed ball.
    pub fn extend_at(&self, z: &[f64]) -> Result<ExtensionValue> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.len(),
            });
        }
        let r = vector::norm(z);
        if !r.is_finite() || r > 1.0 + CLOSED_BALL_SLACK {
            return Err(Error::OutsideClosedBall { norm: r });
        }
        if r >= 1.0 - BALL_MARGIN {
            let p = self.phi.eval(&SpherePoint::new(z)?)?;
            return Ok(ExtensionValue {
                point: p.into_vector(),
                residual: 0.0,
                iterations: 0,
                boundary: true,
                atomic: false,
                jitter: 0,
            });
        }
        let z = BallPoint::new(z)?;
        let key = self.cache.as_ref().map(|_| quantise(z.coords()));
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Some(v) = cache.lock().expect("cache lock").get(key) {
                return Ok(v.clone());
            }
        }
        let value = self.extend_interior(&z)?;
        if let (Some(cache), Some(key)) = (&self.cache, key) {
            cache
                .lock()
                .expect("cache lock")
                .entry(key)
                .or_insert_with(|| value.clone());
        }
        Ok(value)
    }

    fn extend_interior(&self, z: &BallPoint) -> Result<ExtensionValue> {
        let (Sample { cloud, .. }, jitter) = self.sample_with_jitter(z)?;
        let adm = measure::heaviest_cluster(cloud.dim, &cloud.points, &cloud.masses);
        let heaviest = adm.heaviest.as_ref().map_or(0.0, |h| h.1);
        if let Some((p, m)) = adm.heaviest.filter(|_| !adm.admissible) {
            return Err(Error::InadmissibleSample {
                point: p.into_vector().to_vec(),
                mass: m,
            });
        }
        let largest_node = cloud.masses.iter().copied().fold(0.0, f64::max);
        let start = barycenter::initial_guess(&cloud);
        let res = barycenter::solve_cloud(&cloud, &start, &self.solver)?;
        Ok(ExtensionValue {
            point: res.point.into_vector(),
            residual: res.residual,
            iterations: res.iterations,
            boundary: false,
            atomic: heaviest > largest_node * (1.0 + 1e-12),
            jitter,
        })
    }

    fn sample_with_jitter(&self, z: &BallPoint) -> Result<(Sample, u64)> {
        match sample(&*self.phi, &self.rule, z) {
            Ok(c) => Ok((c, 0)),
            Err(Error::MapEval(first)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
                for attempt in 1..=JITTER_ATTEMPTS {
                    let rho = mobius::random_orthogonal(self.dim(), true, &mut rng);
                    if let Ok(c) = sample(&*self.phi, &self.rule.rotated(&rho), z) {
                        return Ok((c, attempt));
                    }
                }
                Err(Error::MapEval(first))
            }
            Err(e) => Err(e),
        }
    }

    /// `F(z, w)` and its partial Jacobians in recentred coordinates.
    pub fn implicit_system(&self, z: &BallPoint, w: &BallPoint) -> Result<ImplicitSystemValue> {
        let (sample, _) = self.sample_with_jitter(z)?;
        Ok(recentred_system(&sample, w))
    }
}

fn recentred_system(sample: &Sample, w: &BallPoint) -> ImplicitSystemValue {
    let cloud = &sample.cloud;
    let dim = cloud.dim;
    let n = sample.sphere_dim as f64;
    let mut f = vector::zeros(dim);
    let mut psi = vector::zeros(dim);
    let mut outer = DMatrix::<f64>::zeros(dim, dim);
    let mut jz = DMatrix::<f64>::zeros(dim, dim);
    for ((y, m), xi) in cloud
        .points
        .chunks_exact(dim)
        .zip(&cloud.masses)
        .zip(sample.sources.chunks_exact(dim))
    {
        mobius::g_minus_w_on_sphere(w.coords(), y, &mut psi);
        vector::axpy(&mut f, *m, &psi);
        for a in 0..dim {
            for b in 0..dim {
                outer[(a, b)] += m * psi[a] * psi[b];
                jz[(a, b)] += m * psi[a] * xi[b];
            }
        }
    }
    let total: f64 = cloud.masses.iter().sum();
    let jw = (outer - DMatrix::<f64>::identity(dim, dim) * total) * 2.0;
    ImplicitSystemValue {
        f,
        jw,
        jz: jz * (2.0 * n),
    }
}

impl ExtensionEvaluator {
    /// `Jac_Φ(z)` by the implicit function theorem.
    pub fn extension_jacobian(&self, z: &BallPoint) -> Result<DMatrix<f64>> {
        let (sample, _) = self.sample_with_jitter(z)?;
        let start = barycenter::initial_guess(&sample.cloud);
        let w = barycenter::solve_cloud(&sample.cloud, &start, &self.solver)?.point;
        let sys = recentred_system(&sample, &w);
        let inv = sys.jw.try_inverse().ok_or(Error::SingularJacobian)?;
        let scale = (1.0 - vector::norm_sq(w.coords())) / (1.0 - vector::norm_sq(z.coords()));
        Ok(-(inv * sys.jz) * scale)
    }

    /// Central finite differences of [`ExtensionEvaluator::extend_at`].
    pub fn finite_difference_jacobian(&self, z: &BallPoint, h: f64) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        let mut j = DMatrix::<f64>::zeros(dim, dim);
        for c in 0..dim {
            let mut p = z.coords().to_vec();
            p[c] += h;
            let fp = self.extend_at(&p)?.point;
            p[c] -= 2.0 * h;
            let fm = self.extend_at(&p)?.point;
            for r in 0..dim {
                j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        Ok(j)
    }

    /// Empirical modulus of continuity of `Φ` at the boundary point `zeta0`:
    /// for each radius, the largest distance from `φ(ζ₀)` among `samples`
    /// interior points within that distance of `ζ₀`.
    pub fn continuity_probe(
        &self,
        zeta0: &SpherePoint,
        radii: &[f64],
        samples: usize,
        seed: u64,
    ) -> Result<ContinuityReport> {
        let dim = self.dim();
        let target = self.phi.eval(zeta0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::with_capacity(radii.len());
        for &radius in radii {
            let mut pts = Vec::with_capacity(samples);
            while pts.len() < samples {
                let u = mobius::random_ball_point(dim, 1.0 - 1e-9, &mut rng);
                let p = vector::add(zeta0.coords(), &vector::scaled(u.coords(), radius));
                if vector::norm(&p) < 1.0 - 1e-9 {
                    pts.push(p);
                }
            }
            let values = pts
                .par_iter()
                .map(|p| {
                    self.extend_at(p)
                        .map(|v| vector::dist(&v.point, target.coords()))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(ContinuityRow {
                radius,
                sup_distance: values.iter().copied().fold(0.0, f64::max),
                samples,
            });
        }
        let mut sorted: Vec<&ContinuityRow> = rows.iter().collect();
        sorted.sort_by(|a, b| b.radius.total_cmp(&a.radius));
        let shrinking = sorted
            .windows(2)
            .all(|w| w[1].sup_distance <= w[0].sup_distance * (1.0 + 1e-9));
        Ok(ContinuityReport { rows, shrinking })
    }

    /// `Φ` at every point, in parallel; results keep the input order.
    pub fn evaluate_grid(&self, points: &[Vector]) -> Vec<Result<ExtensionValue>> {
        points.par_iter().map(|p| self.extend_at(p)).collect()
    }
}

/// A discretisation of `η_z` pushed forward by `φ`.
///
/// `sources` is a discretisation of `η₀` and the images are
/// `φ(g_z(sourceᵢ))`, so `(z, w) ↦ (0, 0)` recentring needs no further map
/// evaluations.
struct Sample {
    cloud: Cloud,
    sources: Vec<f64>,
    sphere_dim: usize,
}

/// Splits the transport `0 ↦ z` at the hyperbolic midpoint `a`: the nodes
/// are weighted by the kernel of `η_a` and moved by `T = g_z ∘ g_{-b}`,
/// where `b` is the exact barycenter of the weighted nodes. Then
/// `B(T_*ν) = z` holds to rounding, while both the kernel and the
/// integrand vary on the scale of `a` rather than of `z`.
fn sample(phi: &dyn SphereMap, rule: &QuadratureRule, z: &BallPoint) -> Result<Sample> {
    let dim = rule.dim();
    let (sources, masses) = split_sources(rule, z).unwrap_or_else(|| {
        (rule.nodes().flatten().copied().collect(), rule.weights().to_vec())
    });
    let mut points = vec![0.0; sources.len()];
    let mut moved = vector::zeros(dim);
    for (x, out) in sources.chunks_exact(dim).zip(points.chunks_exact_mut(dim)) {
        mobius::gw_into(z.coords(), x, &mut moved);
        let r = vector::norm(&moved);
        moved.iter_mut().for_each(|v| *v /= r);
        phi.eval_into(&moved, out)
            .map_err(|e| Error::MapEval(e.to_string()))?;
    }
    Ok(Sample {
        cloud: Cloud {
            dim,
            points,
            masses,
        },
        sources,
        sphere_dim: rule.sphere_dim(),
    })
}

/// Sources `g_{-b}(ξᵢ)` with normalised masses `wᵢ P_a(ξᵢ)`, or `None`
/// when the weighted nodes are too concentrated to be solved reliably.
fn split_sources(rule: &QuadratureRule, z: &BallPoint) -> Option<(Vec<f64>, Vec<f64>)> {
    let dim = rule.dim();
    let r = z.norm();
    if r == 0.0 {
        return None;
    }
    let a = BallPoint::new(&vector::scaled(z.coords(), (0.5 * r.atanh()).tanh() / r)).ok()?;
    let mut masses: Vec<f64> = rule
        .nodes()
        .zip(rule.weights())
        .map(|(x, w)| w * measure::harmonic_density(&a, x))
        .collect();
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    let nodes: Vec<f64> = rule.nodes().flatten().copied().collect();
    if masses.iter().copied().fold(0.0, f64::max) > MAX_SPLIT_MASS {
        return None;
    }
    let weighted = Cloud {
        dim,
        points: nodes,
        masses,
    };
    let exact = SolverConfig {
        tol: 1e-15,
        max_iters: 100,
        ..SolverConfig::default()
    };
    let b = barycenter::solve_cloud(&weighted, a.coords(), &exact).ok()?.point;
    let mut sources = vec![0.0; weighted.points.len()];
    for (x, out) in weighted
        .points
        .chunks_exact(dim)
        .zip(sources.chunks_exact_mut(dim))
    {
        mobius::g_minus_w_on_sphere(b.coords(), x, out);
    }
    Some((sources, weighted.masses))
}

fn quantise(z: &[f64]) -> Vec<i64> {
    z.iter()
        .map(|v| (v / CACHE_QUANTUM).round() as i64)
        .collect()
}
