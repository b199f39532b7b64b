//! Structural experiments on extensions of lifted Blaschke products.
//!
//! Every experiment returns a [`Report`]. Proven properties become asserted
//! checks. Open conjectures are recorded as residual tables and never fail a
//! report.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{BlaschkeProduct, CircleLift, ComplexMap, HatLift};
use crate::barycenter::SolverConfig;
use crate::chart::{disc_coordinate, ChartPoint};
use crate::error::Result;
use crate::extension::ExtensionEvaluator;
use crate::measure::pushforward_functional;
use crate::mobius::{self, BallPoint, MobiusMap};
use crate::quadrature::make_rule;
use crate::report::{num, vec_cell, Report, Table};
use crate::vector::{self, Vector};

/// Side length of the equatorial disc grid.
pub const DISC_GRID: usize = 21;

/// Radius of the disc points at which `∂Φ/∂x₃` is examined.
const DERIVATIVE_RADIUS: f64 = 0.7;

/// Heights sampled on the axis `[0, e₃)`.
const AXIS_HEIGHTS: [f64; 12] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98];

/// Radii at which `h(r) = |Φ(r)|/r^d` is tabulated.
const PROFILE_RADII: [f64; 11] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98];

/// Largest probe radius for the equivariance checks on `z^d`.
pub const ZD_PROBE_RADIUS: f64 = 0.7;

/// Largest probe radius for inner-function recovery on S¹.
pub const INNER_PROBE_RADIUS: f64 = 0.4;

/// Radius of the wider probe disc whose recovery error is recorded only.
pub const INNER_WIDE_RADIUS: f64 = 0.6;

/// The evaluator of `E(f̂)` on the 3-ball.
pub fn hat_evaluator<M: ComplexMap + 'static>(f: M, cfg: &SolverConfig) -> Result<ExtensionEvaluator> {
    ExtensionEvaluator::new(
        Arc::new(HatLift::new(Arc::new(f))),
        make_rule(2, cfg.level)?,
        *cfg,
    )
}

/// `w(t)` with `g_{w(t)}` mapping the equatorial disc onto `D_t`, the
/// hyperbolic plane bounded by `Ŝ(t·S¹)`.
pub fn geodesic_disc_centre(t: f64) -> [f64; 3] {
    [0.0, 0.0, (1.0 - t) / (1.0 + t)]
}

/// Points of the `DISC_GRID × DISC_GRID` grid on `[-1, 1]²` lying in the
/// closed unit disc, as points of the equatorial plane.
pub fn disc_grid() -> Vec<Vector> {
    let step = 2.0 / (DISC_GRID - 1) as f64;
    let mut out = Vec::new();
    for i in 0..DISC_GRID {
        for j in 0..DISC_GRID {
            let (x, y) = (-1.0 + i as f64 * step, -1.0 + j as f64 * step);
            if x * x + y * y <= 1.0 + 1e-12 {
                out.push(Vector::from_slice(&[x, y, 0.0]));
            }
        }
    }
    out
}

fn eval_all(ev: &ExtensionEvaluator, pts: &[Vector]) -> Result<Vec<Vector>> {
    ev.evaluate_grid(pts)
        .into_iter()
        .map(|r| r.map(|v| v.point))
        .collect()
}

fn c3(z: Complex64) -> Vector {
    Vector::from_slice(&[z.re, z.im, 0.0])
}

/// Upper-hemisphere probes: random points of the ball with `x₃ > 0`.
fn upper_probes(count: usize, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = mobius::random_ball_point(3, 0.9, rng).into_vector();
        if p[2].abs() > 1e-3 {
            out.push(Vector::from_slice(&[p[0], p[1], p[2].abs()]));
        }
    }
    out
}

/// `e₃ · V_μ(w)` for `μ = φ_*η_x`, up to the positive factor `(1-|w|²)/2`.
fn vertical_field(ev: &ExtensionEvaluator, x: &[f64], w: &[f64]) -> Result<f64> {
    let base = BallPoint::new(x)?;
    let v = pushforward_functional(
        &**ev.map(),
        &base,
        1,
        |zeta, out| {
            let mut moved = [0.0; 3];
            mobius::g_minus_w_on_sphere(w, zeta, &mut moved);
            out[0] = moved[2];
        },
        ev.rule(),
    )?;
    Ok(v[0])
}

/// The hemisphere, disc, vertical-derivative and symmetry checks for a
/// Blaschke product, followed by its conjecture scan.
pub fn blaschke_experiment_suite(f: &BlaschkeProduct, cfg: &SolverConfig, seed: u64) -> Result<Report> {
    let ev = hat_evaluator(f.clone(), cfg)?;
    let mut report = Report::new(format!(
        "blaschke structure: sigma={} params={}",
        f.sigma(),
        params_cell(f)
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Hemisphere preservation, by direct evaluation and by the sign of the
    // vertical field component on the equatorial disc.
    let probes = upper_probes(50, &mut rng);
    let images = eval_all(&ev, &probes)?;
    let min_height = images.iter().map(|p| p[2]).fold(f64::INFINITY, f64::min);
    let field_min = probes
        .par_iter()
        .zip(images.par_iter())
        .map(|(x, img)| -> Result<f64> {
            let foot = [img[0], img[1], 0.0];
            let a = vertical_field(&ev, x, &[0.0, 0.0, 0.0])?;
            let b = vertical_field(&ev, x, &foot)?;
            Ok(a.min(b))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    report.above("upper hemisphere maps into upper hemisphere (min x3 of image)", min_height, 0.0);
    report.above("vertical field component positive over the disc (min e3.V)", field_min, 0.0);

    // Equatorial disc invariance.
    let grid = disc_grid();
    let values = eval_all(&ev, &grid)?;
    let disc_height = values.iter().map(|p| p[2].abs()).fold(0.0, f64::max);
    let coverage = values
        .iter()
        .map(|p| vector::norm(&p[..2]))
        .fold(0.0, f64::max);
    report.at_most("equatorial disc maps into the disc (max |x3|)", disc_height, 1e-8);
    report.record("largest image radius on the disc grid", coverage, 1.0);

    // Vertical derivative on the disc.
    let foot: Vec<Vector> = grid
        .iter()
        .step_by(5)
        .filter(|p| vector::norm(p) <= DERIVATIVE_RADIUS)
        .cloned()
        .collect();
    let derivs = foot
        .par_iter()
        .map(|p| {
            let j = ev.extension_jacobian(&BallPoint::new(p)?)?;
            Ok([j[(0, 2)], j[(1, 2)], j[(2, 2)]])
        })
        .collect::<Result<Vec<[f64; 3]>>>()?;
    let off_axis = derivs
        .iter()
        .map(|d| d[0].abs().max(d[1].abs()))
        .fold(0.0, f64::max);
    let vertical = derivs.iter().map(|d| d[2]).fold(f64::INFINITY, f64::min);
    report.at_most("vertical derivative parallel to e3 (max horizontal part)", off_axis, 1e-6);
    report.above("vertical derivative has positive e3 component (min)", vertical, 0.0);
    let mut t = Table::new("vertical derivative", &["z", "dphi_dx3"]);
    for (p, d) in foot.iter().zip(&derivs) {
        t.push(vec![vec_cell(&p[..2]), vec_cell(d)]);
    }
    report.add_table(t);

    // Reflection symmetry c∘Φ = Φ∘c, and conjugation symmetry for real maps.
    let c = MobiusMap::reflection(3);
    let sym_probes: Vec<Vector> = (0..20)
        .map(|_| mobius::random_ball_point(3, 0.8, &mut rng).into_vector())
        .collect();
    let mirrored: Vec<Vector> = sym_probes.iter().map(|p| c.apply(p)).collect();
    let a = eval_all(&ev, &sym_probes)?;
    let b = eval_all(&ev, &mirrored)?;
    let sym = a
        .iter()
        .zip(&b)
        .map(|(x, y)| vector::dist(&c.apply(x), y))
        .fold(0.0, f64::max);
    report.at_most("extension commutes with the reflection c", sym, 1e-8);
    if f.is_real() && f.sigma().re.abs() == 1.0 {
        let plane: Vec<Vector> = sym_probes
            .iter()
            .map(|p| Vector::from_slice(&[p[0], 0.0, p[2]]))
            .collect();
        let v = eval_all(&ev, &plane)?;
        let off = v.iter().map(|p| p[1].abs()).fold(0.0, f64::max);
        report.at_most("real Blaschke product preserves the plane x2 = 0", off, 1e-8);
    }

    report.merge("conjecture scan", conjecture_scan_with(&ev, f)?);
    Ok(report)
}

fn params_cell(f: &BlaschkeProduct) -> String {
    let parts: Vec<String> = f.params().iter().map(|a| format!("{a}")).collect();
    format!("[{}]", parts.join(";"))
}

/// Residuals for the three open conjectures: `Φ = f` on the disc, `Φ(0) = 0`
/// when `f(0) = 0`, and monotone invariance of the axis `[0, e₃)`.
pub fn conjecture_scan(f: &BlaschkeProduct, cfg: &SolverConfig) -> Result<Report> {
    let ev = hat_evaluator(f.clone(), cfg)?;
    let mut report = conjecture_scan_with(&ev, f)?;
    report.title = format!("conjecture scan: sigma={} params={}", f.sigma(), params_cell(f));
    Ok(report)
}

fn conjecture_scan_with(ev: &ExtensionEvaluator, f: &BlaschkeProduct) -> Result<Report> {
    let mut report = Report::new("conjecture scan");
    let grid = disc_grid();
    let values = eval_all(ev, &grid)?;
    let mut table = Table::new("disc residual", &["z", "phi", "f", "residual"]);
    let mut sup: f64 = 0.0;
    for (p, v) in grid.iter().zip(&values) {
        let z = disc_coordinate(p);
        let fz = f.eval_disc(z);
        let r = (disc_coordinate(v) - fz).norm().hypot(v[2]);
        sup = sup.max(r);
        table.push(vec![vec_cell(&p[..2]), vec_cell(v), vec_cell(&[fz.re, fz.im]), num(r)]);
    }
    report.record("conjecture 1 sup residual |phi - f| on the disc grid", sup, 0.0);
    report.add_table(table);

    if !f.fixes_origin() {
        report.add_table(Table::new("axis (not applicable: f(0) != 0)", &["t"]));
        return Ok(report);
    }
    let axis: Vec<Vector> = AXIS_HEIGHTS
        .iter()
        .map(|t| Vector::from_slice(&[0.0, 0.0, *t]))
        .collect();
    let images = eval_all(ev, &axis)?;
    report.record("conjecture 2 |phi(0)|", vector::norm(&images[0]), 0.0);
    let mut table = Table::new("axis", &["t", "phi", "axis_distance", "increment"]);
    let mut worst_axis: f64 = 0.0;
    let mut min_increment = f64::INFINITY;
    for (k, (t, v)) in AXIS_HEIGHTS.iter().zip(&images).enumerate() {
        let d = v[0].hypot(v[1]);
        worst_axis = worst_axis.max(d);
        let inc = if k == 0 { 0.0 } else { v[2] - images[k - 1][2] };
        if k > 0 {
            min_increment = min_increment.min(inc);
        }
        table.push(vec![num(*t), vec_cell(v), num(d), num(inc)]);
    }
    report.record("conjecture 3 largest distance of axis images from the axis", worst_axis, 0.0);
    report.record("conjecture 3 smallest height increment along the axis", min_increment, 0.0);
    report.add_table(table);
    Ok(report)
}

/// The rotational, radial, real-axis and geodesic-disc structure of
/// `E(ẑ^d)`.
pub fn zd_structure_check(d: usize, cfg: &SolverConfig, seed: u64) -> Result<Report> {
    let ev = hat_evaluator(BlaschkeProduct::power(d), cfg)?;
    let df = d as f64;
    let mut report = Report::new(format!("z^{d} structure at level {}", cfg.level));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let origin = ev.extend_at(&[0.0, 0.0, 0.0])?.point;
    report.at_most("origin is fixed", vector::norm(&origin), 1e-9);

    // Radial form Φ(z) = z^d h(|z|²) with h real and positive.
    let radial: Vec<Complex64> = (0..30)
        .map(|k| {
            let r = ZD_PROBE_RADIUS * (k / 10 + 1) as f64 / 3.0;
            Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let pts: Vec<Vector> = radial.iter().map(|z| c3(*z)).collect();
    let vals = eval_all(&ev, &pts)?;
    let mut twist: f64 = 0.0;
    let mut lowest = f64::INFINITY;
    for (z, v) in radial.iter().zip(&vals) {
        let u = z.powu(d as u32).conj() / z.norm().powi(d as i32);
        let q = disc_coordinate(v) * u;
        twist = twist.max(q.im.abs()).max(v[2].abs());
        lowest = lowest.min(q.re);
    }
    report.at_most("radial form: phi(z) conj(z^d)/|z|^d is real", twist, 1e-7);
    report.above("radial form: phi(z) conj(z^d)/|z|^d is positive", lowest, 0.0);

    // h(r) profile.
    let pts: Vec<Vector> = PROFILE_RADII.iter().map(|r| Vector::from_slice(&[*r, 0.0, 0.0])).collect();
    let vals = eval_all(&ev, &pts)?;
    let mut table = Table::new("radial profile", &["r", "h", "one_minus_h"]);
    let gaps: Vec<f64> = PROFILE_RADII
        .iter()
        .zip(&vals)
        .map(|(r, v)| {
            let h = v[0] / r.powi(d as i32);
            table.push(vec![num(*r), num(h), num(1.0 - h)]);
            (1.0 - h).abs()
        })
        .collect();
    report.add_table(table);
    let outer = PROFILE_RADII.iter().position(|r| *r >= 0.5).unwrap_or(0);
    let rises = gaps[outer..]
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    report.at_most("h(r) approaches 1 as r grows (largest rise of |1 - h| for r >= 0.5)", rises, 0.0);

    // Rotational equivariance about the x₃-axis.
    let mut worst: f64 = 0.0;
    let mut probes = Vec::new();
    let mut turned = Vec::new();
    let mut angles = Vec::new();
    for _ in 0..20 {
        let p = mobius::random_ball_point(3, ZD_PROBE_RADIUS, &mut rng).into_vector();
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        turned.push(MobiusMap::planar_rotation(3, 0, 1, theta).apply(&p));
        probes.push(p);
        angles.push(theta);
    }
    let a = eval_all(&ev, &turned)?;
    let b = eval_all(&ev, &probes)?;
    for ((x, y), theta) in a.iter().zip(&b).zip(&angles) {
        let rhs = MobiusMap::planar_rotation(3, 0, 1, df * theta).apply(y);
        worst = worst.max(vector::dist(x, &rhs));
    }
    report.at_most("rotation by theta is carried to rotation by d theta", worst, 1e-8);

    // The real diameter is preserved.
    let line: Vec<Vector> = (-7..=7)
        .map(|k| Vector::from_slice(&[k as f64 * 0.1, 0.0, 0.0]))
        .collect();
    let vals = eval_all(&ev, &line)?;
    let off = vals.iter().map(|v| v[1].abs().max(v[2].abs())).fold(0.0, f64::max);
    report.at_most("real diameter maps into itself", off, 1e-8);

    // Geodesic discs D_t map into D_{t^d}.
    let mut table = Table::new("geodesic discs", &["t", "points", "max_offset"]);
    for t in [0.5, 0.7, 0.9] {
        let w = geodesic_disc_centre(t);
        let wd = geodesic_disc_centre(t.powi(d as i32));
        let mut pts = Vec::new();
        for rho in [0.0, 0.3, 0.6, 0.9, 0.97, 1.0] {
            for k in 0..8 {
                let y = c3(Complex64::from_polar(rho, k as f64 * std::f64::consts::FRAC_PI_4 + 0.1));
                pts.push(mobius::apply_gw(&w, &y)?);
                if rho == 0.0 {
                    break;
                }
            }
        }
        let vals = eval_all(&ev, &pts)?;
        let offset = vals
            .iter()
            .map(|v| mobius::apply_gw(&[-wd[0], -wd[1], -wd[2]], v).map(|u| u[2].abs()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        table.push(vec![num(t), pts.len().to_string(), num(offset)]);
        report.at_most(&format!("geodesic disc D_{t} maps onto D_{:.4}", t.powi(d as i32)), offset, 1e-6);
    }
    report.add_table(table);
    Ok(report)
}

/// `(1/N) Σ f(ζ) ζ/(ζ - z)` over `N` equispaced points of the circle.
pub fn cauchy_reconstruction(f: &dyn ComplexMap, z: Complex64, nodes: usize) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let zeta = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / nodes as f64);
        let fz = f.eval(ChartPoint::Finite(zeta))?.finite().ok_or_else(|| {
            crate::Error::MapEval(format!("{} has a pole on the unit circle", f.describe()))
        })?;
        acc += fz * zeta / (zeta - z);
    }
    Ok(acc / nodes as f64)
}

/// Recovery of an inner function from its boundary values on S¹:
/// `E(f^#)(z) = f(z)` at 30 interior probes, with the boundary data checked
/// independently by Cauchy reconstruction.
pub fn inner_recovery_check(f: Arc<dyn ComplexMap>, cfg: &SolverConfig, seed: u64) -> Result<Report> {
    let rule = make_rule(1, cfg.level)?;
    let nodes = rule.len();
    let ev = ExtensionEvaluator::new(Arc::new(CircleLift::new(f.clone())), rule, *cfg)?;
    let mut report = Report::new(format!("inner recovery: {} at level {}", f.describe(), cfg.level));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = vec![Complex64::new(0.0, 0.0)];
    while probes.len() < 30 {
        let p = mobius::random_ball_point(2, INNER_PROBE_RADIUS, &mut rng);
        probes.push(Complex64::new(p.coords()[0], p.coords()[1]));
    }
    let mut direct = Vec::with_capacity(probes.len());
    for z in &probes {
        direct.push(f.eval(ChartPoint::Finite(*z))?.finite().ok_or_else(|| {
            crate::Error::MapEval(format!("{} has a pole at {z}", f.describe()))
        })?);
    }

    let mut unimodular: f64 = 0.0;
    for k in 0..nodes.min(4096) {
        let zeta = Complex64::from_polar(1.0, std::f64::consts::TAU * (k as f64 + 0.5) / nodes.min(4096) as f64);
        let v = f.eval(ChartPoint::Finite(zeta))?;
        unimodular = unimodular.max(v.finite().map_or(f64::INFINITY, |v| (v.norm() - 1.0).abs()));
    }
    report.at_most("boundary values are unimodular", unimodular, 1e-12);

    let cauchy = probes
        .iter()
        .zip(&direct)
        .map(|(z, fz)| cauchy_reconstruction(&*f, *z, nodes).map(|c| (c - fz).norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.at_most("Cauchy reconstruction from boundary samples matches f", cauchy, 1e-9);

    let pts: Vec<Vector> = probes.iter().map(|z| Vector::from_slice(&[z.re, z.im])).collect();
    let vals = eval_all(&ev, &pts)?;
    let mut table = Table::new("recovery", &["z", "extension", "f", "residual"]);
    let mut sup: f64 = 0.0;
    for ((z, v), fz) in probes.iter().zip(&vals).zip(&direct) {
        let r = (Complex64::new(v[0], v[1]) - fz).norm();
        sup = sup.max(r);
        table.push(vec![vec_cell(&[z.re, z.im]), vec_cell(v), vec_cell(&[fz.re, fz.im]), num(r)]);
    }
    report.at_most("extension of the boundary map recovers f inside the disc", sup, 1e-7);
    report.add_table(table);

    let mut wide = Vec::with_capacity(30);
    while wide.len() < 30 {
        let p = mobius::random_ball_point(2, INNER_WIDE_RADIUS, &mut rng);
        wide.push(Complex64::new(p.coords()[0], p.coords()[1]));
    }
    let pts: Vec<Vector> = wide.iter().map(|z| Vector::from_slice(&[z.re, z.im])).collect();
    let mut wide_sup: f64 = 0.0;
    for (z, v) in wide.iter().zip(eval_all(&ev, &pts)?) {
        let fz = f.eval(ChartPoint::Finite(*z))?.finite().unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        wide_sup = wide_sup.max((Complex64::new(v[0], v[1]) - fz).norm());
    }
    report.record("recovery error on the wider probe disc", wide_sup, 1e-7);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::RationalMap;

    fn cfg(level: usize) -> SolverConfig {
        SolverConfig {
            level,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn geodesic_disc_centre_maps_equator_to_the_scaled_circle() {
        let t: f64 = 0.6;
        let w = geodesic_disc_centre(t);
        for k in 0..12 {
            let th = k as f64 * 0.5;
            let p = mobius::apply_gw(&w, &[th.cos(), th.sin(), 0.0]).unwrap();
            let target = crate::chart::stereo_lift(ChartPoint::Finite(Complex64::from_polar(t, th)));
            assert!(vector::dist(&p, target.coords()) < 1e-14);
        }
    }

    #[test]
    fn disc_grid_has_expected_size() {
        let g = disc_grid();
        assert!(g.iter().all(|p| vector::norm(p) <= 1.0 + 1e-12));
        assert!(g.iter().any(|p| p[0] == 1.0));
        assert_eq!(g.len(), 317);
    }

    #[test]
    fn cauchy_oracle_reproduces_a_blaschke_product() {
        let f = BlaschkeProduct::new(Complex64::new(1.0, 0.0), vec![Complex64::new(0.5, 0.2)]).unwrap();
        let z = Complex64::new(0.3, -0.4);
        let c = cauchy_reconstruction(&f, z, 256).unwrap();
        assert!((c - f.eval_disc(z)).norm() < 1e-12);
    }

    #[test]
    fn identity_conjecture_scan_is_exact() {
        let r = conjecture_scan(&BlaschkeProduct::power(1), &cfg(16)).unwrap();
        let spacing = AXIS_HEIGHTS.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        for c in &r.checks {
            let expected = if c.property.contains("increment") { spacing } else { 0.0 };
            assert!((c.measured - expected).abs() < 1e-9, "{}: {}", c.property, c.measured);
        }
    }

    #[test]
    fn inner_recovery_of_the_cube() {
        let f: Arc<dyn ComplexMap> = Arc::new(RationalMap::power(3).unwrap());
        let r = inner_recovery_check(f, &cfg(8), 7).unwrap();
        assert!(r.passed(), "{}", r.render());
    }
}
