//! Named property suites: randomized, seeded checks that produce
//! [`Report`]s. The command-line `check` command runs these by name.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::barycenter::{self, SolverConfig};
use crate::complex::{
    blaschke_experiment_suite, conjecture_scan, inner_recovery_check, zd_structure_check,
    BlaschkeProduct, ComplexMap, HatLift,
};
use crate::error::{Error, Result};
use crate::extension::ExtensionEvaluator;
use crate::measure::SphereMeasure;
use crate::mobius::{self, BallPoint, MobiusMap, SpherePoint};
use crate::quadrature::{make_rule, QuadratureRule};
use crate::report::{num, vec_cell, Report, Table};
use crate::sphere_map::{Conjugated, HalfSphereFold, IdentityMap, SphereMap};
use crate::vector::{self, Vector};

/// Level used for `z^d` structure checks unless a higher one is requested.
pub const ZD_MIN_LEVEL: usize = 96;

/// Default circle rule level for inner-function recovery.
pub const INNER_LEVEL: usize = 8;

/// Sphere rule level for the extension naturality check. The conjugated
/// boundary map concentrates its pushforward, so it needs a finer rule than
/// the other sphere checks.
pub const NATURALITY_EXTENSION_LEVEL: usize = 128;

/// Settings shared by all suites.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SuiteConfig {
    /// Solver settings; `solver.level` is ignored in favour of `level`.
    pub solver: SolverConfig,
    /// Rule level override. Each suite has its own default.
    pub level: Option<usize>,
    pub seed: u64,
}

impl SuiteConfig {
    fn solver_at(&self, default_level: usize) -> SolverConfig {
        SolverConfig {
            level: self.level.unwrap_or(default_level),
            ..self.solver
        }
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Naturality,
    Barycenter,
    Extension,
    Blaschke,
    Inner,
    Jacobian,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Naturality,
        Suite::Barycenter,
        Suite::Extension,
        Suite::Blaschke,
        Suite::Inner,
        Suite::Jacobian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Naturality => "naturality",
            Suite::Barycenter => "barycenter",
            Suite::Extension => "extension",
            Suite::Blaschke => "blaschke",
            Suite::Inner => "inner",
            Suite::Jacobian => "jacobian",
        }
    }

    pub fn run(self, cfg: &SuiteConfig) -> Result<Report> {
        match self {
            Suite::Naturality => naturality_suite(cfg),
            Suite::Barycenter => barycenter_suite(cfg),
            Suite::Extension => extension_suite(cfg),
            Suite::Blaschke => blaschke_suite(cfg),
            Suite::Inner => inner_suite(cfg),
            Suite::Jacobian => jacobian_suite(cfg),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::InvalidArgument(format!("unknown suite '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// A random admissible measure mixing up to four atoms with a smooth
/// positive density `exp(<a, x>)` sampled on `rule`.
pub fn random_mixed_measure<R: Rng + ?Sized>(rule: &QuadratureRule, rng: &mut R) -> SphereMeasure {
    let dim = rule.dim();
    loop {
        let count = rng.random_range(0..=4usize);
        let atom_mass = if count == 0 { 0.0 } else { rng.random_range(0.05..0.7) };
        let raw: Vec<f64> = (0..count).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = raw.iter().sum();
        let masses: Vec<f64> = raw.iter().map(|m| atom_mass * m / total).collect();
        if masses.iter().any(|m| *m >= 0.45 || *m < 1e-3) {
            continue;
        }
        let atoms = masses
            .into_iter()
            .map(|m| (mobius::random_sphere_point(dim, rng), m))
            .collect();
        let a = mobius::random_ball_point(dim, 1.5, rng);
        let density = rule.nodes().map(|x| vector::dot(a.coords(), x).exp()).collect();
        return SphereMeasure::with_density(rule, atoms, density).expect("valid mixed measure");
    }
}

/// A random purely atomic measure satisfying the hypothesis of the
/// direction bound for the chordal cap of radius `delta` around `e₁`.
pub fn random_direction_measure<R: Rng + ?Sized>(dim: usize, delta: f64, rng: &mut R) -> SphereMeasure {
    let threshold = (1.0 + 0.5 * delta * delta) / 2.0;
    let cos_bound = 1.0 - 0.5 * delta * delta;
    let cap_mass = rng.random_range(threshold..=1.0f64.min(threshold + 0.2));
    let inside = rng.random_range(3..=8usize);
    let outside = rng.random_range(1..=6usize);
    let mut atoms = Vec::new();
    // Cap atoms are redrawn until each stays below 0.45. The outside mass is
    // below 1/2 in total, so any split of it is admissible.
    let split = |n: usize, total: f64, rng: &mut R| -> Vec<f64> {
        loop {
            let raw: Vec<f64> = (0..n).map(|_| 0.2 + rng.random::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            let masses: Vec<f64> = raw.into_iter().map(|m| total * m / s).collect();
            if total < 0.5 || masses.iter().all(|m| *m < 0.45) {
                return masses;
            }
        }
    };
    for m in split(inside, cap_mass, rng) {
        // Uniform in the cap by rejection.
        let p = loop {
            let p = mobius::random_sphere_point(dim, rng);
            if p.coords()[0] >= cos_bound + 1e-12 {
                break p;
            }
        };
        atoms.push((p, m));
    }
    if cap_mass < 1.0 {
        for m in split(outside, 1.0 - cap_mass, rng) {
            atoms.push((mobius::random_sphere_point(dim, rng), m));
        }
    }
    SphereMeasure::from_atoms(dim, atoms).expect("valid direction measure")
}

fn e1_cap_radius<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.05..1.4)
}

fn spread(points: &[Vector]) -> f64 {
    let mut worst: f64 = 0.0;
    for a in points {
        for b in points {
            worst = worst.max(vector::dist(a, b));
        }
    }
    worst
}

/// Largest eigenvalue of the field Jacobian at the recentred zero.
pub fn recentred_top_eigenvalue(mu: &SphereMeasure, b: &BallPoint) -> Result<f64> {
    let moved = mu.pushforward(&MobiusMap::translation(b.negated()));
    let jac = barycenter::field_jacobian_at_zero(&moved)?;
    let sym = (&jac + jac.transpose()) * 0.5;
    Ok(sym.symmetric_eigenvalues().max())
}

/// Barycenter of the uniform measure, harmonic recovery, multistart
/// uniqueness, stability of the zero and the direction bound.
pub fn barycenter_suite(cfg: &SuiteConfig) -> Result<Report> {
    let solver = cfg.solver_at(32);
    let mut report = Report::new("barycenter");

    let circle = SphereMeasure::uniform(&make_rule(1, 8)?);
    let b1 = barycenter::barycenter(&circle, &solver)?;
    report.at_most("uniform measure on S1 has barycenter 0 (level 8)", b1.point.norm(), 1e-12);
    let rule = make_rule(2, solver.level)?;
    let eta = SphereMeasure::uniform(&rule);
    let b2 = barycenter::barycenter(&eta, &solver)?;
    report.at_most(
        &format!("uniform measure on S2 has barycenter 0 (level {})", solver.level),
        b2.point.norm(),
        1e-12,
    );

    let mut rng = cfg.rng(1);
    let centres: Vec<BallPoint> = (0..20)
        .map(|_| mobius::random_ball_point(3, 0.9, &mut rng))
        .collect();
    let errors = centres
        .par_iter()
        .map(|w| {
            let mu = eta.pushforward(&MobiusMap::translation(w.clone()));
            barycenter::barycenter(&mu, &solver).map(|b| vector::dist(b.point.coords(), w.coords()))
        })
        .collect::<Result<Vec<f64>>>()?;
    report.at_most(
        "harmonic measure of w has barycenter w (20 centres, |w| <= 0.9)",
        errors.iter().copied().fold(0.0, f64::max),
        1e-9,
    );

    let small = make_rule(2, 12)?;
    let mut table = Table::new("multistart", &["measure", "barycenter", "spread", "top_eigenvalue"]);
    let mut worst_spread: f64 = 0.0;
    let mut top = f64::NEG_INFINITY;
    for k in 0..10 {
        let mu = random_mixed_measure(&small, &mut rng);
        let starts: Vec<BallPoint> = (0..10)
            .map(|_| mobius::random_ball_point(3, 0.9, &mut rng))
            .collect();
        let found = starts
            .par_iter()
            .map(|s| barycenter::barycenter_from(&mu, s, &solver).map(|b| b.point.into_vector()))
            .collect::<Result<Vec<Vector>>>()?;
        let s = spread(&found);
        let b = BallPoint::new(&found[0])?;
        let eig = recentred_top_eigenvalue(&mu, &b)?;
        worst_spread = worst_spread.max(s);
        top = top.max(eig);
        table.push(vec![k.to_string(), vec_cell(&found[0]), num(s), num(eig)]);
    }
    report.at_most("ten starting points reach the same zero", worst_spread, 1e-8);
    report.at_most("field Jacobian at the recentred zero is negative definite (largest eigenvalue)", top, 0.0);
    report.add_table(table);

    let mut worst = f64::INFINITY;
    let mut hypothesis = true;
    for _ in 0..1000 {
        let delta = e1_cap_radius(&mut rng);
        let mu = random_direction_measure(3, delta, &mut rng);
        let d = barycenter::direction_bound_check(&mu, delta)?;
        hypothesis &= d.hypothesis;
        worst = worst.min(d.inner_product);
    }
    report.above(
        "cap mass above (1 + delta^2/2)/2 forces <V(0), e1> > 0 (smallest inner product, 1000 measures)",
        if hypothesis { worst } else { f64::NEG_INFINITY },
        0.0,
    );
    Ok(report)
}

/// Naturality of the barycenter and of the extension under Möbius maps.
pub fn naturality_suite(cfg: &SuiteConfig) -> Result<Report> {
    let solver = cfg.solver_at(16);
    let mut report = Report::new("naturality");
    let rule = make_rule(2, solver.level)?;
    let mut rng = cfg.rng(2);
    let cases: Vec<(SphereMeasure, MobiusMap)> = (0..50)
        .map(|_| {
            let mu = random_mixed_measure(&rule, &mut rng);
            (mu, MobiusMap::random(3, 0.8, false, &mut rng))
        })
        .collect();
    let errors = cases
        .par_iter()
        .map(|(mu, g)| -> Result<f64> {
            let before = barycenter::barycenter(mu, &solver)?;
            let after = barycenter::barycenter(&mu.pushforward(g), &solver)?;
            Ok(vector::dist(after.point.coords(), &g.apply(before.point.coords())))
        })
        .collect::<Result<Vec<f64>>>()?;
    report.at_most(
        "barycenter commutes with Mobius maps (50 mixed measures)",
        errors.iter().copied().fold(0.0, f64::max),
        1e-8,
    );

    let ext_solver = cfg.solver_at(NATURALITY_EXTENSION_LEVEL);
    let ext_rule = make_rule(2, ext_solver.level)?;
    let phi: Arc<dyn SphereMap> = Arc::new(HatLift::new(Arc::new(BlaschkeProduct::power(2))));
    let base = ExtensionEvaluator::new(phi.clone(), ext_rule.clone(), ext_solver)?;
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let g = MobiusMap::random(3, 0.5, false, &mut rng);
        let h = MobiusMap::random(3, 0.5, false, &mut rng);
        let conj: Arc<dyn SphereMap> = Arc::new(Conjugated {
            post: g.clone(),
            inner: phi.clone(),
            pre: h.inverse(),
        });
        let moved = ExtensionEvaluator::new(conj, ext_rule.clone(), ext_solver)?;
        let probes: Vec<Vector> = (0..10)
            .map(|_| mobius::random_ball_point(3, 0.5, &mut rng).into_vector())
            .collect();
        let errs = probes
            .par_iter()
            .map(|z| -> Result<f64> {
                let lhs = moved.extend_at(z)?.point;
                let inner = base.extend_at(&h.inverse().apply(z))?.point;
                Ok(vector::dist(&lhs, &g.apply(&inner)))
            })
            .collect::<Result<Vec<f64>>>()?;
        worst = errs.into_iter().fold(worst, f64::max);
    }
    report.at_most("extension satisfies E(g phi h^-1) = g E(phi) h^-1 (z^2 lift)", worst, 1e-7);
    Ok(report)
}

/// Identity and Poincaré recovery, interior mapping, resolution
/// robustness and boundary continuity.
pub fn extension_suite(cfg: &SuiteConfig) -> Result<Report> {
    let solver = cfg.solver_at(32);
    let rule = make_rule(2, solver.level)?;
    let mut report = Report::new("extension");
    let mut rng = cfg.rng(3);

    let id = ExtensionEvaluator::new(Arc::new(IdentityMap { dim: 3 }), rule.clone(), solver)?;
    let probes: Vec<Vector> = (0..20)
        .map(|_| mobius::random_ball_point(3, 0.95, &mut rng).into_vector())
        .collect();
    let worst = id
        .evaluate_grid(&probes)
        .into_iter()
        .zip(&probes)
        .map(|(v, p)| v.map(|v| vector::dist(&v.point, p)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.at_most("identity extends to the identity (20 points)", worst, 1e-9);

    let mut worst: f64 = 0.0;
    let mut radius: f64 = 0.0;
    for _ in 0..10 {
        let g = MobiusMap::random(3, 0.8, false, &mut rng);
        let ev = ExtensionEvaluator::new(Arc::new(g.clone()), rule.clone(), solver)?;
        let pts: Vec<Vector> = (0..100)
            .map(|_| mobius::random_ball_point(3, 0.95, &mut rng).into_vector())
            .collect();
        for (v, p) in ev.evaluate_grid(&pts).into_iter().zip(&pts) {
            let v = v?.point;
            radius = radius.max(vector::norm(&v));
            worst = worst.max(vector::dist(&v, &g.apply(p)));
        }
    }
    report.at_most("Mobius boundary maps extend to their Poincare extension (10 maps, 100 points)", worst, 1e-8);
    report.at_most("extension values lie in the open ball (largest norm)", radius, 1.0 - 1e-15);

    let square: Arc<dyn SphereMap> = Arc::new(HatLift::new(Arc::new(BlaschkeProduct::power(2))));
    let coarse = ExtensionEvaluator::new(square.clone(), rule.clone(), solver)?;
    let fine = ExtensionEvaluator::new(square.clone(), make_rule(2, 2 * solver.level)?, solver)?;
    let pts: Vec<Vector> = (0..10)
        .map(|_| mobius::random_ball_point(3, 0.5, &mut rng).into_vector())
        .collect();
    let a = coarse.evaluate_grid(&pts);
    let b = fine.evaluate_grid(&pts);
    let mut change: f64 = 0.0;
    for (x, y) in a.into_iter().zip(b) {
        change = change.max(vector::dist(&x?.point, &y?.point));
    }
    report.at_most("doubling the rule level moves the z^2 extension by at most 1e-8", change, 1e-8);

    let radii = [0.4, 0.2, 0.1, 0.05, 0.025];
    let mut table = Table::new("continuity", &["map", "radius", "sup_distance"]);
    let probe = id.continuity_probe(&SpherePoint::basis(3, 0), &radii, 8, cfg.seed)?;
    let linear = probe
        .rows
        .iter()
        .map(|r| r.sup_distance / r.radius)
        .fold(0.0, f64::max);
    for r in &probe.rows {
        table.push(vec!["identity".into(), num(r.radius), num(r.sup_distance)]);
    }
    report.at_most("identity: sup distance shrinks linearly with the radius", linear, 1.0 + 1e-9);
    let sq = coarse.continuity_probe(&SpherePoint::basis(3, 0), &radii, 8, cfg.seed)?;
    for r in &sq.rows {
        table.push(vec!["z^2".into(), num(r.radius), num(r.sup_distance)]);
    }
    let last = sq.rows.last().map_or(0.0, |r| r.sup_distance);
    report.at_most("z^2: sup distance decreases as the radius shrinks", if sq.shrinking { 0.0 } else { 1.0 }, 0.0);
    report.record("z^2: sup distance at the smallest radius", last, 0.0);
    let fold = ExtensionEvaluator::new(Arc::new(HalfSphereFold { dim: 3 }), rule, solver)?;
    let jump = fold.continuity_probe(&SpherePoint::basis(3, 1), &radii, 8, cfg.seed)?;
    for r in &jump.rows {
        table.push(vec!["half-sphere fold".into(), num(r.radius), num(r.sup_distance)]);
    }
    report.record(
        "half-sphere fold at a jump: sup distance at the smallest radius",
        jump.rows.last().map_or(0.0, |r| r.sup_distance),
        0.0,
    );
    report.add_table(table);
    Ok(report)
}

/// The Blaschke products used by the structure and conjecture suites.
pub fn reference_blaschke_products() -> Vec<BlaschkeProduct> {
    let c = Complex64::new;
    let list = [
        (c(1.0, 0.0), vec![c(0.3, 0.0), c(0.0, -0.4)]),
        (c(1.0, 0.0), vec![c(0.0, 0.0), c(0.5, 0.0)]),
        (c(0.0, 1.0), vec![c(0.6, 0.0), c(-0.3, 0.2)]),
        (Complex64::from_polar(1.0, 0.7), vec![c(0.2, 0.3), c(-0.5, 0.0), c(0.0, 0.1)]),
        (c(-1.0, 0.0), vec![c(0.0, 0.0), c(0.0, 0.4), c(-0.6, 0.0)]),
    ];
    list.into_iter()
        .map(|(s, a)| BlaschkeProduct::new(s, a).expect("reference product"))
        .collect()
}

/// Structure checks for the reference Blaschke products and for `z^2`,
/// `z^3`.
pub fn blaschke_suite(cfg: &SuiteConfig) -> Result<Report> {
    let solver = cfg.solver_at(32);
    let mut report = Report::new("blaschke");
    for (k, f) in reference_blaschke_products().iter().enumerate() {
        let r = blaschke_experiment_suite(f, &solver, cfg.seed.wrapping_add(k as u64))?;
        report.merge(&format!("product {}", k + 1), r);
    }
    let zd = SolverConfig {
        level: solver.level.max(ZD_MIN_LEVEL),
        ..solver
    };
    for d in [2, 3] {
        let r = zd_structure_check(d, &zd, cfg.seed)?;
        report.merge(&format!("z^{d}"), r);
    }
    Ok(report)
}

/// Conjecture residual tables for the reference Blaschke products.
pub fn conjecture_suite(cfg: &SuiteConfig) -> Result<Report> {
    let solver = cfg.solver_at(32);
    let mut report = Report::new("conjectures");
    for (k, f) in reference_blaschke_products().iter().enumerate() {
        report.merge(&format!("product {}", k + 1), conjecture_scan(f, &solver)?);
    }
    Ok(report)
}

/// The inner functions used by the recovery suite: `z²`, `z³`, the
/// Blaschke product with parameters `{0.5, 0.5}` and
/// `z(z - 0.8)/(1 - 0.8z)`.
pub fn reference_inner_functions() -> Vec<(String, Arc<dyn ComplexMap>)> {
    let c = Complex64::new;
    let one = c(1.0, 0.0);
    vec![
        ("z^2".into(), Arc::new(BlaschkeProduct::power(2))),
        ("z^3".into(), Arc::new(BlaschkeProduct::power(3))),
        (
            "params {0.5, 0.5}".into(),
            Arc::new(BlaschkeProduct::new(one, vec![c(0.5, 0.0), c(0.5, 0.0)]).expect("valid")),
        ),
        (
            "z(z-0.8)/(1-0.8z)".into(),
            Arc::new(BlaschkeProduct::new(one, vec![c(0.0, 0.0), c(-0.8, 0.0)]).expect("valid")),
        ),
    ]
}

/// Recovery of inner functions from their boundary values on S¹.
pub fn inner_suite(cfg: &SuiteConfig) -> Result<Report> {
    let solver = cfg.solver_at(INNER_LEVEL);
    let mut report = Report::new(format!("inner recovery at level {}", solver.level));
    for (name, f) in reference_inner_functions() {
        report.merge(&name, inner_recovery_check(f, &solver, cfg.seed)?);
    }
    Ok(report)
}

/// A boundary map for the Jacobian suite, chosen by index.
fn jacobian_case<R: Rng + ?Sized>(k: usize, rng: &mut R) -> (String, Arc<dyn SphereMap>) {
    let square: Arc<dyn SphereMap> = Arc::new(HatLift::new(Arc::new(BlaschkeProduct::power(2))));
    match k % 4 {
        0 => ("mobius".into(), Arc::new(MobiusMap::random(3, 0.6, false, rng))),
        1 => ("z^2".into(), square),
        2 => {
            let f = BlaschkeProduct::new(
                Complex64::new(1.0, 0.0),
                vec![Complex64::new(0.3, 0.0), Complex64::new(0.0, -0.4)],
            )
            .expect("valid");
            ("blaschke".into(), Arc::new(HatLift::new(Arc::new(f))))
        }
        _ => {
            let g = MobiusMap::random(3, 0.4, false, rng);
            let h = MobiusMap::random(3, 0.4, false, rng);
            (
                "conjugated z^2".into(),
                Arc::new(Conjugated {
                    post: g,
                    inner: square,
                    pre: h,
                }),
            )
        }
    }
}

fn relative_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1e-300)
}

/// Implicit-function Jacobian of the extension against finite differences
/// and against exact cases.
pub fn jacobian_suite(cfg: &SuiteConfig) -> Result<Report> {
    let solver = cfg.solver_at(32);
    let rule = make_rule(2, solver.level)?;
    let mut report = Report::new("jacobian");
    let mut rng = cfg.rng(4);

    let id = ExtensionEvaluator::new(Arc::new(IdentityMap { dim: 3 }), rule.clone(), solver)?;
    let o = BallPoint::origin(3);
    let sys = id.implicit_system(&o, &o)?;
    let eye = DMatrix::<f64>::identity(3, 3);
    report.at_most(
        "identity at the origin: Jw = -(4/3) I",
        (&sys.jw + &eye * (4.0 / 3.0)).amax(),
        1e-12,
    );
    report.at_most(
        "identity at the origin: Jz = (4/3) I",
        (&sys.jz - &eye * (4.0 / 3.0)).amax(),
        1e-12,
    );
    let mut calib: f64 = 0.0;
    for _ in 0..5 {
        let z = mobius::random_ball_point(3, 0.8, &mut rng);
        calib = calib.max((id.extension_jacobian(&z)? - &eye).amax());
    }
    report.at_most("identity calibration: Jacobian of the extension is I", calib, 1e-8);

    let g = MobiusMap::random(3, 0.6, false, &mut rng);
    let ev = ExtensionEvaluator::new(Arc::new(g.clone()), rule.clone(), solver)?;
    let err = (ev.extension_jacobian(&o)? - g.differential(o.coords())).amax();
    report.at_most("Mobius boundary map: Jacobian at 0 equals the differential", err, 1e-8);

    let cases: Vec<(String, Arc<dyn SphereMap>, BallPoint)> = (0..30)
        .map(|k| {
            let (name, phi) = jacobian_case(k, &mut rng);
            (name, phi, mobius::random_ball_point(3, 0.6, &mut rng))
        })
        .collect();
    let rows = cases
        .par_iter()
        .map(|(name, phi, z)| -> Result<(String, f64, f64)> {
            let ev = ExtensionEvaluator::new(phi.clone(), rule.clone(), solver)?;
            let analytic = ev.extension_jacobian(z)?;
            let fd = ev.finite_difference_jacobian(z, 1e-5)?;
            let w = BallPoint::new(&ev.extend_at(z.coords())?.point)?;
            let jw = ev.implicit_system(z, &w)?.jw;
            let sym = (&jw + jw.transpose()) * 0.5;
            Ok((name.clone(), relative_error(&analytic, &fd), sym.symmetric_eigenvalues().max()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("finite differences", &["map", "z", "relative_error", "jw_top_eigenvalue"]);
    for ((name, rel, top), (_, _, z)) in rows.iter().zip(&cases) {
        table.push(vec![name.clone(), vec_cell(z.coords()), num(*rel), num(*top)]);
    }
    report.at_most(
        "analytic Jacobian matches central differences (30 cases, relative)",
        rows.iter().map(|r| r.1).fold(0.0, f64::max),
        1e-4,
    );
    report.at_most(
        "Jw is negative definite at solved points (largest eigenvalue)",
        rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max),
        0.0,
    );
    report.add_table(table);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn random_measures_are_admissible() {
        let rule = make_rule(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mu = random_mixed_measure(&rule, &mut rng);
            assert!(mu.largest_atom() < 0.45);
            assert!((mu.total_mass() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn direction_measures_meet_the_hypothesis() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..2000 {
            let delta = e1_cap_radius(&mut rng);
            let mu = random_direction_measure(3, delta, &mut rng);
            assert!(barycenter::direction_bound_check(&mu, delta).unwrap().hypothesis);
            assert!(mu.largest_atom() < 0.5);
        }
    }
}
