//! Conformal barycenter of a mixed atomic and smooth measure on S², and
//! its equivariance under a Möbius map.
//!
//! ```text
//! cargo run --release --example barycenter
//! ```

use conformal_barycenter::barycenter::{self, SolverConfig};
use conformal_barycenter::mobius::{BallPoint, MobiusMap, SpherePoint};
use conformal_barycenter::quadrature::make_rule;
use conformal_barycenter::measure::SphereMeasure;
use conformal_barycenter::vector;
use conformal_barycenter::Result;

fn main() -> Result<()> {
    let solver = SolverConfig::default();
    let rule = make_rule(2, solver.level)?;

    let uniform = SphereMeasure::uniform(&rule);
    let b0 = barycenter::barycenter(&uniform, &solver)?;
    println!("uniform measure: |B| = {:.3e}", b0.point.norm());

    let atoms = vec![
        (SpherePoint::new(&[1.0, 0.0, 0.0])?, 0.3),
        (SpherePoint::new(&[0.0, 0.6, 0.8])?, 0.2),
    ];
    let density = rule.nodes().map(|x| (1.5 * x[2]).exp()).collect();
    let mu = SphereMeasure::with_density(&rule, atoms, density)?;
    let b = barycenter::barycenter(&mu, &solver)?;
    println!(
        "mixed measure: B = {:?} (residual {:.1e}, {} Newton steps)",
        b.point.coords(),
        b.residual,
        b.iterations
    );

    let g = MobiusMap::translation(BallPoint::new(&[0.0, -0.4, 0.3])?);
    let moved = barycenter::barycenter(&mu.pushforward(&g), &solver)?;
    let err = vector::dist(moved.point.coords(), &g.apply(b.point.coords()));
    println!("|B(g_* mu) - g(B(mu))| = {err:.2e}");
    Ok(())
}
