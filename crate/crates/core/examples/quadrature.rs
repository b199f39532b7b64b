//! Quadrature rules on S¹, S² and S³ and the moments they reproduce.
//!
//! ```text
//! cargo run --release --example quadrature
//! ```

use conformal_barycenter::measure::harmonic_density;
use conformal_barycenter::mobius::BallPoint;
use conformal_barycenter::quadrature::make_rule;
use conformal_barycenter::Result;

fn main() -> Result<()> {
    for (n, level) in [(1, 8), (2, 32), (3, 5)] {
        let rule = make_rule(n, level)?;
        let second = rule.integrate(|x| x[0] * x[0]);
        println!(
            "S^{n} level {level}: {} nodes, integral of x1^2 = {second:.15} (exact {:.15})",
            rule.len(),
            1.0 / (n + 1) as f64
        );
    }

    let w = BallPoint::new(&[0.9, 0.0, 0.0])?;
    for level in [16, 32, 64, 128] {
        let rule = make_rule(2, level)?;
        let mass = rule.integrate(|x| harmonic_density(&w, x));
        println!("harmonic density at |w| = 0.9, level {level}: mass - 1 = {:.3e}", mass - 1.0);
    }
    Ok(())
}
