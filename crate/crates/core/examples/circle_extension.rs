//! Barycentric extension of circle maps into the disc: a finite Blaschke
//! product is recovered from its boundary values.
//!
//! ```text
//! cargo run --release --example circle_extension
//! ```

use std::sync::Arc;

use conformal_barycenter::barycenter::SolverConfig;
use conformal_barycenter::complex::{BlaschkeProduct, CircleLift};
use conformal_barycenter::extension::ExtensionEvaluator;
use conformal_barycenter::quadrature::make_rule;
use conformal_barycenter::Result;
use num_complex::Complex64;

fn main() -> Result<()> {
    let f = BlaschkeProduct::new(
        Complex64::new(1.0, 0.0),
        vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.3)],
    )?;
    let solver = SolverConfig { level: 8, ..SolverConfig::default() };
    let ev = ExtensionEvaluator::new(
        Arc::new(CircleLift::new(Arc::new(f.clone()))),
        make_rule(1, solver.level)?,
        solver,
    )?;
    println!("{:>22} {:>34} {:>10}", "z", "extension", "|E - f|");
    for z in [Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.35)] {
        let v = ev.extend_at(&[z.re, z.im])?;
        let e = Complex64::new(v.point[0], v.point[1]);
        println!("{z:>22.3} {e:>34.12} {:>10.2e}", (e - f.eval_disc(z)).norm());
    }
    Ok(())
}
