//! The Jacobian of the extension from the implicit function theorem,
//! compared with central differences.
//!
//! ```text
//! cargo run --release --example extension_jacobian
//! ```

use conformal_barycenter::barycenter::SolverConfig;
use conformal_barycenter::complex::{hat_evaluator, BlaschkeProduct};
use conformal_barycenter::mobius::BallPoint;
use conformal_barycenter::Result;

fn main() -> Result<()> {
    let ev = hat_evaluator(BlaschkeProduct::power(2), &SolverConfig::default())?;
    for p in [[0.2, 0.1, -0.3], [0.0, 0.4, 0.4]] {
        let z = BallPoint::new(&p)?;
        let analytic = ev.extension_jacobian(&z)?;
        let numeric = ev.finite_difference_jacobian(&z, 1e-5)?;
        let rel = (&analytic - &numeric).norm() / numeric.norm();
        println!("z = {p:?}: relative difference {rel:.2e}");
        println!("{analytic:.6}");
    }
    Ok(())
}
