//! Extension of a Blaschke product lifted to S²: the equatorial disc and
//! the upper half ball are preserved.
//!
//! ```text
//! cargo run --release --example blaschke_lift
//! ```

use conformal_barycenter::barycenter::SolverConfig;
use conformal_barycenter::complex::{disc_grid, hat_evaluator, BlaschkeProduct};
use conformal_barycenter::Result;
use num_complex::Complex64;

fn main() -> Result<()> {
    let f = BlaschkeProduct::new(
        Complex64::new(1.0, 0.0),
        vec![Complex64::new(0.3, 0.0), Complex64::new(0.0, -0.4)],
    )?;
    let ev = hat_evaluator(f, &SolverConfig::default())?;

    let mut flat: f64 = 0.0;
    for p in disc_grid() {
        flat = flat.max(ev.extend_at(&p)?.point[2].abs());
    }
    println!("largest |x3| of the image of the equatorial disc: {flat:.2e}");

    for p in [[0.0, 0.0, 0.5], [0.4, -0.3, 0.2], [-0.7, 0.1, 0.05]] {
        let v = ev.extend_at(&p)?;
        println!("Phi({p:?}) = {:?}", v.point.as_slice());
    }
    Ok(())
}
