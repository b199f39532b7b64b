//! The barycenter field V_μ: values, the Jacobian at the origin and the
//! direction bound for measures with a heavy cap.
//!
//! ```text
//! cargo run --release --example vector_field
//! ```

use conformal_barycenter::barycenter;
use conformal_barycenter::measure::SphereMeasure;
use conformal_barycenter::mobius::{BallPoint, SpherePoint};
use conformal_barycenter::Result;

fn main() -> Result<()> {
    let atoms = vec![
        (SpherePoint::new(&[1.0, 0.0, 0.0])?, 0.45),
        (SpherePoint::new(&[0.95, 0.0975f64.sqrt(), 0.0])?, 0.2),
        (SpherePoint::new(&[-0.6, 0.0, -0.8])?, 0.35),
    ];
    let mu = SphereMeasure::from_atoms(3, atoms)?;

    for w in [[0.0, 0.0, 0.0], [0.3, 0.2, 0.0], [0.5, 0.5, -0.1]] {
        let v = barycenter::field(&mu, &BallPoint::new(&w)?)?;
        println!("V({w:?}) = {:?}", v.vector.as_slice());
    }

    let jac = barycenter::field_jacobian_at_zero(&mu)?;
    let eig = jac.clone().symmetric_eigen().eigenvalues;
    println!("eigenvalues of DV(0): {:?}", eig.as_slice());

    let bound = barycenter::direction_bound_check(&mu, 0.5)?;
    println!("direction bound with delta = 0.5: {bound:?}");
    Ok(())
}
