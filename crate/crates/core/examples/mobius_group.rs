//! Möbius maps of the ball: composition, inverses, hyperbolic distance and
//! the conformal differential.
//!
//! ```text
//! cargo run --release --example mobius_group
//! ```

use conformal_barycenter::mobius::{hyperbolic_distance, BallPoint, MobiusMap};
use conformal_barycenter::vector;
use conformal_barycenter::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = MobiusMap::random(3, 0.7, true, &mut rng);
    let h = MobiusMap::planar_rotation(3, 0, 1, 0.9).compose(&MobiusMap::reflection(3));

    let x = BallPoint::new(&[0.1, -0.3, 0.2])?;
    let y = BallPoint::new(&[-0.5, 0.1, 0.4])?;
    let gh = g.compose(&h);
    let back = gh.inverse().apply(&gh.apply(x.coords()));
    println!("round trip error: {:.2e}", vector::dist(&back, x.coords()));

    let d0 = hyperbolic_distance(&x, &y);
    let d1 = hyperbolic_distance(&gh.apply_ball(&x)?, &gh.apply_ball(&y)?);
    println!("hyperbolic distance {d0:.12} before, {d1:.12} after");

    let dg = g.differential(&[0.0; 3]);
    let s = dg.singular_values();
    println!("singular values of Dg(0): {:?}", s.as_slice());
    println!("g(0) = {:?}", g.apply(&[0.0; 3]).as_slice());
    Ok(())
}
