//! For f(z) = z^d the extension carries the geodesic disc D_t onto
//! D_{t^d} and commutes with rotations about the vertical axis.
//!
//! ```text
//! cargo run --release --example geodesic_discs
//! ```

use conformal_barycenter::barycenter::SolverConfig;
use conformal_barycenter::complex::zd_structure_check;
use conformal_barycenter::suites::ZD_MIN_LEVEL;
use conformal_barycenter::Result;

fn main() -> Result<()> {
    let cfg = SolverConfig { level: ZD_MIN_LEVEL, ..SolverConfig::default() };
    for d in [2, 3] {
        let report = zd_structure_check(d, &cfg, 11)?;
        for c in &report.checks {
            println!("z^{d}: {:<70} {:.2e} {}", c.property, c.measured, c.status());
        }
    }
    Ok(())
}
