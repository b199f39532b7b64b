//! Residual tables for the open questions about Blaschke products: how far
//! the extension is from f on the disc, whether it fixes the origin and
//! whether it moves the vertical axis.
//!
//! ```text
//! cargo run --release --example conjecture_scan
//! ```

use conformal_barycenter::barycenter::SolverConfig;
use conformal_barycenter::complex::{conjecture_scan, BlaschkeProduct};
use conformal_barycenter::Result;
use num_complex::Complex64;

fn main() -> Result<()> {
    let f = BlaschkeProduct::new(
        Complex64::new(1.0, 0.0),
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
    )?;
    let report = conjecture_scan(&f, &SolverConfig::default())?;
    for c in &report.checks {
        println!("{:<80} {:.4e}", c.property, c.measured);
    }
    for t in report.tables.iter().filter(|t| t.name.contains("axis")) {
        println!("[{}]\n{}", t.name, t.header.join(","));
        for row in &t.rows {
            println!("{}", row.join(","));
        }
    }
    Ok(())
}
