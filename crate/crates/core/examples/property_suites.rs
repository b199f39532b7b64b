//! Runs every property suite and prints its summary line.
//!
//! ```text
//! cargo run --release --example property_suites
//! ```

use conformal_barycenter::suites::{Suite, SuiteConfig};
use conformal_barycenter::Result;

fn main() -> Result<()> {
    let cfg = SuiteConfig::default();
    for suite in Suite::ALL {
        let report = suite.run(&cfg)?;
        let failed: Vec<_> = report.failures().map(|c| c.property.as_str()).collect();
        println!(
            "{suite:<11} {} checks, {}",
            report.checks.len(),
            if failed.is_empty() { "all pass".to_string() } else { format!("failed: {}", failed.join("; ")) }
        );
    }
    Ok(())
}
