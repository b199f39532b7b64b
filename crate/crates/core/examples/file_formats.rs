//! Measure and map files, grid specs and OFF export.
//!
//! ```text
//! cargo run --release --example file_formats
//! ```

use conformal_barycenter::barycenter::{self, SolverConfig};
use conformal_barycenter::extension::ExtensionEvaluator;
use conformal_barycenter::formats::{parse_grid, parse_map, parse_measure, write_off};
use conformal_barycenter::quadrature::make_rule;
use conformal_barycenter::Result;

const MEASURE: &str = "\
# two atoms and a smooth remainder
dimension: 2
atoms: [[0, 0, 1], 0.3] [[1, 0, 0], 0.1]
density_expr: 1 + x2^2
";

const MAP: &str = "blaschke: sigma=1, zeros=[0, 0.5]";

fn main() -> Result<()> {
    let solver = SolverConfig::default();
    let rule = make_rule(2, solver.level)?;
    let mu = parse_measure(MEASURE)?.build(&rule)?;
    let b = barycenter::barycenter(&mu, &solver)?;
    println!("barycenter of the file measure: {:?}", b.point.coords());

    match parse_measure("dimension: 2\natoms: [[0, 0, 2], 1]") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let phi = parse_map(MAP)?.sphere_map(3)?;
    let ev = ExtensionEvaluator::new(phi, rule, solver)?;
    let grid = parse_grid("shell:0.6:4", 3)?;
    let images = ev
        .evaluate_grid(&grid.points)
        .into_iter()
        .map(|v| v.map(|v| v.point))
        .collect::<Result<Vec<_>>>()?;
    let off = write_off(&images, &grid.faces);
    println!("{}", off.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}
