//! `cbary`: conformal barycenters, barycentric extensions and property
//! suites from the command line.
//!
//! Settings resolve in the order flag, `CBARY_*` environment variable,
//! `--config` TOML file, built-in default.
//!
//! Exit codes: 0 success, 1 input or parse error, 2 inadmissible measure,
//! 3 solver did not converge, 4 a property check failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use conformal_barycenter::barycenter::{self, SolverConfig};
use conformal_barycenter::complex;
use conformal_barycenter::extension::ExtensionEvaluator;
use conformal_barycenter::formats::{self, Grid, MapSpec};
use conformal_barycenter::mobius::BallPoint;
use conformal_barycenter::quadrature::make_rule;
use conformal_barycenter::report::{num, vec_cell, Report, Table};
use conformal_barycenter::suites::{Suite, SuiteConfig};
use conformal_barycenter::vector::Vector;
use conformal_barycenter::Error;

#[derive(Debug, Parser)]
#[command(name = "cbary", version, about = "Conformal barycenters and barycentric extensions of sphere maps")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Sphere dimension n for maps, points and grids (S^n in R^{n+1}).
    #[arg(long, global = true, env = "CBARY_DIM")]
    dim: Option<usize>,
    /// Quadrature level (default 8 on S^1, 32 on S^2, 5 above).
    #[arg(long, global = true, env = "CBARY_LEVEL")]
    level: Option<usize>,
    /// Newton tolerance on the normalised field.
    #[arg(long, global = true, env = "CBARY_TOL")]
    tol: Option<f64>,
    #[arg(long, global = true, env = "CBARY_MAX_ITERS")]
    max_iters: Option<usize>,
    /// Seed for randomised suites.
    #[arg(long, global = true, env = "CBARY_SEED")]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "CBARY_WORKERS")]
    workers: Option<usize>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true, env = "CBARY_OUT")]
    out: Option<PathBuf>,
    /// TOML file with any of the settings above.
    #[arg(long, global = true, env = "CBARY_CONFIG")]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the conformal barycenter of a measure file.
    Barycenter { measure: PathBuf },
    /// Evaluate the barycenter field of a measure at a ball point.
    Field {
        measure: PathBuf,
        /// Comma separated coordinates of the point.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
    },
    /// Extend a boundary map at points or on a grid.
    Extend {
        map: PathBuf,
        #[command(flatten)]
        input: PointInput,
        /// Also write the image grid as an OFF mesh (needs --grid).
        #[arg(long, requires = "grid")]
        mesh: Option<PathBuf>,
    },
    /// Run a named property suite.
    Check { suite: Suite },
    /// Conjecture residual tables for a Blaschke product.
    Conjecture { map: PathBuf },
    /// Image of a grid under the extension, as an OFF mesh.
    Mesh {
        map: PathBuf,
        #[arg(long)]
        grid: String,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct PointInput {
    /// File with one point per line.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Grid spec: disc:N[:R], radial:N:u1,..,ud or shell:R:M.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dim: Option<usize>,
    level: Option<usize>,
    tol: Option<f64>,
    max_iters: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
}

/// Settings after merging flags, environment and config file.
struct Settings {
    dim: usize,
    level: Option<usize>,
    solver: SolverConfig,
    seed: u64,
    workers: Option<usize>,
    out: Option<PathBuf>,
}

impl Settings {
    fn resolve(g: GlobalArgs) -> Result<Self, Failure> {
        let file = match &g.config {
            Some(path) => {
                let text = read(path)?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| Failure::input(format!("config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let defaults = SolverConfig::default();
        Ok(Settings {
            dim: g.dim.or(file.dim).unwrap_or(2),
            level: g.level.or(file.level),
            solver: SolverConfig {
                tol: g.tol.or(file.tol).unwrap_or(defaults.tol),
                max_iters: g.max_iters.or(file.max_iters).unwrap_or(defaults.max_iters),
                ..defaults
            },
            seed: g.seed.or(file.seed).unwrap_or(0),
            workers: g.workers.or(file.workers),
            out: g.out.or(file.out),
        })
    }

    fn solver_for(&self, sphere_dim: usize) -> SolverConfig {
        let level = self.level.unwrap_or(match sphere_dim {
            1 => 8,
            2 => 32,
            _ => 5,
        });
        SolverConfig { level, ..self.solver }
    }
}

/// A failed run: exit code and the message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: String) -> Self {
        Failure { code: 1, message }
    }

    /// Maps a library error, naming the property that could not be met.
    fn from_error(property: &str, e: Error) -> Self {
        let code = match e {
            Error::Inadmissible { .. } | Error::InadmissibleSample { .. } => 2,
            Error::NoConvergence { .. } | Error::SingularJacobian => 3,
            _ => 1,
        };
        Failure {
            code,
            message: format!("{property}: {e}"),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse<T>(path: &Path, r: conformal_barycenter::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_map(path: &Path) -> Result<MapSpec, Failure> {
    let text = read(path)?;
    parse(path, formats::parse_map(&text))
}

fn evaluator(map: &MapSpec, settings: &Settings) -> Result<ExtensionEvaluator, Failure> {
    let solver = settings.solver_for(settings.dim);
    let phi = map
        .sphere_map(settings.dim + 1)
        .map_err(|e| Failure::from_error("boundary map", e))?;
    let rule = make_rule(settings.dim, solver.level).map_err(|e| Failure::from_error("quadrature rule", e))?;
    ExtensionEvaluator::new(phi, rule, solver).map_err(|e| Failure::from_error("extension", e))
}

fn cmd_barycenter(path: &Path, settings: &Settings) -> Result<String, Failure> {
    let spec = parse(path, formats::parse_measure(&read(path)?))?;
    let solver = settings.solver_for(spec.sphere_dim);
    let rule = make_rule(spec.sphere_dim, solver.level).map_err(|e| Failure::from_error("quadrature rule", e))?;
    let mu = spec
        .build(&rule)
        .map_err(|e| Failure::from_error("measure", e))?;
    let b = barycenter::barycenter(&mu, &solver)
        .map_err(|e| Failure::from_error("barycenter is the unique zero of the field", e))?;
    let mut table = Table::new("result", &["quantity", "value"]);
    table.push(vec!["sphere_dim".into(), spec.sphere_dim.to_string()]);
    table.push(vec!["level".into(), solver.level.to_string()]);
    table.push(vec!["point".into(), vec_cell(b.point.coords())]);
    table.push(vec!["residual".into(), num(b.residual)]);
    table.push(vec!["iterations".into(), b.iterations.to_string()]);
    table.push(vec!["converged".into(), b.converged.to_string()]);
    let mut report = Report::new("barycenter");
    report.add_table(table);
    Ok(report.render())
}

fn cmd_field(path: &Path, at: &[f64], settings: &Settings) -> Result<String, Failure> {
    let spec = parse(path, formats::parse_measure(&read(path)?))?;
    let solver = settings.solver_for(spec.sphere_dim);
    let rule = make_rule(spec.sphere_dim, solver.level).map_err(|e| Failure::from_error("quadrature rule", e))?;
    let mu = spec
        .build(&rule)
        .map_err(|e| Failure::from_error("measure", e))?;
    if at.len() != spec.sphere_dim + 1 {
        return Err(Failure::input(format!(
            "--at needs {} coordinates, got {}",
            spec.sphere_dim + 1,
            at.len()
        )));
    }
    let w = BallPoint::new(at).map_err(|e| Failure::input(format!("--at: {e}")))?;
    let v = barycenter::field(&mu, &w).map_err(|e| Failure::from_error("barycenter field", e))?;
    let mut table = Table::new("field", &["quantity", "value"]);
    table.push(vec!["at".into(), vec_cell(v.at.coords())]);
    table.push(vec!["vector".into(), vec_cell(&v.vector)]);
    table.push(vec!["normalized".into(), vec_cell(&v.normalized)]);
    let mut report = Report::new("field");
    report.add_table(table);
    Ok(report.render())
}

/// Evaluates the extension at each point. Failed points keep their row
/// with the error in the status column.
fn extension_table(ev: &ExtensionEvaluator, points: &[Vector]) -> (Table, Vec<Vector>, Option<Failure>) {
    let mut table = Table::new("extension", &["z", "phi", "residual", "iterations", "status"]);
    let mut images = Vec::with_capacity(points.len());
    let mut first_failure = None;
    for (z, v) in points.iter().zip(ev.evaluate_grid(points)) {
        match v {
            Ok(v) => {
                table.push(vec![
                    vec_cell(z),
                    vec_cell(&v.point),
                    num(v.residual),
                    v.iterations.to_string(),
                    "ok".into(),
                ]);
                images.push(v.point);
            }
            Err(e) => {
                let message = e.to_string().replace(',', ";");
                table.push(vec![vec_cell(z), String::new(), String::new(), String::new(), message]);
                images.push(z.clone());
                if first_failure.is_none() {
                    first_failure = Some(Failure::from_error(&format!("extension at {}", vec_cell(z)), e));
                }
            }
        }
    }
    (table, images, first_failure)
}

fn grid(spec: &str, settings: &Settings) -> Result<Grid, Failure> {
    formats::parse_grid(spec, settings.dim + 1).map_err(|e| Failure::input(e.to_string()))
}

fn cmd_extend(
    map_path: &Path,
    input: &PointInput,
    mesh: Option<&Path>,
    settings: &Settings,
) -> Result<(String, Option<Failure>), Failure> {
    let map = load_map(map_path)?;
    let ev = evaluator(&map, settings)?;
    let (points, faces) = match (&input.points, &input.grid) {
        (Some(path), _) => (parse(path, formats::parse_points(&read(path)?, settings.dim + 1))?, Vec::new()),
        (None, Some(spec)) => {
            let g = grid(spec, settings)?;
            (g.points, g.faces)
        }
        (None, None) => return Err(Failure::input("give --points or --grid".into())),
    };
    let (table, images, failure) = extension_table(&ev, &points);
    if let Some(path) = mesh {
        fs::write(path, formats::write_off(&images, &faces))
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    let mut report = Report::new(format!("extension of {}", ev.map().describe()));
    report.add_table(table);
    Ok((report.render(), failure))
}

fn cmd_mesh(map_path: &Path, spec: &str, settings: &Settings) -> Result<(String, Option<Failure>), Failure> {
    let map = load_map(map_path)?;
    let ev = evaluator(&map, settings)?;
    let g = grid(spec, settings)?;
    let (_, images, failure) = extension_table(&ev, &g.points);
    Ok((formats::write_off(&images, &g.faces), failure))
}

fn cmd_check(suite: Suite, settings: &Settings) -> Result<(String, Option<Failure>), Failure> {
    let cfg = SuiteConfig {
        solver: settings.solver,
        level: settings.level,
        seed: settings.seed,
    };
    let report = suite
        .run(&cfg)
        .map_err(|e| Failure::from_error(&format!("suite {suite}"), e))?;
    let failure = (!report.passed()).then(|| Failure {
        code: 4,
        message: report
            .failures()
            .map(|c| format!("check failed: {} (measured {}, bound {})", c.property, num(c.measured), num(c.bound)))
            .collect::<Vec<_>>()
            .join("\n"),
    });
    Ok((report.render(), failure))
}

fn cmd_conjecture(map_path: &Path, settings: &Settings) -> Result<String, Failure> {
    let map = load_map(map_path)?;
    let f = map
        .blaschke()
        .ok_or_else(|| Failure::input(format!("{}: conjecture scans need a blaschke map", map_path.display())))?;
    let solver = settings.solver_for(2);
    let report = complex::conjecture_scan(f, &solver).map_err(|e| Failure::from_error("conjecture scan", e))?;
    Ok(report.render())
}

fn run(cli: Cli) -> Result<Option<Failure>, Failure> {
    let settings = Settings::resolve(cli.global)?;
    if settings.dim == 0 {
        return Err(Failure::input("--dim must be at least 1".into()));
    }
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = settings.workers {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Failure::input(format!("worker pool: {e}")))?
    };
    let (text, failure) = pool.install(|| -> Result<(String, Option<Failure>), Failure> {
        match &cli.command {
            Command::Barycenter { measure } => cmd_barycenter(measure, &settings).map(|t| (t, None)),
            Command::Field { measure, at } => cmd_field(measure, at, &settings).map(|t| (t, None)),
            Command::Extend { map, input, mesh } => cmd_extend(map, input, mesh.as_deref(), &settings),
            Command::Check { suite } => cmd_check(*suite, &settings),
            Command::Conjecture { map } => cmd_conjecture(map, &settings).map(|t| (t, None)),
            Command::Mesh { map, grid } => cmd_mesh(map, grid, &settings),
        }
    })?;
    match &settings.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(failure)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(f)) | Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
