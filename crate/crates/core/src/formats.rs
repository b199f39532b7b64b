//! Text formats for measures, maps, point lists and evaluation grids.
//!
//! See `docs/formats.md` for the grammar. Every parse error carries the
//! 1-based line and column of the offending text.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::complex::{AnyComplexMap, BlaschkeProduct, CircleLift, ExprMap, HatLift, RationalMap};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::measure::SphereMeasure;
use crate::mobius::{BallPoint, MobiusMap, SpherePoint};
use crate::quadrature::QuadratureRule;
use crate::sphere_map::{IdentityMap, SphereMap};
use crate::vector::{self, Vector};

/// Tolerance on the norm of atom coordinates before they are normalised.
pub const UNIT_TOL: f64 = 1e-9;

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_error(src: &str, offset: usize, message: impl Into<String>) -> Error {
    let (line, column) = position(src, offset);
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Shifts the position of an error raised while parsing `src[offset..]`.
fn relocate(src: &str, offset: usize, err: Error) -> Error {
    match err {
        Error::Parse { line, column, message } => {
            let (l0, c0) = position(src, offset);
            let column = if line == 1 { c0 + column - 1 } else { column };
            Error::Parse {
                line: l0 + line - 1,
                column,
                message,
            }
        }
        other => other,
    }
}

/// A cursor over the source with `#` comments blanked out.
struct Cursor<'a> {
    src: &'a str,
    text: Vec<u8>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        let mut text = src.as_bytes().to_vec();
        let mut in_comment = false;
        for b in text.iter_mut() {
            if *b == b'\n' {
                in_comment = false;
            } else if *b == b'#' || in_comment {
                in_comment = true;
                *b = b' ';
            }
        }
        Cursor { src, text, pos: 0 }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        parse_error(self.src, self.pos, message)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Skips blanks but not newlines.
    fn skip_inline(&mut self) {
        while self.pos < self.text.len() && matches!(self.text[self.pos], b' ' | b'\t' | b'\r') {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    /// The raw text of one value: up to the next top-level `,`, `]` or end
    /// of line.
    fn value_text(&mut self) -> Result<(usize, &'a str)> {
        self.skip_inline();
        let start = self.pos;
        let mut depth = 0i32;
        while let Some(c) = self.peek() {
            match c {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b',' | b']' | b'\n' if depth == 0 => break,
                _ => {}
            }
            self.pos += 1;
        }
        let text = self.src[start..self.pos].trim_end();
        if text.trim().is_empty() {
            return Err(parse_error(self.src, start, "expected a value"));
        }
        Ok((start, text))
    }

    /// A constant complex expression.
    fn complex(&mut self) -> Result<Complex64> {
        let (start, text) = self.value_text()?;
        let e = Expr::parse(text, &[]).map_err(|e| relocate(self.src, start, e))?;
        let v = e.eval(&[]);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(parse_error(self.src, start, "value is not finite"));
        }
        Ok(v)
    }

    fn real(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let v = self.complex()?;
        if v.im != 0.0 {
            return Err(parse_error(self.src, start, "expected a real number"));
        }
        Ok(v.re)
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.expect(b'[')?;
        let mut out = Vec::new();
        if self.eat(b']') {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(b']') {
                return Ok(out);
            }
            self.expect(b',')?;
        }
    }

    /// The rest of the current line, trimmed.
    fn rest_of_line(&mut self) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c != b'\n') {
            self.pos += 1;
        }
        (start, self.src[start..self.pos].trim_end())
    }
}

/// A parsed measure file.
#[derive(Debug, Clone)]
pub struct MeasureSpec {
    /// Sphere dimension `n`; points have `n + 1` coordinates.
    pub sphere_dim: usize,
    pub atoms: Vec<(SpherePoint, f64)>,
    /// Density over `x1 .. x{n+1}`, sampled at the rule nodes.
    pub density: Option<Expr>,
}

impl MeasureSpec {
    /// The measure, with the density (if any) sampled on `rule`.
    ///
    /// Without a density the atom masses are rescaled to sum to one. With a
    /// density the atoms keep their masses and the density carries the
    /// remaining mass.
    pub fn build(&self, rule: &QuadratureRule) -> Result<SphereMeasure> {
        let dim = self.sphere_dim + 1;
        match &self.density {
            None => {
                let total: f64 = self.atoms.iter().map(|a| a.1).sum();
                let atoms = self
                    .atoms
                    .iter()
                    .map(|(p, m)| (p.clone(), m / total))
                    .collect();
                SphereMeasure::from_atoms(dim, atoms)
            }
            Some(expr) => {
                if rule.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: rule.dim(),
                    });
                }
                let density = rule.nodes().map(|x| expr.eval_real(x)).collect();
                SphereMeasure::with_density(rule, self.atoms.clone(), density)
            }
        }
    }
}

/// Parses a measure file.
///
/// ```text
/// # three atoms on S²
/// dimension: 2
/// atoms: [[1, 0, 0], 0.2] [[0, 1, 0], 0.2]
/// density_expr: 1 + x3^2
/// ```
pub fn parse_measure(src: &str) -> Result<MeasureSpec> {
    let mut cur = Cursor::new(src);
    let mut sphere_dim: Option<usize> = None;
    let mut atoms = Vec::new();
    let mut density_src: Option<(usize, String)> = None;
    while !cur.at_end() {
        let key_at = cur.pos;
        let key = cur.ident()?;
        cur.expect(b':')?;
        match key.as_str() {
            "dimension" => {
                let at = cur.pos;
                let v = cur.real()?;
                if !(v >= 1.0 && v.fract() == 0.0 && v <= 16.0) {
                    return Err(parse_error(src, at, "dimension must be an integer in 1..=16"));
                }
                if sphere_dim.replace(v as usize).is_some() {
                    return Err(parse_error(src, key_at, "dimension given twice"));
                }
            }
            "atoms" => {
                let dim = sphere_dim
                    .ok_or_else(|| parse_error(src, key_at, "dimension must precede atoms"))?
                    + 1;
                loop {
                    cur.skip_inline();
                    if cur.peek() != Some(b'[') {
                        break;
                    }
                    let at = cur.pos;
                    cur.expect(b'[')?;
                    let coords = cur.list(|c| c.real())?;
                    cur.expect(b',')?;
                    let mass_at = cur.pos;
                    let mass = cur.real()?;
                    cur.expect(b']')?;
                    if coords.len() != dim {
                        return Err(parse_error(
                            src,
                            at,
                            format!("atom has {} coordinates, expected {dim}", coords.len()),
                        ));
                    }
                    let r = vector::norm(&coords);
                    if (r - 1.0).abs() > UNIT_TOL {
                        return Err(parse_error(src, at, format!("atom is not a unit vector (norm {r})")));
                    }
                    if !(mass > 0.0) {
                        return Err(parse_error(src, mass_at, "atom mass must be positive"));
                    }
                    let p = SpherePoint::new(&vector::scaled(&coords, 1.0 / r))?;
                    atoms.push((p, mass));
                }
            }
            "density_expr" => {
                let (at, text) = cur.rest_of_line();
                if density_src.replace((at, text.to_string())).is_some() {
                    return Err(parse_error(src, key_at, "density_expr given twice"));
                }
            }
            other => return Err(parse_error(src, key_at, format!("unknown key '{other}'"))),
        }
    }
    let sphere_dim = sphere_dim.ok_or_else(|| parse_error(src, src.len(), "missing dimension"))?;
    let density = match density_src {
        None => None,
        Some((at, text)) => {
            let names: Vec<String> = (1..=sphere_dim + 1).map(|i| format!("x{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            Some(Expr::parse(&text, &refs).map_err(|e| relocate(src, at, e))?)
        }
    };
    if atoms.is_empty() && density.is_none() {
        return Err(parse_error(src, src.len(), "measure has neither atoms nor density"));
    }
    Ok(MeasureSpec {
        sphere_dim,
        atoms,
        density,
    })
}

/// A parsed map file.
#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Complex(AnyComplexMap),
    Mobius(MobiusMap),
    Identity,
}

impl MapSpec {
    /// The boundary map on the sphere of ambient dimension `dim`. Complex
    /// maps act on S² through the stereographic chart, or on S¹ directly.
    pub fn sphere_map(&self, dim: usize) -> Result<Arc<dyn SphereMap>> {
        match self {
            MapSpec::Identity => Ok(Arc::new(IdentityMap { dim })),
            MapSpec::Mobius(g) if g.dim() == dim => Ok(Arc::new(g.clone())),
            MapSpec::Mobius(g) => Err(Error::DimensionMismatch {
                expected: dim,
                found: g.dim(),
            }),
            MapSpec::Complex(f) => match dim {
                3 => Ok(Arc::new(HatLift::new(Arc::new(f.clone())))),
                2 => Ok(Arc::new(CircleLift::new(Arc::new(f.clone())))),
                _ => Err(Error::InvalidArgument(format!(
                    "complex maps act on S1 or S2, not on a sphere in R^{dim}"
                ))),
            },
        }
    }

    pub fn blaschke(&self) -> Option<&BlaschkeProduct> {
        match self {
            MapSpec::Complex(AnyComplexMap::Blaschke(b)) => Some(b),
            _ => None,
        }
    }
}

/// Parses a map file.
///
/// ```text
/// rational: num_coeffs=[0, 0, 1], den_coeffs=[1]
/// blaschke: sigma=1, zeros=[0.3, -0.4i]
/// expr: exp(z)
/// mobius: w=[0.2, 0, 0.1], rotation=[[0, -1, 0], [1, 0, 0], [0, 0, 1]]
/// identity
/// ```
pub fn parse_map(src: &str) -> Result<MapSpec> {
    let mut cur = Cursor::new(src);
    if cur.at_end() {
        return Err(parse_error(src, 0, "empty map file"));
    }
    let kind_at = cur.pos;
    let kind = cur.ident()?;
    let spec = match kind.as_str() {
        "identity" => MapSpec::Identity,
        "expr" => {
            cur.expect(b':')?;
            let (at, text) = cur.rest_of_line();
            let m = ExprMap::parse(text).map_err(|e| relocate(src, at, e))?;
            MapSpec::Complex(AnyComplexMap::Expr(m))
        }
        "rational" | "blaschke" | "mobius" => {
            cur.expect(b':')?;
            let mut fields: Vec<(String, usize)> = Vec::new();
            let mut num = None;
            let mut den = None;
            let mut sigma = None;
            let mut zeros = None;
            let mut w = None;
            let mut rotation = None;
            loop {
                let at = {
                    cur.skip_ws();
                    cur.pos
                };
                let key = cur.ident()?;
                if fields.iter().any(|f| f.0 == key) {
                    return Err(parse_error(src, at, format!("'{key}' given twice")));
                }
                cur.expect(b'=')?;
                match (kind.as_str(), key.as_str()) {
                    ("rational", "num_coeffs") => num = Some(cur.list(|c| c.complex())?),
                    ("rational", "den_coeffs") => den = Some(cur.list(|c| c.complex())?),
                    ("blaschke", "sigma") => sigma = Some(cur.complex()?),
                    ("blaschke", "zeros") => zeros = Some(cur.list(|c| c.complex())?),
                    ("mobius", "w") => w = Some((cur.pos, cur.list(|c| c.real())?)),
                    ("mobius", "rotation") => {
                        rotation = Some((cur.pos, cur.list(|c| c.list(|c| c.real()))?))
                    }
                    _ => return Err(parse_error(src, at, format!("unknown field '{key}' for {kind}"))),
                }
                fields.push((key, at));
                if !cur.eat(b',') {
                    break;
                }
            }
            let missing = |name: &str| parse_error(src, kind_at, format!("{kind} needs {name}"));
            let at = |name: &str| fields.iter().find(|f| f.0 == name).map_or(kind_at, |f| f.1);
            match kind.as_str() {
                "rational" => {
                    let num = num.ok_or_else(|| missing("num_coeffs"))?;
                    let den = den.ok_or_else(|| missing("den_coeffs"))?;
                    let f = RationalMap::new(num, den).map_err(|e| located(src, at("num_coeffs"), e))?;
                    MapSpec::Complex(AnyComplexMap::Rational(f))
                }
                "blaschke" => {
                    let sigma = sigma.unwrap_or(Complex64::new(1.0, 0.0));
                    let zeros = zeros.ok_or_else(|| missing("zeros"))?;
                    let f = BlaschkeProduct::new(sigma, zeros).map_err(|e| located(src, kind_at, e))?;
                    MapSpec::Complex(AnyComplexMap::Blaschke(f))
                }
                _ => {
                    let (w_at, w) = w.ok_or_else(|| missing("w"))?;
                    let dim = w.len();
                    let w = BallPoint::new(&w).map_err(|e| located(src, w_at, e))?;
                    let rho = match rotation {
                        None => DMatrix::identity(dim, dim),
                        Some((r_at, rows)) => {
                            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                                return Err(parse_error(src, r_at, format!("rotation must be {dim}x{dim}")));
                            }
                            DMatrix::from_fn(dim, dim, |i, j| rows[i][j])
                        }
                    };
                    let g = MobiusMap::from_parts(w, rho).map_err(|e| located(src, at("rotation"), e))?;
                    MapSpec::Mobius(g)
                }
            }
        }
        other => return Err(parse_error(src, kind_at, format!("unknown map kind '{other}'"))),
    };
    if !cur.at_end() {
        return Err(cur.err("unexpected text after the map"));
    }
    Ok(spec)
}

/// Turns a validation error into a parse error at `offset`.
fn located(src: &str, offset: usize, e: Error) -> Error {
    parse_error(src, offset, e.to_string())
}

/// Parses a points file: one point per line, coordinates separated by
/// commas or whitespace. Blank lines and `#` comments are ignored.
pub fn parse_points(src: &str, dim: usize) -> Result<Vec<Vector>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in src.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("");
        let mut coords = Vector::new();
        let mut col = 0;
        for tok in body.split(|c: char| c == ',' || c.is_whitespace()) {
            if !tok.is_empty() {
                let at = offset + col;
                let v: f64 = tok
                    .parse()
                    .map_err(|_| parse_error(src, at, format!("invalid number '{tok}'")))?;
                coords.push(v);
            }
            col += tok.len() + 1;
        }
        if !coords.is_empty() {
            if coords.len() != dim {
                return Err(parse_error(
                    src,
                    offset,
                    format!("point has {} coordinates, expected {dim}", coords.len()),
                ));
            }
            out.push(coords);
        }
        offset += line.len();
    }
    Ok(out)
}

/// Points of an evaluation grid with quadrilateral (or segment-free)
/// faces for mesh export.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub points: Vec<Vector>,
    pub faces: Vec<Vec<usize>>,
}

/// Parses a grid spec.
///
/// * `disc:N[:R]`: an `N×N` lattice on `[-R, R]²` (default `R = 1`)
///   clipped to the closed unit disc, in the plane of the first two
///   coordinates.
/// * `radial:N:u1,..,ud`: `N` points `(k/N)·u` for `k = 0..N` along the
///   unit direction `u`, ending on the sphere.
/// * `shell:R:M`: the sphere of radius `R`, with `M` latitudes and `2M`
///   longitudes on S², or `2M` points on S¹.
pub fn parse_grid(spec: &str, dim: usize) -> Result<Grid> {
    let bad = |m: String| Error::InvalidArgument(format!("grid '{spec}': {m}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let count = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .ok()
            .filter(|n| (2..=4096).contains(n))
            .ok_or_else(|| bad(format!("'{s}' is not a count in 2..=4096")))
    };
    let real = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|_| bad(format!("'{s}' is not a number"))) };
    match parts.as_slice() {
        ["disc", n, rest @ ..] if rest.len() <= 1 => {
            let n = count(n)?;
            let r = rest.first().map_or(Ok(1.0), |s| real(s))?;
            if !(r > 0.0 && r <= 1.0) {
                return Err(bad("disc radius must lie in (0, 1]".into()));
            }
            Ok(disc_lattice(n, r, dim))
        }
        ["radial", n, dir] => {
            let n = count(n)?;
            let u: Vec<f64> = dir.split(',').map(real).collect::<Result<_>>()?;
            if u.len() != dim {
                return Err(bad(format!("direction needs {dim} coordinates")));
            }
            let r = vector::norm(&u);
            if !(r > 0.0) {
                return Err(bad("direction must be nonzero".into()));
            }
            let points = (0..=n)
                .map(|k| vector::scaled(&u, k as f64 / (n as f64 * r)))
                .collect();
            Ok(Grid {
                points,
                faces: Vec::new(),
            })
        }
        ["shell", r, m] => {
            let r = real(r)?;
            let m = count(m)?;
            if !(r > 0.0 && r <= 1.0) {
                return Err(bad("shell radius must lie in (0, 1]".into()));
            }
            shell(r, m, dim).ok_or_else(|| bad(format!("shell grids need dimension 2 or 3, not {dim}")))
        }
        _ => Err(bad("expected disc:N[:R], radial:N:u or shell:R:M".into())),
    }
}

fn disc_lattice(n: usize, r: f64, dim: usize) -> Grid {
    let step = 2.0 * r / (n - 1) as f64;
    let mut index = vec![None; n * n];
    let mut points = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (-r + i as f64 * step, -r + j as f64 * step);
            if x * x + y * y <= 1.0 + 1e-12 {
                let mut p = vector::zeros(dim);
                p[0] = x;
                if dim > 1 {
                    p[1] = y;
                }
                index[i * n + j] = Some(points.len());
                points.push(p);
            }
        }
    }
    let mut faces = Vec::new();
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let quad = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let ids: Option<Vec<usize>> = quad.iter().map(|(a, b)| index[a * n + b]).collect();
            if let Some(ids) = ids {
                faces.push(ids);
            }
        }
    }
    Grid { points, faces }
}

fn shell(r: f64, m: usize, dim: usize) -> Option<Grid> {
    use std::f64::consts::{PI, TAU};
    let az = 2 * m;
    match dim {
        2 => {
            let points = (0..az)
                .map(|k| {
                    let (s, c) = (TAU * k as f64 / az as f64).sin_cos();
                    Vector::from_slice(&[r * c, r * s])
                })
                .collect();
            let faces = (0..az).map(|k| vec![k, (k + 1) % az]).collect();
            Some(Grid { points, faces })
        }
        3 => {
            let mut points = Vec::new();
            for i in 0..m {
                let (st, ct) = (PI * (i as f64 + 0.5) / m as f64).sin_cos();
                for k in 0..az {
                    let (s, c) = (TAU * k as f64 / az as f64).sin_cos();
                    points.push(Vector::from_slice(&[r * st * c, r * st * s, r * ct]));
                }
            }
            let mut faces = Vec::new();
            for i in 0..m - 1 {
                for k in 0..az {
                    let k1 = (k + 1) % az;
                    faces.push(vec![i * az + k, (i + 1) * az + k, (i + 1) * az + k1, i * az + k1]);
                }
            }
            Some(Grid { points, faces })
        }
        _ => None,
    }
}

/// ASCII OFF export of a mesh. Vertices beyond three coordinates are
/// truncated and two-dimensional vertices get a zero third coordinate.
pub fn write_off(vertices: &[Vector], faces: &[Vec<usize>]) -> String {
    use std::fmt::Write as _;
    let mut s = String::from("OFF\n");
    let _ = writeln!(s, "{} {} 0", vertices.len(), faces.len());
    for v in vertices {
        let c = |i: usize| v.get(i).copied().unwrap_or(0.0);
        let _ = writeln!(s, "{:.12e} {:.12e} {:.12e}", c(0), c(1), c(2));
    }
    for f in faces {
        let ids: Vec<String> = f.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "{} {}", f.len(), ids.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexMap;
    use crate::chart::ChartPoint;
    use crate::quadrature::make_rule;

    fn parse_pos(r: Result<impl std::fmt::Debug>) -> (usize, usize) {
        match r {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn measure_with_atoms_only_is_renormalised() {
        let src = "# two atoms\ndimension: 2\natoms: [[1, 0, 0], 1] [[0, 0, -1], 3]\n";
        let spec = parse_measure(src).unwrap();
        let mu = spec.build(&make_rule(2, 8).unwrap()).unwrap();
        assert_eq!(mu.atoms().len(), 2);
        assert!((mu.atoms()[1].1 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn measure_with_density_fills_remaining_mass() {
        let src = "dimension: 2\natoms: [[0, 1, 0], 0.25]\ndensity_expr: 1 + x3^2\n";
        let rule = make_rule(2, 8).unwrap();
        let mu = parse_measure(src).unwrap().build(&rule).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        // ∫(1 + x3²)x3² / ∫(1 + x3²) over η₀ = (1/3 + 1/5)/(4/3) = 2/5.
        let second = mu.integrate(|x| x[2] * x[2]);
        assert!((second - 0.75 * 0.4).abs() < 1e-12);
    }

    #[test]
    fn measure_errors_are_located() {
        assert_eq!(parse_pos(parse_measure("dimension: 2\natoms: [[1, 0], 1]")), (2, 8));
        assert_eq!(parse_pos(parse_measure("dimension: 2\ndensity_expr: 1 + y")), (2, 19));
        assert_eq!(parse_pos(parse_measure("dimension: 2\nweights: 1")), (2, 1));
        assert_eq!(parse_pos(parse_measure("dimension: 2\natoms: [[1, 0, 0] 1]")), (2, 19));
        assert!(parse_measure("dimension: 2\n").is_err());
    }

    #[test]
    fn map_kinds() {
        let f = parse_map("rational: num_coeffs=[0, 0, 1], den_coeffs=[1]").unwrap();
        let MapSpec::Complex(f) = f else { panic!() };
        assert_eq!(f.eval(ChartPoint::new(1.0, 1.0)).unwrap(), ChartPoint::new(0.0, 2.0));
        let b = parse_map("# product\nblaschke: sigma=1, zeros=[0.3, -0.4i]\n").unwrap();
        let b = b.blaschke().unwrap();
        assert_eq!(b.params(), &[Complex64::new(0.3, 0.0), Complex64::new(0.0, -0.4)]);
        assert!(matches!(parse_map("expr: exp(z)").unwrap(), MapSpec::Complex(AnyComplexMap::Expr(_))));
        assert_eq!(parse_map("identity\n").unwrap(), MapSpec::Identity);
        let g = parse_map("mobius: w=[0.2, 0, 0.1], rotation=[[0, -1, 0], [1, 0, 0], [0, 0, 1]]").unwrap();
        let MapSpec::Mobius(g) = g else { panic!() };
        assert_eq!(g.dim(), 3);
    }

    #[test]
    fn map_errors_are_located() {
        assert_eq!(parse_pos(parse_map("blaschke: sigma=1, zeros=[0.3, 1.5]")), (1, 1));
        assert_eq!(parse_pos(parse_map("rational: num_coeffs=[1, z], den_coeffs=[1]")), (1, 26));
        assert_eq!(parse_pos(parse_map("spline: x=1")), (1, 1));
        assert_eq!(parse_pos(parse_map("expr:\n  exp(z")), (2, 8));
        assert_eq!(parse_pos(parse_map("blaschke: zeros=[0.1], colour=2")), (1, 24));
    }

    #[test]
    fn points_and_grids() {
        let pts = parse_points("0.1, 0.2 0.3\n# skip\n\n0 0 0\n", 3).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(parse_pos(parse_points("0 0 0\n0 x 0\n", 3)), (2, 3));
        let g = parse_grid("disc:21", 3).unwrap();
        assert_eq!(g.points.len(), 317);
        assert!(g.faces.iter().all(|f| f.len() == 4));
        let r = parse_grid("radial:4:0,0,2", 3).unwrap();
        assert_eq!(r.points.last().unwrap().as_slice(), &[0.0, 0.0, 1.0]);
        let s = parse_grid("shell:0.5:6", 3).unwrap();
        assert_eq!(s.points.len(), 72);
        assert!(parse_grid("cube:3", 3).is_err());
    }

    #[test]
    fn off_export() {
        let g = parse_grid("disc:3", 2).unwrap();
        let off = write_off(&g.points, &g.faces);
        assert!(off.starts_with("OFF\n5 0 0\n"));
    }
}
