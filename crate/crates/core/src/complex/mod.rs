//! Holomorphic maps of the Riemann sphere and the disc: rational maps,
//! finite Blaschke products and expression-defined entire maps, together
//! with their lifts to sphere maps and the structural experiments run on
//! their extensions.

mod experiments;
mod lift;

pub use experiments::*;
pub use lift::{CircleLift, HatLift};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::chart::ChartPoint;
use crate::error::{Error, Result};
use crate::expr::Expr;

/// Largest supported degree.
pub const MAX_DEGREE: usize = 32;

/// Roots of numerator and denominator closer than this count as common.
pub const COMMON_ROOT_TOL: f64 = 1e-10;

/// Relative size below which a denominator is treated as zero.
pub const POLE_TOL: f64 = 1e-14;

/// Chordal distance to `∞` below which expression maps refuse to evaluate.
pub const ESSENTIAL_GUARD: f64 = 1e-6;

/// A map of the extended complex plane given by point evaluation.
pub trait ComplexMap: Send + Sync {
    fn eval(&self, z: ChartPoint) -> Result<ChartPoint>;

    fn describe(&self) -> String;
}

/// `P(z)/Q(z)` with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
}

impl RationalMap {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        let num = trim(num);
        let den = trim(den);
        if den.is_empty() {
            return Err(Error::InvalidMap("denominator is identically zero".into()));
        }
        if num.is_empty() {
            return Err(Error::InvalidMap("numerator is identically zero".into()));
        }
        let degree = (num.len() - 1).max(den.len() - 1);
        if degree > MAX_DEGREE {
            return Err(Error::InvalidMap(format!(
                "degree {degree} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        let rp = roots(&num)?;
        let rq = roots(&den)?;
        for a in &rp {
            for b in &rq {
                if (a - b).norm() < COMMON_ROOT_TOL * (1.0 + a.norm()) {
                    return Err(Error::InvalidMap(format!(
                        "numerator and denominator share the root {a}"
                    )));
                }
            }
        }
        Ok(RationalMap { num, den })
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        RationalMap::new(coeffs, vec![Complex64::new(1.0, 0.0)])
    }

    /// `z^d`.
    pub fn power(d: usize) -> Result<Self> {
        let mut c = vec![Complex64::new(0.0, 0.0); d + 1];
        c[d] = Complex64::new(1.0, 0.0);
        RationalMap::polynomial(c)
    }

    pub fn numerator(&self) -> &[Complex64] {
        &self.num
    }

    pub fn denominator(&self) -> &[Complex64] {
        &self.den
    }

    pub fn degree(&self) -> usize {
        (self.num.len() - 1).max(self.den.len() - 1)
    }

    fn ratio(p: Complex64, q: Complex64, scale: f64) -> Result<ChartPoint> {
        if q.norm() <= POLE_TOL * scale {
            if p.norm() <= POLE_TOL * scale {
                return Err(Error::Indeterminate);
            }
            return Ok(ChartPoint::Infinity);
        }
        Ok(ChartPoint::from(p / q))
    }
}

impl ComplexMap for RationalMap {
    fn eval(&self, z: ChartPoint) -> Result<ChartPoint> {
        let (dp, dq) = (self.num.len() - 1, self.den.len() - 1);
        let Some(z) = z.finite() else {
            return Ok(match dp.cmp(&dq) {
                std::cmp::Ordering::Greater => ChartPoint::Infinity,
                std::cmp::Ordering::Less => ChartPoint::new(0.0, 0.0),
                std::cmp::Ordering::Equal => ChartPoint::from(self.num[dp] / self.den[dq]),
            });
        };
        if z.norm() <= 1.0 {
            let (p, sp) = horner(&self.num, z);
            let (q, sq) = horner(&self.den, z);
            return RationalMap::ratio(p, q, sp.max(sq));
        }
        // P(z)/Q(z) = z^(dp-dq) · P̃(1/z)/Q̃(1/z) with reversed coefficients.
        let u = recip(z);
        let (p, sp) = horner_reversed(&self.num, u);
        let (q, sq) = horner_reversed(&self.den, u);
        let r = RationalMap::ratio(p, q, sp.max(sq))?;
        Ok(match r {
            ChartPoint::Infinity => ChartPoint::Infinity,
            ChartPoint::Finite(r) if dp >= dq => ChartPoint::from(r * z.powi((dp - dq) as i32)),
            ChartPoint::Finite(r) => ChartPoint::from(r * u.powi((dq - dp) as i32)),
        })
    }

    fn describe(&self) -> String {
        format!("rational of degree {}", self.degree())
    }
}

/// `1/z` without overflow in the intermediate `|z|²`.
fn recip(z: Complex64) -> Complex64 {
    let s = z.re.abs().max(z.im.abs());
    (z / s).inv() / s
}

fn trim(mut c: Vec<Complex64>) -> Vec<Complex64> {
    while c.last().is_some_and(|v| v.norm() == 0.0) {
        c.pop();
    }
    c
}

/// `(P(z), Σ|cₖ||z|ᵏ)`.
fn horner(c: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let r = z.norm();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for v in c.iter().rev() {
        acc = acc * z + v;
        scale = scale * r + v.norm();
    }
    (acc, scale)
}

/// Horner on the reversed coefficient list: `Σ cₖ u^(d-k)`.
fn horner_reversed(c: &[Complex64], u: Complex64) -> (Complex64, f64) {
    let r = u.norm();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for v in c {
        acc = acc * u + v;
        scale = scale * r + v.norm();
    }
    (acc, scale)
}

/// Roots of a polynomial (ascending coefficients): zero roots are split
/// off, the rest are companion-matrix eigenvalues.
fn roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let zeros = c.iter().take_while(|v| v.norm() == 0.0).count();
    let c = &c[zeros..];
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    let d = c.len() - 1;
    if d == 0 {
        return Ok(out);
    }
    let lead = c[d];
    let m = DMatrix::<Complex64>::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let eig = Schur::try_new(m, f64::EPSILON, 10_000)
        .and_then(|s| s.eigenvalues())
        .ok_or_else(|| Error::InvalidMap("root finding did not converge".into()))?;
    out.extend(eig.iter().copied());
    Ok(out)
}

/// `σ ∏ (z + aⱼ)/(1 + āⱼ z)`: the zeros are at `-aⱼ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    sigma: Complex64,
    a: Vec<Complex64>,
}

impl BlaschkeProduct {
    pub fn new(sigma: Complex64, a: Vec<Complex64>) -> Result<Self> {
        if !((sigma.norm() - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidMap(format!("|sigma| = {} is not 1", sigma.norm())));
        }
        if a.len() > MAX_DEGREE {
            return Err(Error::InvalidMap(format!(
                "degree {} exceeds the supported maximum {MAX_DEGREE}",
                a.len()
            )));
        }
        if let Some(bad) = a.iter().find(|v| !(v.norm() < 1.0)) {
            return Err(Error::InvalidMap(format!("parameter {bad} is not in the unit disc")));
        }
        Ok(BlaschkeProduct {
            sigma: sigma / sigma.norm(),
            a,
        })
    }

    /// `z^d`.
    pub fn power(d: usize) -> Self {
        BlaschkeProduct {
            sigma: Complex64::new(1.0, 0.0),
            a: vec![Complex64::new(0.0, 0.0); d],
        }
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    pub fn params(&self) -> &[Complex64] {
        &self.a
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    pub fn fixes_origin(&self) -> bool {
        self.a.iter().any(|v| v.norm() == 0.0)
    }

    /// Whether every parameter is real, so that `f(z̄) = conj(f(z))` when
    /// also `σ = ±1`.
    pub fn is_real(&self) -> bool {
        self.sigma.im == 0.0 && self.a.iter().all(|v| v.im == 0.0)
    }

    /// All parameters are zero: `f(z) = σ z^d`.
    pub fn is_monomial(&self) -> bool {
        self.a.iter().all(|v| v.norm() == 0.0)
    }

    /// Value at a finite point of the closed disc.
    pub fn eval_disc(&self, z: Complex64) -> Complex64 {
        self.a
            .iter()
            .fold(self.sigma, |acc, a| acc * (z + a) / (1.0 + a.conj() * z))
    }

    /// The same map as numerator and denominator polynomials.
    pub fn to_rational(&self) -> Result<RationalMap> {
        let one = Complex64::new(1.0, 0.0);
        let mut num = vec![self.sigma];
        let mut den = vec![one];
        for a in &self.a {
            num = poly_mul(&num, &[*a, one]);
            den = poly_mul(&den, &[one, a.conj()]);
        }
        RationalMap::new(num, den)
    }
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl ComplexMap for BlaschkeProduct {
    fn eval(&self, z: ChartPoint) -> Result<ChartPoint> {
        // f(z) = 1/conj(f(1/z̄)) outside the disc.
        let reflect = |w: Complex64| -> ChartPoint {
            if w.norm() == 0.0 {
                ChartPoint::Infinity
            } else {
                ChartPoint::from(w.conj().inv())
            }
        };
        match z.finite() {
            None => Ok(reflect(self.eval_disc(Complex64::new(0.0, 0.0)))),
            Some(z) if z.norm() <= 1.0 => Ok(ChartPoint::Finite(self.eval_disc(z))),
            Some(z) => Ok(reflect(self.eval_disc(z.conj().inv()))),
        }
    }

    fn describe(&self) -> String {
        format!("blaschke of degree {}", self.degree())
    }
}

/// An entire map `z ↦ expr(z)`. The point `∞` is treated as an essential
/// singularity, and points within [`ESSENTIAL_GUARD`] of it are refused.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprMap {
    expr: Expr,
}

impl ExprMap {
    pub fn parse(src: &str) -> Result<Self> {
        Ok(ExprMap {
            expr: Expr::parse(src, &["z"])?,
        })
    }

    pub fn source(&self) -> &str {
        self.expr.source()
    }

    pub fn eval_finite(&self, z: Complex64) -> Complex64 {
        self.expr.eval(&[z])
    }
}

impl ComplexMap for ExprMap {
    fn eval(&self, z: ChartPoint) -> Result<ChartPoint> {
        match z.finite() {
            Some(z) if 2.0 / (1.0 + z.norm_sqr()).sqrt() >= ESSENTIAL_GUARD => {
                let v = self.eval_finite(z);
                if v.re.is_nan() || v.im.is_nan() {
                    return Err(Error::MapEval(format!("{} is undefined at {z}", self.source())));
                }
                Ok(ChartPoint::from(v))
            }
            _ => Err(Error::MapEval(format!(
                "{} has an essential singularity at infinity",
                self.source()
            ))),
        }
    }

    fn describe(&self) -> String {
        format!("expr {}", self.source())
    }
}

/// Any of the supported complex maps.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyComplexMap {
    Rational(RationalMap),
    Blaschke(BlaschkeProduct),
    Expr(ExprMap),
}

impl ComplexMap for AnyComplexMap {
    fn eval(&self, z: ChartPoint) -> Result<ChartPoint> {
        match self {
            AnyComplexMap::Rational(m) => m.eval(z),
            AnyComplexMap::Blaschke(m) => m.eval(z),
            AnyComplexMap::Expr(m) => m.eval(z),
        }
    }

    fn describe(&self) -> String {
        match self {
            AnyComplexMap::Rational(m) => m.describe(),
            AnyComplexMap::Blaschke(m) => m.describe(),
            AnyComplexMap::Expr(m) => m.describe(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_at_one_plus_i() {
        let f = RationalMap::power(2).unwrap();
        assert_eq!(f.eval(ChartPoint::new(1.0, 1.0)).unwrap(), ChartPoint::new(0.0, 2.0));
        assert!(f.eval(ChartPoint::Infinity).unwrap().is_infinite());
    }

    #[test]
    fn reciprocal_poles() {
        let f = RationalMap::new(vec![c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(f.eval(ChartPoint::new(0.0, 0.0)).unwrap().is_infinite());
        assert_eq!(f.eval(ChartPoint::Infinity).unwrap(), ChartPoint::new(0.0, 0.0));
        assert_eq!(f.eval(ChartPoint::new(0.0, 2.0)).unwrap(), ChartPoint::new(0.0, -0.5));
        let big = f.eval(ChartPoint::new(1e200, 0.0)).unwrap().finite().unwrap();
        assert!((big.re - 1e-200).abs() < 1e-214);
    }

    #[test]
    fn rejects_common_roots_and_zero_denominator() {
        // (z - 1)(z + 2) / (z - 1)
        let num = vec![c(-2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let den = vec![c(-1.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(RationalMap::new(num, den), Err(Error::InvalidMap(_))));
        assert!(RationalMap::new(vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]).is_err());
        assert!(RationalMap::power(33).is_err());
    }

    #[test]
    fn blaschke_on_the_circle() {
        let f = BlaschkeProduct::new(c(1.0, 0.0), vec![c(0.5, 0.0)]).unwrap();
        assert_eq!(f.eval(ChartPoint::new(1.0, 0.0)).unwrap(), ChartPoint::new(1.0, 0.0));
        let g = BlaschkeProduct::new(c(0.6, 0.8), vec![c(0.3, 0.0), c(0.0, -0.4), c(-0.2, 0.5)]).unwrap();
        for k in 0..100 {
            let t = k as f64 * 0.0628;
            let v = g.eval(ChartPoint::new(t.cos(), t.sin())).unwrap().finite().unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn blaschke_outside_the_disc_matches_rational_form() {
        let f = BlaschkeProduct::new(c(0.0, 1.0), vec![c(0.3, 0.0), c(0.0, -0.4)]).unwrap();
        let r = f.to_rational().unwrap();
        for z in [c(2.0, 1.0), c(-0.5, 0.2), c(0.0, 30.0)] {
            let a = f.eval(ChartPoint::Finite(z)).unwrap().finite().unwrap();
            let b = r.eval(ChartPoint::Finite(z)).unwrap().finite().unwrap();
            assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
        }
        let inf = f.eval(ChartPoint::Infinity).unwrap().finite().unwrap();
        let rinf = r.eval(ChartPoint::Infinity).unwrap().finite().unwrap();
        assert!((inf - rinf).norm() < 1e-12 * inf.norm());
        assert!(BlaschkeProduct::power(2).eval(ChartPoint::Infinity).unwrap().is_infinite());
    }

    #[test]
    fn blaschke_validation() {
        assert!(BlaschkeProduct::new(c(2.0, 0.0), vec![]).is_err());
        assert!(BlaschkeProduct::new(c(1.0, 0.0), vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn expression_maps() {
        let f = ExprMap::parse("exp(z)").unwrap();
        let v = f.eval(ChartPoint::new(0.0, std::f64::consts::PI)).unwrap().finite().unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(f.eval(ChartPoint::Infinity), Err(Error::MapEval(_))));
        assert!(f.eval(ChartPoint::new(1e7, 0.0)).is_err());
    }
}
