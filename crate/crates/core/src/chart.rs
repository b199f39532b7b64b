//! The Riemann sphere chart on S².
//!
//! `S(z) = (2z, 1 - |z|²) / (1 + |z|²)`, so the origin goes to the north pole
//! `e₃`, the unit circle to the equator, the unit disc to the upper
//! hemisphere and `∞` to the south pole `-e₃`.

use std::fmt;

use num_complex::Complex64;

use crate::mobius::SpherePoint;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartPoint {
    Finite(Complex64),
    Infinity,
}

impl ChartPoint {
    pub fn new(re: f64, im: f64) -> Self {
        ChartPoint::Finite(Complex64::new(re, im))
    }

    pub fn finite(self) -> Option<Complex64> {
        match self {
            ChartPoint::Finite(z) => Some(z),
            ChartPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ChartPoint::Infinity)
    }
}

impl From<Complex64> for ChartPoint {
    fn from(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ChartPoint::Finite(z)
        } else {
            ChartPoint::Infinity
        }
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartPoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            ChartPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// `S(z)`, with `∞ ↦ -e₃`.
pub fn stereo_lift(z: ChartPoint) -> SpherePoint {
    match z {
        ChartPoint::Infinity => SpherePoint::new(&[0.0, 0.0, -1.0]).unwrap(),
        ChartPoint::Finite(z) => {
            let r2 = z.norm_sqr();
            let p = if r2 <= 1.0 {
                let d = 1.0 + r2;
                [2.0 * z.re / d, 2.0 * z.im / d, (1.0 - r2) / d]
            } else {
                // Same formula written in 1/z to keep precision for large |z|.
                let u = z.inv();
                let q = u.norm_sqr();
                let d = 1.0 + q;
                [2.0 * u.re / d, -2.0 * u.im / d, (q - 1.0) / d]
            };
            SpherePoint::new(&p).unwrap()
        }
    }
}

/// Inverse of [`stereo_lift`].
pub fn stereo_project(p: &SpherePoint) -> ChartPoint {
    let x = p.coords();
    let w = Complex64::new(x[0], x[1]);
    if x[2] >= 0.0 {
        ChartPoint::Finite(w / (1.0 + x[2]))
    } else {
        let den = w.conj();
        if den.norm_sqr() == 0.0 {
            ChartPoint::Infinity
        } else {
            ChartPoint::Finite((1.0 - x[2]) / den)
        }
    }
}

/// Chordal distance between the lifts of two chart points.
pub fn chordal_distance(a: ChartPoint, b: ChartPoint) -> f64 {
    crate::vector::dist(stereo_lift(a).coords(), stereo_lift(b).coords())
}

/// Identifies a point of the equatorial plane `x₃ = 0` with `x₁ + i x₂`.
pub fn disc_coordinate(x: &[f64]) -> Complex64 {
    Complex64::new(x[0], x[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    #[test]
    fn origin_lifts_to_north_pole() {
        let p = stereo_lift(ChartPoint::new(0.0, 0.0));
        assert_eq!(p.coords(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn unit_circle_lifts_to_equator() {
        let p = stereo_lift(ChartPoint::new(1.0, 0.0));
        assert!(vector::max_abs_diff(p.coords(), &[1.0, 0.0, 0.0]) < 1e-16);
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, k as f64 * 0.4);
            assert!(stereo_lift(z.into()).coords()[2].abs() < 1e-15);
        }
    }

    #[test]
    fn infinity_is_south_pole() {
        let p = stereo_lift(ChartPoint::Infinity);
        assert_eq!(p.coords(), &[0.0, 0.0, -1.0]);
        assert!(stereo_project(&p).is_infinite());
        let far = stereo_lift(ChartPoint::new(1e9, 0.0));
        assert!(vector::dist(far.coords(), p.coords()) < 1e-8);
    }

    #[test]
    fn disc_lifts_to_upper_hemisphere() {
        assert!(stereo_lift(ChartPoint::new(0.3, -0.5)).coords()[2] > 0.0);
        assert!(stereo_lift(ChartPoint::new(3.0, -0.5)).coords()[2] < 0.0);
    }

    #[test]
    fn round_trip() {
        for (re, im) in [
            (0.0, 0.0),
            (0.3, 0.4),
            (-2.0, 5.0),
            (1e-8, -3e-9),
            (1e6, 2e6),
        ] {
            let z = Complex64::new(re, im);
            let back = stereo_project(&stereo_lift(z.into())).finite().unwrap();
            assert!((back - z).norm() <= 1e-12 * (1.0 + z.norm_sqr()));
        }
    }
}
