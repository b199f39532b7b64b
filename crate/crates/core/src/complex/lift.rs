//! Sphere maps induced by complex maps.

use std::sync::Arc;

use num_complex::Complex64;

use super::ComplexMap;
use crate::chart::{stereo_lift, stereo_project, ChartPoint};
use crate::error::{Error, Result};
use crate::mobius::SpherePoint;
use crate::sphere_map::SphereMap;

/// `f̂ = S ∘ f ∘ S⁻¹` on S².
#[derive(Clone)]
pub struct HatLift<M: ?Sized> {
    pub map: Arc<M>,
}

impl<M: ComplexMap + ?Sized> HatLift<M> {
    pub fn new(map: Arc<M>) -> Self {
        HatLift { map }
    }
}

impl<M: ComplexMap + ?Sized> SphereMap for HatLift<M> {
    fn dim(&self) -> usize {
        3
    }

    fn eval_raw(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let z = stereo_project(&SpherePoint::new(x)?);
        let w = self.map.eval(z)?;
        out.copy_from_slice(stereo_lift(w).coords());
        Ok(())
    }

    fn describe(&self) -> String {
        format!("hat lift of {}", self.map.describe())
    }
}

/// The boundary map `ζ ↦ f(ζ)` on S¹ of a map preserving the unit circle.
#[derive(Clone)]
pub struct CircleLift<M: ?Sized> {
    pub map: Arc<M>,
}

impl<M: ComplexMap + ?Sized> CircleLift<M> {
    pub fn new(map: Arc<M>) -> Self {
        CircleLift { map }
    }
}

impl<M: ComplexMap + ?Sized> SphereMap for CircleLift<M> {
    fn dim(&self) -> usize {
        2
    }

    fn eval_raw(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        match self.map.eval(ChartPoint::Finite(Complex64::new(x[0], x[1])))? {
            ChartPoint::Finite(w) => {
                out[0] = w.re;
                out[1] = w.im;
                Ok(())
            }
            ChartPoint::Infinity => Err(Error::MapEval(format!(
                "{} has a pole on the unit circle",
                self.map.describe()
            ))),
        }
    }

    fn describe(&self) -> String {
        format!("circle map of {}", self.map.describe())
    }
}
