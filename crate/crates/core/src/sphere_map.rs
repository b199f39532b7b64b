//! Black-box endomorphisms of S^n.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mobius::{MobiusMap, SpherePoint};
use crate::vector;

/// A measurable map S^n → S^n given by point evaluation.
///
/// Implementations must be pure: the same input always produces the same
/// output, and evaluation may happen from many threads at once.
pub trait SphereMap: Send + Sync {
    /// Ambient dimension `n + 1`.
    fn dim(&self) -> usize;

    /// Writes the image of the unit vector `x` into `out`. The result does
    /// not need to be normalised; [`SphereMap::eval_into`] takes care of it.
    fn eval_raw(&self, x: &[f64], out: &mut [f64]) -> Result<()>;

    fn is_continuous(&self) -> bool {
        true
    }

    fn describe(&self) -> String;

    fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.eval_raw(x, out)?;
        let r = vector::norm(out);
        if !r.is_finite() || r == 0.0 {
            return Err(Error::MapEval(format!(
                "{} produced a degenerate image at {x:?}",
                self.describe()
            )));
        }
        out.iter_mut().for_each(|v| *v /= r);
        Ok(())
    }

    fn eval(&self, p: &SpherePoint) -> Result<SpherePoint> {
        let mut out = vector::zeros(self.dim());
        self.eval_into(p.coords(), &mut out)?;
        SpherePoint::new(&out)
    }
}

impl<T: SphereMap + ?Sized> SphereMap for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval_raw(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        (**self).eval_raw(x, out)
    }
    fn is_continuous(&self) -> bool {
        (**self).is_continuous()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityMap {
    pub dim: usize,
}

impl SphereMap for IdentityMap {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval_raw(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        out.copy_from_slice(x);
        Ok(())
    }
    fn describe(&self) -> String {
        "identity".into()
    }
}

impl SphereMap for MobiusMap {
    fn dim(&self) -> usize {
        MobiusMap::dim(self)
    }
    fn eval_raw(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        out.copy_from_slice(&self.apply(x));
        Ok(())
    }
    fn describe(&self) -> String {
        format!(
            "mobius(w={:?}, det={})",
            self.translation_part().coords(),
            self.det_sign()
        )
    }
}

/// `post ∘ inner ∘ pre`.
pub struct Conjugated {
    pub post: MobiusMap,
    pub inner: Arc<dyn SphereMap>,
    pub pre: MobiusMap,
}

impl SphereMap for Conjugated {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval_raw(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let y = self.pre.apply(x);
        let y = SpherePoint::new(&y)?;
        let mut mid = vector::zeros(self.dim());
        self.inner.eval_into(y.coords(), &mut mid)?;
        out.copy_from_slice(&self.post.apply(&mid));
        Ok(())
    }
    fn is_continuous(&self) -> bool {
        self.inner.is_continuous()
    }
    fn describe(&self) -> String {
        format!("conjugate of {}", self.inner.describe())
    }
}

/// Wraps a closure as a sphere map.
pub struct FnMap<F> {
    dim: usize,
    name: String,
    continuous: bool,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Send + Sync,
{
    pub fn new(dim: usize, name: impl Into<String>, continuous: bool, f: F) -> Self {
        FnMap {
            dim,
            name: name.into(),
            continuous,
            f,
        }
    }
}

impl<F> SphereMap for FnMap<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval_raw(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        (self.f)(x, out)
    }
    fn is_continuous(&self) -> bool {
        self.continuous
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// Identity on `{x₁ >= 0}` and the antipodal map on `{x₁ < 0}`: a map with
/// a jump along the great sphere `x₁ = 0` whose pushforward of η₀ has no
/// atoms.
#[derive(Debug, Clone, Copy)]
pub struct HalfSphereFold {
    pub dim: usize,
}

impl SphereMap for HalfSphereFold {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval_raw(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let s = if x[0] >= 0.0 { 1.0 } else { -1.0 };
        for (o, v) in out.iter_mut().zip(x) {
            *o = s * v;
        }
        Ok(())
    }
    fn is_continuous(&self) -> bool {
        false
    }
    fn describe(&self) -> String {
        "half-sphere fold".into()
    }
}

/// A map known only at sample points, evaluated by nearest neighbour.
#[derive(Debug, Clone)]
pub struct TabulatedMap {
    dim: usize,
    sources: Vec<f64>,
    targets: Vec<f64>,
}

impl TabulatedMap {
    pub fn new(dim: usize, pairs: Vec<(SpherePoint, SpherePoint)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidMap("empty table".into()));
        }
        let mut sources = Vec::with_capacity(dim * pairs.len());
        let mut targets = Vec::with_capacity(dim * pairs.len());
        for (s, t) in &pairs {
            if s.dim() != dim || t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim().max(t.dim()),
                });
            }
            sources.extend_from_slice(s.coords());
            targets.extend_from_slice(t.coords());
        }
        Ok(TabulatedMap {
            dim,
            sources,
            targets,
        })
    }

    /// Samples `phi` at the given sphere points.
    pub fn sample(phi: &dyn SphereMap, points: impl Iterator<Item = SpherePoint>) -> Result<Self> {
        let pairs = points
            .map(|p| phi.eval(&p).map(|q| (p, q)))
            .collect::<Result<Vec<_>>>()?;
        TabulatedMap::new(phi.dim(), pairs)
    }
}

impl SphereMap for TabulatedMap {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval_raw(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let best = self
            .sources
            .chunks_exact(self.dim)
            .enumerate()
            .map(|(i, s)| (i, vector::dot(s, x)))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
            .0;
        out.copy_from_slice(&self.targets[self.dim * best..self.dim * (best + 1)]);
        Ok(())
    }
    fn is_continuous(&self) -> bool {
        false
    }
    fn describe(&self) -> String {
        format!("tabulated ({} samples)", self.sources.len() / self.dim)
    }
}
