//! Probability measures on S^n, represented as finitely many atoms plus a
//! density with respect to η₀ sampled at quadrature nodes.
//!
//! Integrals against a measure are finite sums; pushforwards move the
//! support points and keep the masses, so they are exact for Möbius maps.

use crate::error::{Error, Result};
use crate::mobius::{self, BallPoint, MobiusMap, SpherePoint};
use crate::quadrature::QuadratureRule;
use crate::sphere_map::SphereMap;
use crate::vector::{self, Vector};

/// Total mass tolerance for a probability measure.
pub const MASS_TOL: f64 = 1e-10;

/// Points closer than this are the same atom.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

/// Default cap on `|w|` for kernel-form harmonic measures.
pub const DEFAULT_R_MAX: f64 = 0.999;

/// Absolutely continuous part: density values at weighted nodes. The mass
/// carried by node `i` is `weights[i] * density[i]`.
#[derive(Debug, Clone)]
pub struct DensityPart {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    density: Vec<f64>,
}

impl DensityPart {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, dim: usize, i: usize) -> &[f64] {
        &self.nodes[dim * i..dim * (i + 1)]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }
}

#[derive(Debug, Clone)]
pub struct SphereMeasure {
    dim: usize,
    atoms: Vec<(SpherePoint, f64)>,
    density: Option<DensityPart>,
}

/// Result of the admissibility test: every atom (after merging coincident
/// points) must have mass strictly below 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    pub admissible: bool,
    /// Heaviest merged atom, if any atom exists.
    pub heaviest: Option<(SpherePoint, f64)>,
}

impl Admissibility {
    pub fn offender(&self) -> Option<&(SpherePoint, f64)> {
        if self.admissible {
            None
        } else {
            self.heaviest.as_ref()
        }
    }
}

impl SphereMeasure {
    /// A purely atomic measure. Masses must be positive and sum to one.
    pub fn from_atoms(dim: usize, atoms: Vec<(SpherePoint, f64)>) -> Result<Self> {
        Self::new(dim, atoms, None)
    }

    /// Atoms plus a density sampled at the nodes of `rule`. The density is
    /// rescaled so that the total mass is one.
    pub fn with_density(
        rule: &QuadratureRule,
        atoms: Vec<(SpherePoint, f64)>,
        density: Vec<f64>,
    ) -> Result<Self> {
        if density.len() != rule.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} density values for {} nodes",
                density.len(),
                rule.len()
            )));
        }
        if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidMeasure(
                "density must be finite and nonnegative".into(),
            ));
        }
        let atom_mass: f64 = atoms.iter().map(|a| a.1).sum();
        let raw: f64 = density.iter().zip(rule.weights()).map(|(d, w)| d * w).sum();
        let target = 1.0 - atom_mass;
        if raw <= 0.0 || target <= 0.0 {
            return Err(Error::InvalidMeasure(format!(
                "density mass {raw} cannot be scaled to {target}"
            )));
        }
        let scale = target / raw;
        let part = DensityPart {
            nodes: rule.nodes().flatten().copied().collect(),
            weights: rule.weights().to_vec(),
            density: density.iter().map(|d| d * scale).collect(),
        };
        Self::new(rule.dim(), atoms, Some(part))
    }

    fn new(
        dim: usize,
        atoms: Vec<(SpherePoint, f64)>,
        density: Option<DensityPart>,
    ) -> Result<Self> {
        for (p, m) in &atoms {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if !(m.is_finite() && *m > 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "atom mass {m} is not positive"
                )));
            }
        }
        let mu = SphereMeasure {
            dim,
            atoms,
            density,
        };
        let total = mu.total_mass();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!(
                "total mass {total} is not 1"
            )));
        }
        Ok(mu)
    }

    /// η₀ sampled on the rule: no atoms, density one at every node.
    pub fn uniform(rule: &QuadratureRule) -> Self {
        SphereMeasure {
            dim: rule.dim(),
            atoms: Vec::new(),
            density: Some(DensityPart {
                nodes: rule.nodes().flatten().copied().collect(),
                weights: rule.weights().to_vec(),
                density: vec![1.0; rule.len()],
            }),
        }
    }

    /// η_w in kernel form: density `harmonic_density(w, ·)` at the rule nodes,
    /// left unnormalised so quadrature error stays visible in the mass.
    pub fn harmonic(w: &BallPoint, rule: &QuadratureRule, r_max: f64) -> Result<Self> {
        let radius = w.norm();
        if radius > r_max {
            return Err(Error::RadiusExceeded { radius, r_max });
        }
        let density = rule.nodes().map(|x| harmonic_density(w, x)).collect();
        Ok(SphereMeasure {
            dim: rule.dim(),
            atoms: Vec::new(),
            density: Some(DensityPart {
                nodes: rule.nodes().flatten().copied().collect(),
                weights: rule.weights().to_vec(),
                density,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(SpherePoint, f64)] {
        &self.atoms
    }

    pub fn density_part(&self) -> Option<&DensityPart> {
        self.density.as_ref()
    }

    /// Number of support points (atoms plus density nodes).
    pub fn support_len(&self) -> usize {
        self.atoms.len() + self.density.as_ref().map_or(0, |d| d.len())
    }

    /// Every support point with the mass it carries.
    pub fn points(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        let atoms = self.atoms.iter().map(|(p, m)| (p.coords(), *m));
        let dim = self.dim;
        let dens = self.density.iter().flat_map(move |d| {
            d.nodes
                .chunks_exact(dim)
                .zip(d.weights.iter().zip(&d.density))
                .map(|(x, (w, f))| (x, w * f))
        });
        atoms.chain(dens)
    }

    pub fn total_mass(&self) -> f64 {
        self.points().map(|(_, m)| m).sum()
    }

    /// `∫ ζ dμ`.
    pub fn mean(&self) -> Vector {
        let mut acc = vector::zeros(self.dim);
        for (x, m) in self.points() {
            vector::axpy(&mut acc, m, x);
        }
        acc
    }

    /// `∫ f dμ` for a scalar function.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.points().map(|(x, m)| m * f(x)).sum()
    }

    pub fn largest_atom(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).fold(0.0, f64::max)
    }

    /// `g_*μ`: support points are moved by `g`, masses are unchanged.
    pub fn pushforward(&self, g: &MobiusMap) -> SphereMeasure {
        let atoms = self
            .atoms
            .iter()
            .map(|(p, m)| (g.apply_sphere(p), *m))
            .collect();
        let density = self.density.as_ref().map(|d| {
            let mut nodes = Vec::with_capacity(d.nodes.len());
            for x in d.nodes.chunks_exact(self.dim) {
                let y = g.apply(x);
                let r = vector::norm(&y);
                nodes.extend(y.iter().map(|v| v / r));
            }
            DensityPart { nodes, ..d.clone() }
        });
        SphereMeasure {
            dim: self.dim,
            atoms,
            density,
        }
    }

    /// `φ_*μ` for a general sphere map; the density part stays a density
    /// part carried by the image nodes.
    pub fn pushforward_map(&self, phi: &dyn SphereMap) -> Result<SphereMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|(p, m)| phi.eval(p).map(|q| (q, *m)))
            .collect::<Result<Vec<_>>>()?;
        let density = match &self.density {
            None => None,
            Some(d) => {
                let mut nodes = vec![0.0; d.nodes.len()];
                for (x, y) in d
                    .nodes
                    .chunks_exact(self.dim)
                    .zip(nodes.chunks_exact_mut(self.dim))
                {
                    phi.eval_into(x, y)?;
                }
                Some(DensityPart { nodes, ..d.clone() })
            }
        };
        Ok(SphereMeasure {
            dim: self.dim,
            atoms,
            density,
        })
    }
}

/// `((1-|w|²)/|ζ-w|²)^n`: density of η_w with respect to η₀.
pub fn harmonic_density(w: &BallPoint, zeta: &[f64]) -> f64 {
    let n = (zeta.len() - 1) as i32;
    let s = vector::norm_sq(w.coords());
    let d = vector::norm_sq(&vector::sub(zeta, w.coords()));
    ((1.0 - s) / d).powi(n)
}

/// Admissibility of a measure: atoms closer than [`ATOM_MERGE_TOL`] are
/// merged first.
pub fn check_admissible(mu: &SphereMeasure) -> Admissibility {
    let mut flat = Vec::with_capacity(mu.atoms.len() * mu.dim);
    let mut masses = Vec::with_capacity(mu.atoms.len());
    for (p, m) in &mu.atoms {
        flat.extend_from_slice(p.coords());
        masses.push(*m);
    }
    heaviest_cluster(mu.dim, &flat, &masses)
}

/// Merges points within [`ATOM_MERGE_TOL`] of each other (transitively) and
/// reports the heaviest cluster.
pub(crate) fn heaviest_cluster(dim: usize, points: &[f64], masses: &[f64]) -> Admissibility {
    let n = masses.len();
    if n == 0 {
        return Admissibility {
            admissible: true,
            heaviest: None,
        };
    }
    let pt = |i: usize| &points[dim * i..dim * (i + 1)];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pt(a)[0].total_cmp(&pt(b)[0]).then(a.cmp(&b)));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for a in 0..n {
        let i = order[a];
        for &j in &order[a + 1..] {
            if pt(j)[0] - pt(i)[0] >= ATOM_MERGE_TOL {
                break;
            }
            if vector::dist(pt(i), pt(j)) < ATOM_MERGE_TOL {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut cluster_mass = vec![0.0; n];
    for (i, m) in masses.iter().enumerate() {
        let r = find(&mut parent, i);
        cluster_mass[r] += m;
    }
    let (best, mass) =
        cluster_mass.iter().enumerate().fold(
            (0, 0.0),
            |acc, (i, m)| if *m > acc.1 { (i, *m) } else { acc },
        );
    let point = SpherePoint::new(pt(best)).expect("support point on the sphere");
    Admissibility {
        admissible: mass < 0.5,
        heaviest: Some((point, mass)),
    }
}

/// `∫ test dφ_*η_base`, computed in pullback form
/// `Σᵢ wᵢ · test(φ(g_base(ξᵢ)))` over the rule nodes `ξᵢ`.
pub fn pushforward_functional<T>(
    phi: &dyn SphereMap,
    base: &BallPoint,
    out_dim: usize,
    test: T,
    rule: &QuadratureRule,
) -> Result<Vector>
where
    T: Fn(&[f64], &mut [f64]),
{
    let dim = rule.dim();
    let mut acc = vector::zeros(out_dim);
    let mut moved = vector::zeros(dim);
    let mut image = vector::zeros(dim);
    let mut val = vector::zeros(out_dim);
    for (x, w) in rule.nodes().zip(rule.weights()) {
        mobius::gw_into(base.coords(), x, &mut moved);
        let r = vector::norm(&moved);
        moved.iter_mut().for_each(|v| *v /= r);
        phi.eval_into(&moved, &mut image)
            .map_err(|e| Error::MapEval(e.to_string()))?;
        test(&image, &mut val);
        vector::axpy(&mut acc, *w, &val);
    }
    Ok(acc)
}

/// `∫ test dη_w` in kernel form `Σᵢ wᵢ · test(ξᵢ) · harmonic_density(w, ξᵢ)`.
pub fn kernel_functional<T>(w: &BallPoint, out_dim: usize, test: T, rule: &QuadratureRule) -> Vector
where
    T: Fn(&[f64], &mut [f64]),
{
    rule.integrate_vector(out_dim, |x, out| {
        test(x, out);
        let k = harmonic_density(w, x);
        out.iter_mut().for_each(|v| *v *= k);
    })
}
