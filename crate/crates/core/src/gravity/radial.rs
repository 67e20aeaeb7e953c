use crate::error::{invalid, Error, Result};
use crate::numerics::{Mat3, Vec3};
use std::f64::consts::PI;

/// Piecewise-constant spherically layered density.
///
/// `radii[i]` is the outer radius of layer `i`; the innermost layer starts at
/// the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensityModel {
    radii: Vec<f64>,
    densities: Vec<f64>,
    g: f64,
    /// mass enclosed by each outer radius
    shell_mass: Vec<f64>,
}

impl RadialDensityModel {
    pub fn new(radii: Vec<f64>, densities: Vec<f64>, g: f64) -> Result<Self> {
        if radii.is_empty() || radii.len() != densities.len() {
            return Err(invalid("need one density per layer"));
        }
        let mut prev = 0.0;
        for &r in &radii {
            if !(r > prev) {
                return Err(invalid("layer radii must be strictly increasing and positive"));
            }
            prev = r;
        }
        if densities.iter().any(|d| !(*d >= 0.0)) {
            return Err(invalid("densities must be non-negative"));
        }
        if !(g >= 0.0) {
            return Err(invalid("gravitational constant must be non-negative"));
        }
        let mut shell_mass = Vec::with_capacity(radii.len());
        let mut m = 0.0;
        let mut inner: f64 = 0.0;
        for (r, rho) in radii.iter().zip(&densities) {
            m += 4.0 / 3.0 * PI * rho * (r.powi(3) - inner.powi(3));
            shell_mass.push(m);
            inner = *r;
        }
        Ok(Self { radii, densities, g, shell_mass })
    }

    pub fn uniform(radius: f64, density: f64, g: f64) -> Result<Self> {
        Self::new(vec![radius], vec![density], g)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn gravitational_constant(&self) -> f64 {
        self.g
    }

    pub fn outer_radius(&self) -> f64 {
        *self.radii.last().expect("non-empty")
    }

    pub fn total_mass(&self) -> f64 {
        *self.shell_mass.last().expect("non-empty")
    }

    /// Layer containing radius `r` (boundaries belong to the inner layer).
    pub fn layer_of(&self, r: f64) -> Option<usize> {
        self.radii.iter().position(|&ri| r <= ri)
    }

    fn inner_radius(&self, layer: usize) -> f64 {
        if layer == 0 {
            0.0
        } else {
            self.radii[layer - 1]
        }
    }

    fn inner_mass(&self, layer: usize) -> f64 {
        if layer == 0 {
            0.0
        } else {
            self.shell_mass[layer - 1]
        }
    }

    pub fn density_at(&self, r: f64) -> f64 {
        self.layer_of(r).map_or(0.0, |i| self.densities[i])
    }

    pub fn mass_within(&self, r: f64) -> f64 {
        match self.layer_of(r) {
            None => self.total_mass(),
            Some(i) => {
                let a = self.inner_radius(i);
                self.inner_mass(i) + 4.0 / 3.0 * PI * self.densities[i] * (r.powi(3) - a.powi(3))
            }
        }
    }

    /// Gravitational acceleration magnitude `G M(r) / r²`.
    pub fn gravity(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        self.g * self.mass_within(r) / (r * r)
    }

    /// `g(r)/r`, finite at the centre.
    fn gravity_over_r(&self, r: f64) -> f64 {
        match self.layer_of(r) {
            Some(0) => 4.0 / 3.0 * PI * self.g * self.densities[0],
            _ => self.gravity(r) / r,
        }
    }

    /// Exact potential `Φ(r) = −G M(r)/r − 4πG ∫_r^∞ ρ(s) s ds`.
    pub fn potential_at_radius(&self, r: f64) -> f64 {
        let outer = self.outer_radius();
        if r >= outer {
            return -self.g * self.total_mass() / r;
        }
        let i = self.layer_of(r).expect("inside");
        let mut tail = 0.5 * self.densities[i] * (self.radii[i].powi(2) - r * r);
        for j in i + 1..self.radii.len() {
            tail += 0.5 * self.densities[j] * (self.radii[j].powi(2) - self.radii[j - 1].powi(2));
        }
        let inner = if r == 0.0 { 0.0 } else { -self.g * self.mass_within(r) / r };
        inner - 4.0 * PI * self.g * tail
    }

    pub fn potential(&self, x: &Vec3) -> f64 {
        self.potential_at_radius(x.norm())
    }

    pub fn potential_gradient(&self, x: &Vec3) -> Vec3 {
        self.gravity_over_r(x.norm()) * x
    }

    /// `∇∇Φ = g'(r) x̂x̂ + (g/r)(I − x̂x̂)`, with `g' = 4πGρ − 2g/r`.
    pub fn potential_hessian(&self, x: &Vec3) -> Mat3 {
        let r = x.norm();
        let gr = self.gravity_over_r(r);
        if r == 0.0 {
            return gr * Mat3::identity();
        }
        let n = x / r;
        let nn = n * n.transpose();
        let dg = 4.0 * PI * self.g * self.density_at(r) - 2.0 * gr;
        dg * nn + gr * (Mat3::identity() - nn)
    }

    /// Hydrostatic pressure with `p(R) = 0`, integrated layer by layer in
    /// closed form.
    pub fn pressure(&self, r: f64) -> f64 {
        let Some(i) = self.layer_of(r) else {
            return 0.0;
        };
        let mut p = 0.0;
        for j in (i..self.radii.len()).rev() {
            let lo = if j == i { r } else { self.radii[j - 1] };
            p += self.layer_pressure_drop(j, lo, self.radii[j]);
        }
        p
    }

    /// `∫_lo^hi ρ g ds` within layer `j`.
    fn layer_pressure_drop(&self, j: usize, lo: f64, hi: f64) -> f64 {
        let rho = self.densities[j];
        let a = self.inner_radius(j);
        let c = self.inner_mass(j) - 4.0 / 3.0 * PI * rho * a.powi(3);
        let shell = if c == 0.0 { 0.0 } else { c * (1.0 / lo - 1.0 / hi) };
        rho * self.g * (shell + 2.0 * PI / 3.0 * rho * (hi * hi - lo * lo))
    }

    /// `∇p⁰ = −ρ⁰∇Φ⁰` for the hydrostatic state.
    pub fn pressure_gradient(&self, x: &Vec3) -> Vec3 {
        -self.density_at(x.norm()) * self.potential_gradient(x)
    }
}

/// Sampled hydrostatic pressure profile.
#[derive(Debug, Clone, PartialEq)]
pub struct HydrostaticProfile {
    pub r: Vec<f64>,
    pub p0: Vec<f64>,
    pub g: Vec<f64>,
    pub rho: Vec<f64>,
}

/// Samples `p⁰(r)` on `n` uniformly spaced radii from the centre to the
/// surface. Rotation breaks spherical symmetry and is rejected.
pub fn hydrostatic_solve(model: &RadialDensityModel, omega: &Vec3, n: usize) -> Result<HydrostaticProfile> {
    if omega.norm() != 0.0 {
        return Err(Error::Unsupported("hydrostatic profile of a rotating body".into()));
    }
    if n < 2 {
        return Err(invalid("need at least two sample radii"));
    }
    let outer = model.outer_radius();
    let r: Vec<f64> = (0..n).map(|i| outer * i as f64 / (n - 1) as f64).collect();
    Ok(HydrostaticProfile {
        p0: r.iter().map(|&s| model.pressure(s)).collect(),
        g: r.iter().map(|&s| model.gravity(s)).collect(),
        rho: r.iter().map(|&s| model.density_at(s)).collect(),
        r,
    })
}
