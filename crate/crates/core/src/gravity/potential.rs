use super::prism::{box_inverse_distance, box_inverse_square};
use crate::error::{invalid, Result};
use crate::numerics::Vec3;
use rayon::prelude::*;

/// Uniform Cartesian grid of cells; `origin` is the lower corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: Vec3,
    pub h: f64,
    pub n: [usize; 3],
}

impl GridSpec {
    /// Cube `[-half, half]³` split into `n³` cells.
    pub fn centred_cube(half: f64, n: usize) -> Self {
        Self { origin: Vec3::repeat(-half), h: 2.0 * half / n as f64, n: [n, n, n] }
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n[1] + j) * self.n[2] + k
    }

    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.n[2];
        let j = (idx / self.n[2]) % self.n[1];
        [idx / (self.n[1] * self.n[2]), j, k]
    }

    pub fn centre(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + self.h * Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5)
    }

    pub fn on_boundary(&self, [i, j, k]: [usize; 3]) -> bool {
        i == 0 || j == 0 || k == 0 || i + 1 == self.n[0] || j + 1 == self.n[1] || k + 1 == self.n[2]
    }

    /// Cell averages of `f` by `s³` midpoint supersampling.
    pub fn cell_average<T, F>(&self, s: usize, f: F) -> Vec<T>
    where
        T: Send + Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
        F: Fn(&Vec3) -> T + Sync,
    {
        let sub = self.h / s as f64;
        (0..self.len())
            .into_par_iter()
            .map(|idx| {
                let [i, j, k] = self.ijk(idx);
                let lo = self.origin + self.h * Vec3::new(i as f64, j as f64, k as f64);
                let mut acc = T::default();
                for a in 0..s {
                    for b in 0..s {
                        for c in 0..s {
                            let p = lo + sub * Vec3::new(a as f64 + 0.5, b as f64 + 0.5, c as f64 + 0.5);
                            acc += f(&p);
                        }
                    }
                }
                acc * (1.0 / (s * s * s) as f64)
            })
            .collect()
    }
}

/// Cell-averaged density on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub grid: GridSpec,
    pub rho: Vec<f64>,
    pub g: f64,
}

/// Number of cells (Chebyshev distance) treated with exact box integrals.
const NEAR: i64 = 2;

impl DensityGrid {
    pub fn sample(grid: GridSpec, supersample: usize, g: f64, rho: impl Fn(&Vec3) -> f64 + Sync) -> Self {
        Self { rho: grid.cell_average(supersample, rho), grid, g }
    }

    /// Radius about the origin enclosing every cell with mass.
    pub fn support_radius(&self) -> f64 {
        let g = &self.grid;
        let half_diag = 0.5 * 3f64.sqrt() * g.h;
        self.rho
            .iter()
            .enumerate()
            .filter(|(_, r)| **r != 0.0)
            .map(|(idx, _)| {
                let [i, j, k] = g.ijk(idx);
                g.centre(i, j, k).norm() + half_diag
            })
            .fold(0.0, f64::max)
    }

    pub fn total_mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.h.powi(3)
    }

    fn near(&self, x: &Vec3, idx: usize) -> Option<(Vec3, Vec3)> {
        let g = &self.grid;
        let [i, j, k] = g.ijk(idx);
        let rel = (x - g.origin) / g.h;
        let d = [rel.x.floor() as i64 - i as i64, rel.y.floor() as i64 - j as i64, rel.z.floor() as i64 - k as i64];
        if d.iter().all(|v| v.abs() <= NEAR) {
            let lo = g.origin + g.h * Vec3::new(i as f64, j as f64, k as f64) - x;
            Some((lo, lo + Vec3::repeat(g.h)))
        } else {
            None
        }
    }

    /// `−G ∫ ρ(x′)/|x − x′| dV′`; cells adjacent to `x` use exact box
    /// integrals so targets inside the grid are handled.
    pub fn potential(&self, x: &Vec3) -> f64 {
        let g = &self.grid;
        let vol = g.h.powi(3);
        let mut acc = 0.0;
        for (idx, &rho) in self.rho.iter().enumerate() {
            if rho == 0.0 {
                continue;
            }
            if let Some((lo, hi)) = self.near(x, idx) {
                acc += rho * box_inverse_distance(&lo, &hi);
            } else {
                let [i, j, k] = g.ijk(idx);
                acc += rho * vol / (g.centre(i, j, k) - x).norm();
            }
        }
        -self.g * acc
    }

    pub fn potential_many(&self, xs: &[Vec3]) -> Vec<f64> {
        xs.par_iter().map(|x| self.potential(x)).collect()
    }
}

/// Values (and optional gradients) of a potential at sample points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialSamples {
    pub points: Vec<Vec3>,
    pub values: Vec<f64>,
    pub gradients: Option<Vec<Vec3>>,
}

/// Mass-redistribution potential `Φ¹ = −G ∫ ρ⁰u(x′)·(x − x′)/|x − x′|³ dV′`
/// of a displacement `u`, which solves `ΔΦ¹ = −4πG ∇·(ρ⁰u)` with decay at
/// infinity. The kernel is integrated exactly over cells near each target
/// (principal value in the cell holding it).
pub fn solve_phi1(
    grid: &GridSpec,
    supersample: usize,
    rho0: impl Fn(&Vec3) -> f64 + Sync,
    u: impl Fn(&Vec3) -> Vec3 + Sync,
    targets: &[Vec3],
    gconst: f64,
) -> Result<PotentialSamples> {
    let flux: Vec<Vec3> = grid.cell_average(supersample, |p| rho0(p) * u(p));
    for (idx, f) in flux.iter().enumerate() {
        if f.norm() != 0.0 && grid.on_boundary(grid.ijk(idx)) {
            return Err(invalid("ρ⁰u does not vanish on the grid boundary"));
        }
    }
    let dens = DensityGrid { grid: *grid, rho: vec![0.0; grid.len()], g: gconst };
    let vol = grid.h.powi(3);
    let values = targets
        .par_iter()
        .map(|x| {
            let mut acc = 0.0;
            for (idx, f) in flux.iter().enumerate() {
                if f.norm_squared() == 0.0 {
                    continue;
                }
                // ∫_cell (x − x′)/|x − x′|³ = −∫_box ξ/|ξ|³ with ξ = x′ − x
                let k = if let Some((lo, hi)) = dens.near(x, idx) {
                    -box_inverse_square(&lo, &hi)
                } else {
                    let [i, j, k] = grid.ijk(idx);
                    let d = x - grid.centre(i, j, k);
                    vol * d / d.norm().powi(3)
                };
                acc += f.dot(&k);
            }
            -gconst * acc
        })
        .collect();
    Ok(PotentialSamples { points: targets.to_vec(), values, gradients: None })
}
