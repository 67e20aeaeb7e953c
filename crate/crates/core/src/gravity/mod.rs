//! Self-gravitation: Newtonian potentials, the mass-redistribution potential,
//! monopole splitting, rotation and equilibrium checks.

mod potential;
mod prism;
mod radial;

pub use potential::{solve_phi1, DensityGrid, GridSpec, PotentialSamples};
pub use prism::{box_inverse_distance, box_inverse_square};
pub use radial::{hydrostatic_solve, HydrostaticProfile, RadialDensityModel};

use crate::error::{invalid, Result};
use crate::numerics::{Mat3, Vec3};

/// Gravitational constant in SI units.
pub const G_SI: f64 = 6.67e-11;

/// A compactly supported mass distribution with a computable potential.
pub trait MassDistribution: Sync {
    fn total_mass(&self) -> f64;
    fn gravitational_constant(&self) -> f64;
    /// Radius of a ball about the origin containing the support.
    fn support_radius(&self) -> f64;
    fn potential(&self, x: &Vec3) -> f64;
}

impl MassDistribution for RadialDensityModel {
    fn total_mass(&self) -> f64 {
        RadialDensityModel::total_mass(self)
    }
    fn gravitational_constant(&self) -> f64 {
        RadialDensityModel::gravitational_constant(self)
    }
    fn support_radius(&self) -> f64 {
        self.outer_radius()
    }
    fn potential(&self, x: &Vec3) -> f64 {
        RadialDensityModel::potential(self, x)
    }
}

impl MassDistribution for DensityGrid {
    fn total_mass(&self) -> f64 {
        DensityGrid::total_mass(self)
    }
    fn gravitational_constant(&self) -> f64 {
        self.g
    }
    fn support_radius(&self) -> f64 {
        DensityGrid::support_radius(self)
    }
    fn potential(&self, x: &Vec3) -> f64 {
        DensityGrid::potential(self, x)
    }
}

/// Newtonian potential `−G ∫ ρ(x′)/|x − x′| dV′` of any mass distribution:
/// exact for radial models, quadrature for grids.
pub fn newtonian_potential(source: &impl MassDistribution, x: &Vec3) -> f64 {
    source.potential(x)
}

/// C² cutoff: 1 for `|x| ≤ r`, 0 for `|x| ≥ 2r`, quintic in between.
pub fn cutoff(r_cut: f64, x: &Vec3) -> f64 {
    let t = ((x.norm() - r_cut) / r_cut).clamp(0.0, 1.0);
    1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

/// Monopole part `m(x) = −GM(1 − χ(x))/|x|` of a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monopole {
    pub gm: f64,
    pub r_cut: f64,
}

impl Monopole {
    pub fn value(&self, x: &Vec3) -> f64 {
        let w = 1.0 - cutoff(self.r_cut, x);
        if w == 0.0 {
            0.0
        } else {
            -self.gm * w / x.norm()
        }
    }

    /// Remainder `Φ̃ = Φ − m`, which decays like `|x|⁻²`.
    pub fn remainder(&self, source: &impl MassDistribution, x: &Vec3) -> f64 {
        source.potential(x) - self.value(x)
    }
}

pub fn monopole_decomposition(source: &impl MassDistribution, r_cut: f64) -> Result<Monopole> {
    if !(r_cut > 0.0) {
        return Err(invalid("cutoff radius must be positive"));
    }
    let support = source.support_radius();
    if support > r_cut {
        return Err(invalid(format!("support radius {support} exceeds cutoff radius {r_cut}")));
    }
    Ok(Monopole { gm: source.gravitational_constant() * source.total_mass(), r_cut })
}

/// A radial model translated to a new centre.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedRadial {
    pub model: RadialDensityModel,
    pub centre: Vec3,
}

impl MassDistribution for ShiftedRadial {
    fn total_mass(&self) -> f64 {
        self.model.total_mass()
    }
    fn gravitational_constant(&self) -> f64 {
        self.model.gravitational_constant()
    }
    fn support_radius(&self) -> f64 {
        self.model.outer_radius() + self.centre.norm()
    }
    fn potential(&self, x: &Vec3) -> f64 {
        self.model.potential(&(x - self.centre))
    }
}

/// Centrifugal potential and derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Centrifugal {
    pub psi: f64,
    pub grad: Vec3,
    pub hess: Mat3,
}

/// `Ψ = −½|Ω × x|²`.
pub fn centrifugal(omega: &Vec3, x: &Vec3) -> Centrifugal {
    let w2 = omega.norm_squared();
    Centrifugal {
        psi: -0.5 * (w2 * x.norm_squared() - omega.dot(x).powi(2)),
        grad: omega.cross(&omega.cross(x)),
        hess: omega * omega.transpose() - w2 * Mat3::identity(),
    }
}

/// Pointwise and aggregate misfit of `ρ⁰∇(Φ⁰ + Ψ) = ∇·T⁰`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResidual {
    pub pointwise: Vec<f64>,
    pub max: f64,
    pub l2: f64,
}

pub fn static_equilibrium_residual(
    rho0: &[f64],
    grad_phi0: &[Vec3],
    grad_psi: &[Vec3],
    div_t0: &[Vec3],
) -> Result<EquilibriumResidual> {
    let n = rho0.len();
    if grad_phi0.len() != n || grad_psi.len() != n || div_t0.len() != n {
        return Err(invalid("equilibrium samples have mismatched lengths"));
    }
    let pointwise: Vec<f64> = (0..n)
        .map(|i| (rho0[i] * (grad_phi0[i] + grad_psi[i]) - div_t0[i]).norm())
        .collect();
    Ok(EquilibriumResidual {
        max: pointwise.iter().fold(0.0, |a, b| a.max(*b)),
        l2: pointwise.iter().map(|v| v * v).sum::<f64>().sqrt(),
        pointwise,
    })
}

/// `max |Δ_h Φ − 4πGρ|` over interior nodes of a uniform node grid of shape
/// `n`, using the 7-point Laplacian.
pub fn poisson_residual(phi: &[f64], rho: &[f64], n: [usize; 3], h: f64, g: f64) -> Result<f64> {
    if n.iter().any(|&m| m < 3) {
        return Err(invalid("grid needs at least 3 points per direction"));
    }
    let len = n[0] * n[1] * n[2];
    if phi.len() != len || rho.len() != len {
        return Err(invalid("grid values do not match the grid shape"));
    }
    let id = |i: usize, j: usize, k: usize| (i * n[1] + j) * n[2] + k;
    let mut worst: f64 = 0.0;
    for i in 1..n[0] - 1 {
        for j in 1..n[1] - 1 {
            for k in 1..n[2] - 1 {
                let c = phi[id(i, j, k)];
                let lap = (phi[id(i + 1, j, k)] + phi[id(i - 1, j, k)] + phi[id(i, j + 1, k)] + phi[id(i, j - 1, k)]
                    + phi[id(i, j, k + 1)]
                    + phi[id(i, j, k - 1)]
                    - 6.0 * c)
                    / (h * h);
                worst = worst.max((lap - 4.0 * std::f64::consts::PI * g * rho[id(i, j, k)]).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn node_grid(n: usize, lo: f64, h: f64, f: impl Fn(&Vec3) -> f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    v.push(f(&(Vec3::repeat(lo) + h * Vec3::new(i as f64, j as f64, k as f64))));
                }
            }
        }
        v
    }

    #[test]
    fn centrifugal_examples() {
        let z = centrifugal(&Vec3::zeros(), &Vec3::new(1.0, 2.0, 3.0));
        assert_eq!((z.psi, z.grad), (0.0, Vec3::zeros()));
        let c = centrifugal(&Vec3::new(0.0, 0.0, 2.0), &Vec3::x());
        assert_eq!(c.psi, -2.0);
        assert_eq!(c.grad, Vec3::new(-4.0, 0.0, 0.0));
        assert!((c.hess.trace() + 8.0).abs() < 1e-15);
        assert_eq!(c.hess, c.hess.transpose());
    }

    #[test]
    fn cutoff_limits() {
        let m = Monopole { gm: 3.0, r_cut: 1.0 };
        assert_eq!(m.value(&Vec3::new(0.5, 0.0, 0.0)), 0.0);
        assert_eq!(m.value(&Vec3::new(0.0, 2.5, 0.0)), -3.0 / 2.5);
        // C¹ at the blend ends
        let h = 1e-6;
        let d = |r: f64| (cutoff(1.0, &Vec3::new(r + h, 0.0, 0.0)) - cutoff(1.0, &Vec3::new(r - h, 0.0, 0.0))) / (2.0 * h);
        assert!(d(1.0).abs() < 1e-6 && d(2.0).abs() < 1e-6);
    }

    #[test]
    fn monopole_rejects_small_cutoff() {
        let s = RadialDensityModel::uniform(1.0, 1.0, 1.0).unwrap();
        assert!(monopole_decomposition(&s, 0.5).is_err());
        let m = monopole_decomposition(&s, 1.0).unwrap();
        assert!((m.remainder(&s, &Vec3::new(3.0, 0.0, 0.0))).abs() < 1e-15);
    }

    #[test]
    fn off_centre_remainder_decays_quadratically() {
        let s = ShiftedRadial {
            model: RadialDensityModel::uniform(1.0, 1.0, 1.0).unwrap(),
            centre: Vec3::new(0.25, 0.0, 0.0),
        };
        let m = monopole_decomposition(&s, 1.3).unwrap();
        let dir = Vec3::new(1.0, 0.4, 0.2).normalize();
        let r: Vec<f64> = (0..8).map(|i| 4.0 * 1.3 * 2f64.powf(i as f64 * 3.0 / 7.0)).collect();
        let v: Vec<f64> = r.iter().map(|&t| m.remainder(&s, &(t * dir)).abs()).collect();
        let slope = crate::numerics::loglog_slope(&r, &v).unwrap();
        assert!((-2.3..=-1.9).contains(&slope), "{slope}");
    }

    #[test]
    fn quadratic_interior_potential_satisfies_stencil() {
        let n = 9;
        let h = 0.1;
        let phi = node_grid(n, -0.4, h, |x| 2.0 * PI / 3.0 * x.norm_squared() - 2.0 * PI);
        let rho = vec![1.0; n * n * n];
        assert!(poisson_residual(&phi, &rho, [n, n, n], h, 1.0).unwrap() < 1e-10);
        let wrong = node_grid(n, -0.4, h, |x| (3.0 * x.x).sin() * x.y.exp());
        assert!(poisson_residual(&wrong, &rho, [n, n, n], h, 1.0).unwrap() > 1.0);
        assert!(poisson_residual(&phi[..8], &rho[..8], [2, 2, 2], h, 1.0).is_err());
    }

    #[test]
    fn exterior_residual_is_second_order() {
        let m = RadialDensityModel::uniform(1.0, 1.0, 1.0).unwrap();
        let mut res = Vec::new();
        let hs = [0.2, 0.1, 0.05];
        for &h in &hs {
            let n = 5;
            // same centre (2.5, 2.5, 2.5) at every spacing
            let phi = node_grid(n, 2.5 - 2.0 * h, h, |x| m.potential(x));
            res.push(poisson_residual(&phi, &vec![0.0; n * n * n], [n, n, n], h, 1.0).unwrap());
        }
        let slope = crate::numerics::loglog_slope(&hs, &res).unwrap();
        assert!(slope > 1.8, "{slope}");
    }

    #[test]
    fn hydrostatic_sphere_is_in_equilibrium() {
        let m = RadialDensityModel::uniform(1.0, 1.0, 1.0).unwrap();
        let pts: Vec<Vec3> = (0..20).map(|i| Vec3::new(0.04 * i as f64, 0.02 * i as f64, -0.01 * i as f64)).collect();
        let rho: Vec<f64> = pts.iter().map(|p| m.density_at(p.norm())).collect();
        let gphi: Vec<Vec3> = pts.iter().map(|p| m.potential_gradient(p)).collect();
        let zero = vec![Vec3::zeros(); pts.len()];
        // ∇·(−p⁰I) = −∇p⁰ by central differences of the hydrostatic profile
        let h = 1e-5;
        let div: Vec<Vec3> = pts
            .iter()
            .map(|p| {
                -Vec3::from_fn(|k, _| {
                    let e = Vec3::ith(k, h);
                    (m.pressure((p + e).norm()) - m.pressure((p - e).norm())) / (2.0 * h)
                })
            })
            .collect();
        assert!(static_equilibrium_residual(&rho, &gphi, &zero, &div).unwrap().max < 1e-6);
        assert!(static_equilibrium_residual(&rho, &gphi, &zero, &zero).unwrap().max > 0.1);
        let none = static_equilibrium_residual(&[0.0; 20], &gphi, &zero, &zero).unwrap();
        assert_eq!(none.l2, 0.0);
        assert!(static_equilibrium_residual(&rho[..3], &gphi, &zero, &zero).is_err());
    }

    #[test]
    fn radial_phi1_matches_closed_form() {
        let alpha = 0.1;
        let grid = GridSpec::centred_cube(1.1, 44);
        let ball = |p: &Vec3| if p.norm() <= 1.0 { 1.0 } else { 0.0 };
        let targets = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.3, 0.2, 0.1), Vec3::new(1.6, 0.0, 0.0)];
        let s = solve_phi1(&grid, 6, ball, |p| alpha * p, &targets, 1.0).unwrap();
        for (x, v) in targets.iter().zip(&s.values) {
            let r = x.norm();
            let want = if r < 1.0 { 2.0 * PI * alpha * (1.0 - r * r) } else { 0.0 };
            assert!((v - want).abs() < 1e-3 * 2.0 * PI * alpha, "{r}: {v} vs {want}");
        }
    }

    proptest! {
        #[test]
        fn centrifugal_gradient_matches_differences(
            o in proptest::collection::vec(-2.0..2.0f64, 3),
            x in proptest::collection::vec(-3.0..3.0f64, 3),
        ) {
            let om = Vec3::new(o[0], o[1], o[2]);
            let p = Vec3::new(x[0], x[1], x[2]);
            let h = 1e-5;
            let c = centrifugal(&om, &p);
            for k in 0..3 {
                let e = Vec3::ith(k, h);
                let fd = (centrifugal(&om, &(p + e)).psi - centrifugal(&om, &(p - e)).psi) / (2.0 * h);
                prop_assert!((fd - c.grad[k]).abs() < 1e-8);
            }
            prop_assert!((c.hess.trace() + 2.0 * om.norm_squared()).abs() < 1e-13);
            prop_assert!((c.hess * p - c.grad).norm() < 1e-12);
        }
    }
}
