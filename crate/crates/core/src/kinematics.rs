//! Finite-deformation bookkeeping at a material point.
//!
//! Gradients follow the convention `(∇u)_{ij} = ∂_j u_i`, so the deformation
//! gradient of `φ = Id + u` is `F = I + ∇u`.

use crate::error::{Error, Result};
use crate::numerics::{loglog_slope, Mat3, Vec3};

/// Smallest admissible Jacobian; motions below it are treated as inverted.
pub const MIN_JACOBIAN: f64 = 1e-12;

/// Deformation gradient `F = ∇φ` of a positively oriented motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationGradient(Mat3);

impl DeformationGradient {
    pub fn new(f: Mat3) -> Result<Self> {
        let det = f.determinant();
        if !(det > MIN_JACOBIAN) {
            return Err(Error::Orientation { det, min: MIN_JACOBIAN });
        }
        Ok(Self(f))
    }

    /// `F = I + ∇u`.
    pub fn from_displacement_gradient(grad_u: &Mat3) -> Result<Self> {
        Self::new(Mat3::identity() + grad_u)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn jacobian(&self) -> f64 {
        self.0.determinant()
    }

    /// `F^{-T}`; cannot fail once the orientation check has passed.
    pub fn inverse_transpose(&self) -> Mat3 {
        self.0
            .try_inverse()
            .expect("orientation-checked F is invertible")
            .transpose()
    }
}

/// Right Cauchy–Green tensor, material strain and Jacobian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainState {
    pub c: Mat3,
    pub e: Mat3,
    pub j: f64,
}

pub fn deformation_state(f: &DeformationGradient) -> StrainState {
    let c = f.0.transpose() * f.0;
    StrainState {
        c,
        e: 0.5 * (c - Mat3::identity()),
        j: f.jacobian(),
    }
}

/// First Piola–Kirchhoff stress `J·T·F^{-T}` of a Cauchy stress `T`.
pub fn piola_transform(t: &Mat3, f: &DeformationGradient) -> Mat3 {
    f.jacobian() * t * f.inverse_transpose()
}

/// Inverse of [`piola_transform`]: `T = J^{-1}·T^{PK}·F^T`.
pub fn inverse_piola_transform(t_pk: &Mat3, f: &DeformationGradient) -> Mat3 {
    t_pk * f.0.transpose() / f.jacobian()
}

/// Mass conservation `ρ = ρ⁰ / J`.
pub fn material_density(rho0: f64, j: f64) -> Result<f64> {
    if !(j > 0.0) {
        return Err(Error::Orientation { det: j, min: 0.0 });
    }
    if rho0 < 0.0 {
        return Err(crate::error::invalid(format!("negative density {rho0}")));
    }
    Ok(rho0 / j)
}

/// Weighted spatial normal `J·F^{-T}·ν` (i.e. `ν^s dS^s/dS`).
pub fn surface_element_transform(f: &DeformationGradient, nu: &Vec3) -> Result<Vec3> {
    if (nu.norm() - 1.0).abs() > 1e-10 {
        return Err(crate::error::invalid("surface normal must be a unit vector"));
    }
    Ok(f.jacobian() * f.inverse_transpose() * nu)
}

/// Outcome of [`linearization_check`].
#[derive(Debug, Clone)]
pub struct LinearizationReport {
    pub epsilons: Vec<f64>,
    /// max over samples of `|det(I+ε∇u) − (1+ε∇·u)|`
    pub jacobian_residuals: Vec<f64>,
    /// max over samples of `‖(I+ε∇u)^{-T} − (I − ε∇u^T)‖_∞`
    pub inverse_residuals: Vec<f64>,
    pub jacobian_slope: Option<f64>,
    pub inverse_slope: Option<f64>,
}

impl LinearizationReport {
    /// Both remainders are second order (or identically zero).
    pub fn passes(&self, min_slope: f64) -> bool {
        let ok = |res: &[f64], slope: Option<f64>| {
            res.iter().all(|r| *r == 0.0) || slope.is_some_and(|s| s >= min_slope)
        };
        ok(&self.jacobian_residuals, self.jacobian_slope)
            && ok(&self.inverse_residuals, self.inverse_slope)
    }
}

/// Checks the first-order expansions of `J` and `F^{-T}` on sampled
/// displacement gradients.
pub fn linearization_check(grad_samples: &[Mat3], epsilons: &[f64]) -> Result<LinearizationReport> {
    let mut jres = Vec::with_capacity(epsilons.len());
    let mut ires = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(crate::error::invalid(format!("epsilon {eps} outside (0, 0.5)")));
        }
        let mut jmax: f64 = 0.0;
        let mut imax: f64 = 0.0;
        for g in grad_samples {
            let f = DeformationGradient::from_displacement_gradient(&(eps * g))?;
            jmax = jmax.max((f.jacobian() - (1.0 + eps * g.trace())).abs());
            let lin = Mat3::identity() - eps * g.transpose();
            imax = imax.max((f.inverse_transpose() - lin).amax());
        }
        jres.push(jmax);
        ires.push(imax);
    }
    Ok(LinearizationReport {
        epsilons: epsilons.to_vec(),
        jacobian_slope: loglog_slope(epsilons, &jres),
        inverse_slope: loglog_slope(epsilons, &ires),
        jacobian_residuals: jres,
        inverse_residuals: ires,
    })
}
