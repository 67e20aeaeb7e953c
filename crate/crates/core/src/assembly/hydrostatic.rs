use super::assemble::{assemble_with, SystemMatrices, VolumeForm};
use super::mesh::CompositeMesh;
use super::model::{not_hydrostatic, EarthModel};
use crate::error::Result;
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct HydrostaticReport {
    pub k_hyd: DMatrix<f64>,
    pub k_general: DMatrix<f64>,
    /// `‖K_hyd − K_general‖ / ‖K_general‖` in the Frobenius norm.
    pub relative_difference: f64,
    /// Frobenius norm of the general surface block.
    pub surface_block_norm: f64,
}

/// Stiffness from the hydrostatic form `∇u:Γ:∇u − ∇p⁰·((∇u)u − (∇·u)u)`,
/// which has no surface term, alongside the general assembly.
pub fn hydrostatic_assemble(model: &EarthModel, mesh: &CompositeMesh) -> Result<HydrostaticReport> {
    if !model.prestress.is_hydrostatic() {
        return Err(not_hydrostatic());
    }
    let hyd: SystemMatrices = assemble_with(model, mesh, VolumeForm::Hydrostatic, false)?;
    let gen = assemble_with(model, mesh, VolumeForm::General, true)?;
    let diff = (&hyd.k - &gen.k).norm();
    let scale = gen.k.norm();
    Ok(HydrostaticReport {
        relative_difference: if scale > 0.0 { diff / scale } else { diff },
        surface_block_norm: gen.k_surface.norm(),
        k_hyd: hyd.k,
        k_general: gen.k,
    })
}
