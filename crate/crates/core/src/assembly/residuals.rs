use super::assemble::{face_pressure, SystemMatrices};
use super::element::{face_quadrature, reference_shape, shape_at};
use super::mesh::{Cell, CellKind, CompositeMesh, FaceTag};
use super::model::EarthModel;
use crate::error::{Error, Result};
use crate::numerics::{Mat3, Vec3};
use nalgebra::DVector;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Sup and area-weighted RMS of one residual family.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualNorm {
    pub sup: f64,
    pub rms: f64,
    area: f64,
}

impl ResidualNorm {
    fn add(&mut self, v: f64, w: f64) {
        self.sup = self.sup.max(v);
        self.rms += w * v * v;
        self.area += w;
    }

    fn finish(&mut self) {
        self.rms = if self.area > 0.0 { (self.rms / self.area).sqrt() } else { 0.0 };
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InterfaceReport {
    /// `[u]·ν` on fluid–solid faces.
    pub normal_jump: ResidualNorm,
    /// `[u]` on welded faces.
    pub displacement_jump: ResidualNorm,
    /// Jump of the modified traction on fluid–solid faces.
    pub fs_traction_jump: ResidualNorm,
    /// `[T^{PK1}]·ν` on welded faces.
    pub ss_traction_jump: ResidualNorm,
    /// `T^{PK1}·ν` on the outer boundary.
    pub exterior_traction: ResidualNorm,
    pub potential_jump: ResidualNorm,
    /// `[∂_jΦ¹ + 4πGρ⁰u_j]ν_j` on every face.
    pub flux_jump: ResidualNorm,
    /// Largest residual on each face, in face order.
    pub per_face: Vec<f64>,
}

/// Reference coordinates of `x` in a cell.
pub(crate) fn locate(kind: CellKind, coords: &[Vec3], x: &Vec3) -> Result<[f64; 3]> {
    let mut xi = match kind {
        CellKind::Hex8 => [0.0; 3],
        CellKind::Tet4 => [0.25; 3],
    };
    for _ in 0..50 {
        let (n, d) = reference_shape(kind, xi);
        let mut r = -x;
        let mut j = Mat3::zeros();
        for ((c, v), g) in coords.iter().zip(&n).zip(&d) {
            r += c * *v;
            j += c * g.transpose();
        }
        let step = j.try_inverse().ok_or_else(|| Error::Singular("singular matrix".into()))? * r;
        for k in 0..3 {
            xi[k] -= step[k];
        }
        if step.norm() < 1e-14 {
            break;
        }
    }
    Ok(xi)
}

struct SideEval {
    u: Vec3,
    rho: f64,
    grad_phi: Vec3,
    lambda_grad: Mat3,
}

fn eval_in_cell(model: &EarthModel, mesh: &CompositeMesh, cell: &Cell, u: &[Vec3], phi: &[f64], x: &Vec3) -> Result<SideEval> {
    let coords = mesh.cell_coords(cell);
    let xi = locate(cell.kind, &coords, x)?;
    let (n, grad, _) = shape_at(cell.kind, &coords, xi)?;
    let mut gu = Mat3::zeros();
    let mut uu = Vec3::zeros();
    let mut gp = Vec3::zeros();
    for (a, &node) in cell.nodes.iter().enumerate() {
        gu += u[node] * grad[a].transpose();
        uu += u[node] * n[a];
        gp += grad[a] * phi[node];
    }
    let material = &model.materials[cell.region];
    let t0 = model.prestress.at(x, &cell.nodes, &n);
    let lambda_grad = match material.gamma()? {
        Some(g) => model.tensors(&g, &t0)?.lambda.contract(&gu),
        None => Mat3::zeros(),
    };
    Ok(SideEval { u: uu, rho: material.density(x), grad_phi: gp, lambda_grad })
}

/// Pointwise residuals of the interface and boundary conditions at face
/// quadrature points, evaluated from the cells on each side.
pub fn interface_residuals(
    model: &EarthModel,
    mesh: &CompositeMesh,
    sys: &SystemMatrices,
    q: &DVector<f64>,
    phi: &DVector<f64>,
) -> Result<InterfaceReport> {
    let u = sys.dofs.expand(q);
    let nodal_phi = sys.nodal_potential(q, phi);
    let mut by_key: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (ci, c) in mesh.cells.iter().enumerate() {
        for lf in c.kind.local_faces() {
            let mut key: Vec<usize> = lf.iter().map(|&i| c.nodes[i]).collect();
            key.sort_unstable();
            by_key.entry(key).or_default().push(ci);
        }
    }
    let find = |nodes: &[usize], exclude: Option<usize>| -> Option<usize> {
        let mut key = nodes.to_vec();
        key.sort_unstable();
        by_key.get(&key).and_then(|cs| cs.iter().copied().find(|&c| Some(c) != exclude))
    };
    let four_pi_g = model.g.map(|g| 4.0 * PI * g).unwrap_or(0.0);
    let mut rep = InterfaceReport::default();
    for face in &mesh.faces {
        let mut face_max = 0.0f64;
        let minus_cell = find(&face.minus, None).ok_or_else(|| Error::Validation {
            invariant: "face adjacency",
            detail: "face without an adjacent cell".into(),
        })?;
        let plus_cell = find(&face.plus, Some(minus_cell));
        let coords: Vec<Vec3> = face.minus.iter().map(|&n| mesh.nodes[n]).collect();
        for qp in face_quadrature(&coords)? {
            let nu = match face.patch {
                Some(p) => mesh.patches[p].normal_at(&mesh.patches[p].project(&qp.x)),
                None => qp.normal,
            };
            let w = qp.w;
            let minus = eval_in_cell(model, mesh, &mesh.cells[minus_cell], &u, &nodal_phi, &qp.x)?;
            let plus = match plus_cell {
                Some(c) => Some(eval_in_cell(model, mesh, &mesh.cells[c], &u, &nodal_phi, &qp.x)?),
                None => None,
            };
            let mut local = Vec::new();
            match face.tag {
                FaceTag::FluidSolid | FaceTag::Fault => {
                    let plus = plus.as_ref().expect("split faces have two sides");
                    let jump = plus.u - minus.u;
                    if face.tag == FaceTag::FluidSolid {
                        rep.normal_jump.add(jump.dot(&nu).abs(), w);
                        local.push(jump.dot(&nu).abs());
                        let proj = Mat3::identity() - nu * nu.transpose();
                        let mut tau = [Vec3::zeros(); 2];
                        for (k, (nodes, side)) in [(&face.minus, &minus), (&face.plus, plus)].into_iter().enumerate() {
                            let p = face_pressure(&model.prestress, &qp.x, nodes, &qp.n);
                            let mut gs = Mat3::zeros();
                            let mut gp = Vec3::zeros();
                            let mut us = Vec3::zeros();
                            let pn: Vec<f64> =
                                nodes.iter().map(|&n| face_pressure(&model.prestress, &mesh.nodes[n], &[n], &[1.0])).collect();
                            for (a, &n) in nodes.iter().enumerate() {
                                let sg = proj * qp.grad[a];
                                gs += u[n] * sg.transpose();
                                gp += sg * pn[a];
                                us += u[n] * qp.n[a];
                            }
                            let div_pu = p * gs.trace() + us.dot(&gp);
                            tau[k] = side.lambda_grad * nu + nu * div_pu - p * (gs.transpose() * nu);
                        }
                        let r = (tau[1] - tau[0]).norm();
                        rep.fs_traction_jump.add(r, w);
                        local.push(r);
                    }
                }
                FaceTag::SolidSolid => {
                    let plus = plus.as_ref().expect("welded faces have two sides");
                    let d = (plus.u - minus.u).norm();
                    rep.displacement_jump.add(d, w);
                    let r = ((plus.lambda_grad - minus.lambda_grad) * nu).norm();
                    rep.ss_traction_jump.add(r, w);
                    local.extend([d, r]);
                }
                FaceTag::Exterior => {
                    let r = (minus.lambda_grad * nu).norm();
                    rep.exterior_traction.add(r, w);
                    local.push(r);
                }
            }
            if model.g.is_some() {
                let side_flux = |s: &SideEval| (s.grad_phi + four_pi_g * s.rho * s.u).dot(&nu);
                let fm = side_flux(&minus);
                // beyond the mesh the potential continues harmonically; only
                // faces with a cell on both sides are checked
                if let Some(p) = &plus {
                    let r = (side_flux(p) - fm).abs();
                    rep.flux_jump.add(r, w);
                    local.push(r);
                }
                let phi_m: f64 = face.minus.iter().zip(&qp.n).map(|(&n, s)| nodal_phi[n] * s).sum();
                let phi_p: f64 = face.plus.iter().zip(&qp.n).map(|(&n, s)| nodal_phi[n] * s).sum();
                rep.potential_jump.add((phi_p - phi_m).abs(), w);
            }
            face_max = local.into_iter().fold(face_max, f64::max);
        }
        rep.per_face.push(face_max);
    }
    for r in [
        &mut rep.normal_jump,
        &mut rep.displacement_jump,
        &mut rep.fs_traction_jump,
        &mut rep.ss_traction_jump,
        &mut rep.exterior_traction,
        &mut rep.potential_jump,
        &mut rep.flux_jump,
    ] {
        r.finish();
    }
    Ok(rep)
}
