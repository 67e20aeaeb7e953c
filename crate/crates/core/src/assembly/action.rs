use super::assemble::{face_pressure, prestress_at, SystemMatrices};
use super::dofmap::{DofMap, PhiDof};
use super::element::{cell_quadrature, face_quadrature};
use super::mesh::{CompositeMesh, FaceTag, RegionKind};
use super::model::EarthModel;
use crate::error::{invalid, Error, Result};
use crate::gravity::centrifugal;
use crate::numerics::{loglog_slope, Mat3, Vec3};
use crate::surface::{surface_divergence, surface_gradient, SurfacePatch};
use nalgebra::DVector;
use std::f64::consts::PI;

/// Orders of the action expansion. `a2` includes `a2_surface`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActionTerms {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a2_surface: f64,
}

/// Nodal fields of a state `(u, φ, u̇)`.
struct NodalState {
    u: Vec<Vec3>,
    udot: Vec<Vec3>,
    phi: Vec<f64>,
}

/// Boundary potential values by direct quadrature of the dipole kernel.
fn boundary_potential(model: &EarthModel, mesh: &CompositeMesh, map: &DofMap, u: &[Vec3]) -> Result<Vec<f64>> {
    let Some(g) = model.g else { return Ok(Vec::new()) };
    let mut sources: Vec<(Vec3, Vec3)> = Vec::new();
    for cell in mesh.cells.iter().filter(|c| mesh.region_kind(c.region) != RegionKind::Vacuum) {
        for qp in cell_quadrature(cell.kind, &mesh.cell_coords(cell))? {
            let rho = model.materials[cell.region].density(&qp.x);
            let uq: Vec3 = cell.nodes.iter().zip(&qp.n).map(|(&n, s)| u[n] * *s).sum();
            sources.push((qp.x, rho * qp.w * uq));
        }
    }
    Ok(map
        .phi_boundary_nodes
        .iter()
        .map(|&bn| {
            let xb = mesh.nodes[bn];
            -g * sources.iter().map(|(x, m)| m.dot(&(xb - x)) / (xb - x).norm().powi(3)).sum::<f64>()
        })
        .collect())
}

fn nodal_state(model: &EarthModel, mesh: &CompositeMesh, map: &DofMap, q: &DVector<f64>, phi: &DVector<f64>, qdot: &DVector<f64>) -> Result<NodalState> {
    if q.len() != map.n_u || qdot.len() != map.n_u || phi.len() != map.n_phi_interior {
        return Err(invalid("state has the wrong number of dofs"));
    }
    let u = map.expand(q);
    let udot = map.expand(qdot);
    let phib = boundary_potential(model, mesh, map, &u)?;
    let phi = map
        .phi
        .iter()
        .map(|d| match d {
            Some(PhiDof::Interior(i)) => phi[*i],
            Some(PhiDof::Boundary(i)) => phib[*i],
            None => 0.0,
        })
        .collect();
    Ok(NodalState { u, udot, phi })
}

/// Volume and surface action terms by quadrature of the Lagrangian densities.
pub fn action_value(
    model: &EarthModel,
    mesh: &CompositeMesh,
    map: &DofMap,
    q: &DVector<f64>,
    phi: &DVector<f64>,
    qdot: &DVector<f64>,
) -> Result<ActionTerms> {
    let st = nodal_state(model, mesh, map, q, phi, qdot)?;
    let mut t = ActionTerms::default();
    let inv8g = model.g.map(|g| 1.0 / (8.0 * PI * g));
    for cell in &mesh.cells {
        let material = &model.materials[cell.region];
        let gamma = material.gamma()?;
        for qp in cell_quadrature(cell.kind, &mesh.cell_coords(cell))? {
            let w = qp.w;
            let mut u = Vec3::zeros();
            let mut ud = Vec3::zeros();
            let mut gu = Mat3::zeros();
            let mut ph = 0.0;
            let mut gph = Vec3::zeros();
            for (a, &n) in cell.nodes.iter().enumerate() {
                u += st.u[n] * qp.n[a];
                ud += st.udot[n] * qp.n[a];
                gu += st.u[n] * qp.grad[a].transpose();
                ph += st.phi[n] * qp.n[a];
                gph += qp.grad[a] * st.phi[n];
            }
            let g0 = model.background.gradient(&qp.x);
            if let Some(s) = inv8g {
                t.a0 -= w * s * g0.norm_squared();
                t.a1 -= w * 2.0 * s * g0.dot(&gph);
                t.a2 -= w * s * gph.norm_squared();
            }
            let Some(gamma) = &gamma else { continue };
            let rho = material.density(&qp.x);
            let t0 = prestress_at(model, cell, &qp, material.is_fluid())?;
            let lambda = model.tensors(gamma, &t0)?.lambda;
            let cf = centrifugal(&model.omega, &qp.x);
            let pot = model.background.value(&qp.x) + cf.psi;
            let gpot = g0 + cf.grad;
            let hpot = model.potential_hessian(&qp.x);
            let (fs, gfs) = match &model.force {
                Some(f) => ((f.value)(&qp.x), (f.gradient)(&qp.x)),
                None => (0.0, Vec3::zeros()),
            };
            let rot = |v: &Vec3| model.omega.cross(v);
            t.a0 -= w * rho * pot;
            t.a1 += w * (rho * ud.dot(&rot(&qp.x)) - t0.component_mul(&gu).sum() - rho * u.dot(&gpot) - rho * ph - rho * fs);
            t.a2 += w
                * (0.5 * rho * ud.norm_squared() + rho * ud.dot(&rot(&u)) - 0.5 * lambda.bilinear(&gu, &gu)
                    - 0.5 * rho * u.dot(&(hpot * u))
                    - rho * u.dot(&gph)
                    - rho * u.dot(&gfs));
        }
    }
    for (fi, face) in mesh.faces.iter().enumerate().filter(|(_, f)| f.tag == FaceTag::FluidSolid) {
        let patch = &mesh.patches[face.patch.ok_or_else(|| invalid(format!("face {fi} has no patch geometry")))?];
        let coords: Vec<Vec3> = face.minus.iter().map(|&n| mesh.nodes[n]).collect();
        for qp in face_quadrature(&coords)? {
            let y = patch.project(&qp.x);
            let nu = patch.normal_at(&y);
            let wm = patch.weingarten_at(&y);
            let proj = Mat3::identity() - nu * nu.transpose();
            for (nodes, sign) in [(&face.minus, -1.0), (&face.plus, 1.0)] {
                let p = face_pressure(&model.prestress, &qp.x, nodes, &qp.n);
                let mut u = Vec3::zeros();
                let mut gs = Mat3::zeros();
                for (a, &n) in nodes.iter().enumerate() {
                    u += st.u[n] * qp.n[a];
                    gs += st.u[n] * (proj * qp.grad[a]).transpose();
                }
                let dens = -p * (nu.dot(&(gs * u)) + 0.5 * u.dot(&(wm * u)));
                t.a2_surface += sign * qp.w * dens;
            }
        }
    }
    t.a2 += t.a2_surface;
    Ok(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrechetReport {
    /// `max_i |g_i − FD_i| / max_i |g_i|` over all directions.
    pub relative_error: f64,
    pub max_abs_error: f64,
    pub directions: usize,
}

/// Compares the assembled gradient of `A₂` with central differences of the
/// quadrature action in every `u`, `φ` and `u̇` direction.
pub fn frechet_fd_check(
    model: &EarthModel,
    mesh: &CompositeMesh,
    sys: &SystemMatrices,
    q: &DVector<f64>,
    phi: &DVector<f64>,
    qdot: &DVector<f64>,
    h: f64,
) -> Result<FrechetReport> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(invalid(format!("step {h} outside [1e-7, 1e-3]")));
    }
    let (gq, gphi, gdot) = sys.action_gradient(q, phi, qdot);
    let a2 = |q: &DVector<f64>, phi: &DVector<f64>, qdot: &DVector<f64>| -> Result<f64> {
        Ok(action_value(model, mesh, &sys.dofs, q, phi, qdot)?.a2)
    };
    let mut fd = Vec::new();
    let mut an = Vec::new();
    for i in 0..q.len() {
        let (mut p, mut m) = (q.clone(), q.clone());
        p[i] += h;
        m[i] -= h;
        fd.push((a2(&p, phi, qdot)? - a2(&m, phi, qdot)?) / (2.0 * h));
        an.push(gq[i]);
    }
    for i in 0..phi.len() {
        let (mut p, mut m) = (phi.clone(), phi.clone());
        p[i] += h;
        m[i] -= h;
        fd.push((a2(q, &p, qdot)? - a2(q, &m, qdot)?) / (2.0 * h));
        an.push(gphi[i]);
    }
    for i in 0..qdot.len() {
        let (mut p, mut m) = (qdot.clone(), qdot.clone());
        p[i] += h;
        m[i] -= h;
        fd.push((a2(q, phi, &p)? - a2(q, phi, &m)?) / (2.0 * h));
        an.push(gdot[i]);
    }
    let scale = an.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let max_abs_error = an.iter().zip(&fd).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    let relative_error = if scale > 0.0 { max_abs_error / scale } else { max_abs_error };
    Ok(FrechetReport { relative_error, max_abs_error, directions: an.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    pub eps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Fitted order of the remainder; `None` when every residual is zero.
    pub slope: Option<f64>,
}

/// Volume action of the deformation `x + εu` with potential `Φ⁰ + εΦ¹`,
/// internal energy `T⁰:e + ½e:Ξ:e` of the full strain.
pub fn nonlinear_action(
    model: &EarthModel,
    mesh: &CompositeMesh,
    map: &DofMap,
    q: &DVector<f64>,
    phi: &DVector<f64>,
    qdot: &DVector<f64>,
    eps: f64,
) -> Result<f64> {
    let st = nodal_state(model, mesh, map, q, phi, qdot)?;
    let inv8g = model.g.map(|g| 1.0 / (8.0 * PI * g));
    let mut total = 0.0;
    for cell in &mesh.cells {
        let material = &model.materials[cell.region];
        let gamma = material.gamma()?;
        for qp in cell_quadrature(cell.kind, &mesh.cell_coords(cell))? {
            let mut u = Vec3::zeros();
            let mut ud = Vec3::zeros();
            let mut gu = Mat3::zeros();
            let mut ph = 0.0;
            let mut gph = Vec3::zeros();
            for (a, &n) in cell.nodes.iter().enumerate() {
                u += st.u[n] * qp.n[a];
                ud += st.udot[n] * qp.n[a];
                gu += st.u[n] * qp.grad[a].transpose();
                ph += st.phi[n] * qp.n[a];
                gph += qp.grad[a] * st.phi[n];
            }
            let mut dens = 0.0;
            if let Some(s) = inv8g {
                dens -= s * (model.background.gradient(&qp.x) + eps * gph).norm_squared();
            }
            if let Some(gamma) = &gamma {
                let f = Mat3::identity() + eps * gu;
                let det = f.determinant();
                if det <= 0.0 {
                    return Err(Error::Orientation { det, min: 0.0 });
                }
                let e = 0.5 * (f.transpose() * f - Mat3::identity());
                let rho = material.density(&qp.x);
                let t0 = prestress_at(model, cell, &qp, material.is_fluid())?;
                let xi = model.tensors(gamma, &t0)?.xi;
                let energy = t0.component_mul(&e).sum() + 0.5 * xi.bilinear(&e, &e);
                let y = qp.x + eps * u;
                let v = eps * ud;
                let kinetic = 0.5 * v.norm_squared() + v.dot(&model.omega.cross(&y));
                let phi_s = model.background.value(&y) + eps * (ph + eps * gph.dot(&u));
                let psi = centrifugal(&model.omega, &y).psi;
                let fs = model.force.as_ref().map(|f| eps * (f.value)(&y)).unwrap_or(0.0);
                dens += rho * (kinetic - phi_s - psi - fs) - energy;
            }
            total += qp.w * dens;
        }
    }
    Ok(total)
}

/// Fits the order of `|A_nl(ε) − (A₀ + εA₁ + ε²A₂)|` using the volume part
/// of the quadratic action.
pub fn expansion_check(
    model: &EarthModel,
    mesh: &CompositeMesh,
    map: &DofMap,
    q: &DVector<f64>,
    phi: &DVector<f64>,
    qdot: &DVector<f64>,
    eps_list: &[f64],
) -> Result<ExpansionReport> {
    let t = action_value(model, mesh, map, q, phi, qdot)?;
    let a2 = t.a2 - t.a2_surface;
    let mut residuals = Vec::new();
    for &e in eps_list {
        let nl = nonlinear_action(model, mesh, map, q, phi, qdot, e)?;
        residuals.push((nl - (t.a0 + e * t.a1 + e * e * a2)).abs());
    }
    let slope = loglog_slope(eps_list, &residuals);
    Ok(ExpansionReport { eps: eps_list.to_vec(), residuals, slope })
}

/// Integrates the two equivalent surface densities
/// `−p⁰[ν·∇^Σu·u + ½u·W·u]⁺₋` and `[(ν·u)∇^Σ·(p⁰u) + ½p⁰u·W·u]⁺₋`
/// over a patch for smooth two-sided fields.
pub fn surface_form_pair(
    patch: &SurfacePatch,
    p0: &dyn Fn(&Vec3) -> f64,
    u_plus: &dyn Fn(&Vec3) -> Vec3,
    u_minus: &dyn Fn(&Vec3) -> Vec3,
    ns: usize,
    nt: usize,
) -> Result<(f64, f64)> {
    let mut direct = 0.0;
    let mut rewritten = 0.0;
    for pt in patch.quadrature(ns, nt) {
        let nu = patch.normal(pt.s, pt.t);
        let w = patch.weingarten(pt.s, pt.t);
        let p = p0(&pt.x);
        for (u, sign) in [(u_plus, 1.0), (u_minus, -1.0)] {
            let uv = u(&pt.x);
            let gs = surface_gradient(patch, u, pt.s, pt.t)?;
            let pu = |y: &Vec3| p0(y) * u(y);
            let div = surface_divergence(patch, &pu, pt.s, pt.t)?;
            let curv = 0.5 * p * uv.dot(&(w * uv));
            direct += sign * pt.weight * (-p * nu.dot(&(gs * uv)) - curv);
            rewritten += sign * pt.weight * (nu.dot(&uv) * div + curv);
        }
    }
    Ok((direct, rewritten))
}
