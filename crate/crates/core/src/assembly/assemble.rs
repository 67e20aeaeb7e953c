use super::dofmap::{DofMap, PhiDof};
use super::element::{cell_quadrature, face_quadrature, QuadPoint};
use super::mesh::{Cell, CompositeMesh, FaceTag, RegionKind};
use super::model::{not_hydrostatic, EarthModel, Material, PrestressField};
use crate::elastica::Tensor4;
use crate::error::{invalid, Error, Result};
use crate::numerics::{cross_matrix, Mat3, Vec3};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Reduced matrices of the second-order action
/// `A₂ = ½u̇ᵀMu̇ + ½u̇ᵀCu − ½uᵀKu − φᵀBu − ½φᵀPφ − fᵀu`
/// over displacement dofs `u` and interior potential dofs `φ`.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub dofs: DofMap,
    pub m: DMatrix<f64>,
    pub c: DMatrix<f64>,
    /// Full stiffness: volume, gravity Hessian, surface and folded potential parts.
    pub k: DMatrix<f64>,
    pub k_surface: DMatrix<f64>,
    /// Stiffness from boundary potential values `φ_B = N u`.
    pub k_potential: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub f: DVector<f64>,
    /// Boundary potential operator on nodal displacements.
    pub n_boundary: DMatrix<f64>,
}

impl SystemMatrices {
    pub fn n_u(&self) -> usize {
        self.dofs.n_u
    }

    pub fn n_phi(&self) -> usize {
        self.p.nrows()
    }

    /// Potential dofs solving the discrete Poisson block for `u`.
    pub fn potential_of(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        if self.n_phi() == 0 {
            return Ok(DVector::zeros(0));
        }
        let ch = self.p.clone().cholesky().ok_or_else(|| Error::Singular("singular matrix".into()))?;
        Ok(-ch.solve(&(&self.b * q)))
    }

    /// `K − BᵀP⁻¹B`, the stiffness with the potential eliminated.
    pub fn k_effective(&self) -> Result<DMatrix<f64>> {
        if self.n_phi() == 0 {
            return Ok(self.k.clone());
        }
        let ch = self.p.clone().cholesky().ok_or_else(|| Error::Singular("singular matrix".into()))?;
        Ok(&self.k - self.b.transpose() * ch.solve(&self.b))
    }

    /// Discrete second-order action.
    pub fn quadratic_action(&self, q: &DVector<f64>, phi: &DVector<f64>, qdot: &DVector<f64>) -> f64 {
        0.5 * qdot.dot(&(&self.m * qdot)) + 0.5 * qdot.dot(&(&self.c * q)) - 0.5 * q.dot(&(&self.k * q))
            - phi.dot(&(&self.b * q))
            - 0.5 * phi.dot(&(&self.p * phi))
            - self.f.dot(q)
    }

    /// Gradients of the quadratic action with respect to `u`, `φ` and `u̇`.
    pub fn action_gradient(
        &self,
        q: &DVector<f64>,
        phi: &DVector<f64>,
        qdot: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let gq = 0.5 * self.c.transpose() * qdot - &self.k * q - self.b.transpose() * phi - &self.f;
        let gphi = -(&self.b * q) - &self.p * phi;
        let gdot = &self.m * qdot + 0.5 * &self.c * q;
        (gq, gphi, gdot)
    }

    /// Static solution of `K_eff u = −f`.
    pub fn static_solve(&self) -> Result<(DVector<f64>, DVector<f64>)> {
        let k = self.k_effective()?;
        let q = k.lu().solve(&(-&self.f)).ok_or_else(|| Error::Singular("singular matrix".into()))?;
        let phi = self.potential_of(&q)?;
        Ok((q, phi))
    }

    /// Potential at every node from `u` and interior potential dofs.
    pub fn nodal_potential(&self, q: &DVector<f64>, phi: &DVector<f64>) -> Vec<f64> {
        let map = &self.dofs;
        let mut phi_b = DVector::zeros(map.n_phi_boundary);
        if map.n_phi_boundary > 0 {
            let u = nodal_vector(map, q);
            phi_b = &self.n_boundary * u;
        }
        map.phi
            .iter()
            .map(|d| match d {
                Some(PhiDof::Interior(i)) => phi[*i],
                Some(PhiDof::Boundary(i)) => phi_b[*i],
                None => 0.0,
            })
            .collect()
    }
}

/// Nodal displacement vector (length `3·nodes`).
pub fn nodal_vector(map: &DofMap, q: &DVector<f64>) -> DVector<f64> {
    let u = map.expand(q);
    DVector::from_iterator(3 * map.n_nodes, u.iter().flat_map(|v| [v.x, v.y, v.z]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VolumeForm {
    /// `∇u:Λ:∇v` with the full prestressed tensor.
    General,
    /// `∇u:Γ:∇v` minus the pressure-gradient form of the hydrostatic Lagrangian.
    Hydrostatic,
}

struct CellBlock {
    nodes: Vec<usize>,
    m: DMatrix<f64>,
    c: DMatrix<f64>,
    k: DMatrix<f64>,
    f: DVector<f64>,
    /// `B[a, (b,k)] = ∫ρ⁰ N_b ∂_k N_a`, rows are local potential nodes.
    b: DMatrix<f64>,
    p: DMatrix<f64>,
}

pub(crate) fn prestress_at(model: &EarthModel, cell: &Cell, qp: &QuadPoint, fluid: bool) -> Result<Mat3> {
    let t0 = model.prestress.at(&qp.x, &cell.nodes, &qp.n);
    if fluid {
        let dev = t0 - Mat3::identity() * (t0.trace() / 3.0);
        if dev.amax() > 1e-12 * t0.amax().max(1.0) {
            return Err(invalid("prestress in a fluid region must be a pure pressure"));
        }
    }
    Ok(t0)
}

fn cell_block(model: &EarthModel, mesh: &CompositeMesh, cell: &Cell, form: VolumeForm) -> Result<CellBlock> {
    let coords = mesh.cell_coords(cell);
    let qps = cell_quadrature(cell.kind, &coords)?;
    let nn = cell.nodes.len();
    let material = &model.materials[cell.region];
    let gamma = material.gamma()?;
    let fluid = material.is_fluid();
    let omega = cross_matrix(&model.omega);
    let mut blk = CellBlock {
        nodes: cell.nodes.clone(),
        m: DMatrix::zeros(3 * nn, 3 * nn),
        c: DMatrix::zeros(3 * nn, 3 * nn),
        k: DMatrix::zeros(3 * nn, 3 * nn),
        f: DVector::zeros(3 * nn),
        b: DMatrix::zeros(nn, 3 * nn),
        p: DMatrix::zeros(nn, nn),
    };
    for qp in &qps {
        if let Some(g) = model.g {
            let s = qp.w / (4.0 * PI * g);
            for a in 0..nn {
                for b in 0..nn {
                    blk.p[(a, b)] += s * qp.grad[a].dot(&qp.grad[b]);
                }
            }
        }
        let Some(gamma) = &gamma else { continue };
        let rho = material.density(&qp.x);
        let t0 = prestress_at(model, cell, qp, fluid)?;
        let stiff: Tensor4 = match form {
            VolumeForm::General => model.tensors(gamma, &t0)?.lambda,
            VolumeForm::Hydrostatic => gamma.clone(),
        };
        let hess = rho * model.potential_hessian(&qp.x);
        let fgrad = model.force.as_ref().map(|f| rho * (f.gradient)(&qp.x)).unwrap_or_default();
        let gp = match form {
            VolumeForm::Hydrostatic => model.prestress.pressure_gradient(&cell.nodes, &qp.grad).ok_or_else(not_hydrostatic)?,
            VolumeForm::General => Vec3::zeros(),
        };
        let w = qp.w;
        for a in 0..nn {
            let na = qp.n[a];
            let ga = qp.grad[a];
            for i in 0..3 {
                blk.f[3 * a + i] += w * na * fgrad[i];
            }
            if model.g.is_some() {
                for b in 0..nn {
                    for k in 0..3 {
                        blk.b[(a, 3 * b + k)] += w * rho * qp.n[b] * ga[k];
                    }
                }
            }
            for b in 0..nn {
                let nb = qp.n[b];
                let gb = qp.grad[b];
                let nab = w * na * nb;
                for i in 0..3 {
                    blk.m[(3 * a + i, 3 * b + i)] += rho * nab;
                    for k in 0..3 {
                        blk.c[(3 * a + i, 3 * b + k)] += 2.0 * rho * nab * omega[(i, k)];
                        let mut s = 0.0;
                        for j in 0..3 {
                            for l in 0..3 {
                                s += ga[j] * stiff.get(i, j, k, l) * gb[l];
                            }
                        }
                        let mut kv = w * s + nab * hess[(i, k)];
                        if form == VolumeForm::Hydrostatic {
                            // polarised ∇p⁰·((∇u)u − (∇·u)u)
                            let q = 0.5 * (gp[i] * nb * ga[k] + gp[k] * na * gb[i] - gp[i] * na * gb[k] - gp[k] * nb * ga[i]);
                            kv -= w * q;
                        }
                        blk.k[(3 * a + i, 3 * b + k)] += kv;
                    }
                }
            }
        }
    }
    Ok(blk)
}

/// Pressure `p⁰ = −tr T⁰/3` at a face point from the side's nodes.
pub(crate) fn face_pressure(field: &PrestressField, x: &Vec3, nodes: &[usize], n: &[f64]) -> f64 {
    -field.at(x, nodes, n).trace() / 3.0
}

/// Surface bilinear form `∫ p⁰[u·W·v + ν·∇^Σu·v + ν·∇^Σv·u]⁺₋` of one face,
/// returned per side as local blocks over that side's nodes.
pub(crate) fn surface_blocks(model: &EarthModel, mesh: &CompositeMesh, fi: usize) -> Result<Vec<(Vec<usize>, DMatrix<f64>)>> {
    let face = &mesh.faces[fi];
    let patch = &mesh.patches[face.patch.ok_or_else(|| invalid(format!("face {fi} has no patch geometry")))?];
    let nn = face.minus.len();
    let coords: Vec<Vec3> = face.minus.iter().map(|&n| mesh.nodes[n]).collect();
    let qps = face_quadrature(&coords)?;
    let mut out = Vec::new();
    for (nodes, sign) in [(&face.minus, -1.0), (&face.plus, 1.0)] {
        let mut k = DMatrix::zeros(3 * nn, 3 * nn);
        for qp in &qps {
            let y = patch.project(&qp.x);
            let nu = patch.normal_at(&y);
            let w = patch.weingarten_at(&y);
            let proj = Mat3::identity() - nu * nu.transpose();
            let p = face_pressure(&model.prestress, &qp.x, nodes, &qp.n);
            let pm = face_pressure(&model.prestress, &qp.x, &face.minus, &qp.n);
            let pp = face_pressure(&model.prestress, &qp.x, &face.plus, &qp.n);
            if (pp - pm).abs() > 1e-10 * pp.abs().max(pm.abs()).max(1.0) {
                return Err(invalid(format!("p⁰ jumps across FS face {fi}")));
            }
            let sg: Vec<Vec3> = qp.grad.iter().map(|g| proj * g).collect();
            let s = sign * p * qp.w;
            for a in 0..nn {
                for b in 0..nn {
                    let nab = qp.n[a] * qp.n[b];
                    for i in 0..3 {
                        for j in 0..3 {
                            k[(3 * a + i, 3 * b + j)] +=
                                s * (nab * w[(i, j)] + qp.n[a] * nu[j] * sg[b][i] + qp.n[b] * nu[i] * sg[a][j]);
                        }
                    }
                }
            }
        }
        out.push((nodes.clone(), k));
    }
    Ok(out)
}

fn scatter_uu(map: &DofMap, nodes: &[usize], local: &DMatrix<f64>, out: &mut DMatrix<f64>) {
    for (a, &na) in nodes.iter().enumerate() {
        for i in 0..3 {
            let row = &map.u_rows[3 * na + i];
            if row.is_empty() {
                continue;
            }
            for (b, &nb) in nodes.iter().enumerate() {
                for k in 0..3 {
                    let v = local[(3 * a + i, 3 * b + k)];
                    if v == 0.0 {
                        continue;
                    }
                    for &(r, cr) in row {
                        for &(c, cc) in &map.u_rows[3 * nb + k] {
                            out[(r, c)] += cr * cc * v;
                        }
                    }
                }
            }
        }
    }
}

/// Quadrature point, weight `ρ⁰ w`, and the `(node, shape value)` pairs there.
type PointSource = (Vec3, f64, Vec<(usize, f64)>);

/// Boundary potential operator: `Φ¹(x_b) = −G ∫ρ⁰u·(x_b − x′)/|x_b − x′|³`.
fn boundary_operator(model: &EarthModel, mesh: &CompositeMesh, map: &DofMap) -> Result<DMatrix<f64>> {
    let nb = map.n_phi_boundary;
    let nfull = 3 * mesh.nodes.len();
    let Some(g) = model.g else { return Ok(DMatrix::zeros(0, nfull)) };
    let mut sources: Vec<PointSource> = Vec::new();
    for cell in &mesh.cells {
        if mesh.region_kind(cell.region) == RegionKind::Vacuum {
            continue;
        }
        let mat = &model.materials[cell.region];
        for qp in cell_quadrature(cell.kind, &mesh.cell_coords(cell))? {
            let rho = mat.density(&qp.x);
            if rho != 0.0 {
                sources.push((qp.x, rho * qp.w, cell.nodes.iter().copied().zip(qp.n.iter().copied()).collect()));
            }
        }
    }
    let rows: Vec<Vec<f64>> = map
        .phi_boundary_nodes
        .par_iter()
        .map(|&bn| {
            let xb = mesh.nodes[bn];
            let mut row = vec![0.0; nfull];
            for (x, wr, shape) in &sources {
                let d = xb - x;
                let r3 = d.norm().powi(3);
                for &(n, s) in shape {
                    for k in 0..3 {
                        row[3 * n + k] -= g * wr * s * d[k] / r3;
                    }
                }
            }
            row
        })
        .collect();
    let mut n = DMatrix::zeros(nb, nfull);
    for (b, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            n[(b, j)] = *v;
        }
    }
    Ok(n)
}

pub fn assemble(model: &EarthModel, mesh: &CompositeMesh) -> Result<SystemMatrices> {
    assemble_with(model, mesh, VolumeForm::General, true)
}

pub(crate) fn assemble_with(model: &EarthModel, mesh: &CompositeMesh, form: VolumeForm, surface: bool) -> Result<SystemMatrices> {
    model.check_regions(mesh.regions.len())?;
    for (r, region) in mesh.regions.iter().enumerate() {
        let ok = matches!(
            (region.kind, &model.materials[r]),
            (RegionKind::Solid, Material::Solid { .. }) | (RegionKind::Fluid, Material::Fluid { .. }) | (RegionKind::Vacuum, Material::Vacuum)
        );
        if !ok {
            return Err(invalid(format!("material of region {} does not match its kind", region.name)));
        }
    }
    let map = DofMap::build(mesh, model.g.is_some())?;
    let nu = map.n_u;
    let blocks: Vec<CellBlock> =
        mesh.cells.par_iter().map(|c| cell_block(model, mesh, c, form)).collect::<Result<_>>()?;
    let fs: Vec<usize> = mesh.faces.iter().enumerate().filter(|(_, f)| f.tag == FaceTag::FluidSolid).map(|(i, _)| i).collect();
    let sblocks: Vec<Vec<(Vec<usize>, DMatrix<f64>)>> = if surface {
        fs.par_iter().map(|&fi| surface_blocks(model, mesh, fi)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut m = DMatrix::zeros(nu, nu);
    let mut c = DMatrix::zeros(nu, nu);
    let mut k = DMatrix::zeros(nu, nu);
    let mut k_surface = DMatrix::zeros(nu, nu);
    let nfull = 3 * mesh.nodes.len();
    let mut f_full = vec![0.0; nfull];
    let (ni, nb) = (map.n_phi_interior, map.n_phi_boundary);
    let mut b_i = DMatrix::zeros(ni, nfull);
    let mut b_b = DMatrix::zeros(nb, nfull);
    let mut p_ii = DMatrix::zeros(ni, ni);
    let mut p_ib = DMatrix::zeros(ni, nb);
    let mut p_bb = DMatrix::zeros(nb, nb);
    for blk in &blocks {
        scatter_uu(&map, &blk.nodes, &blk.m, &mut m);
        scatter_uu(&map, &blk.nodes, &blk.c, &mut c);
        scatter_uu(&map, &blk.nodes, &blk.k, &mut k);
        for (a, &na) in blk.nodes.iter().enumerate() {
            for i in 0..3 {
                f_full[3 * na + i] += blk.f[3 * a + i];
            }
            let Some(pa) = map.phi[na] else { continue };
            for (b, &nbn) in blk.nodes.iter().enumerate() {
                for kk in 0..3 {
                    let v = blk.b[(a, 3 * b + kk)];
                    match pa {
                        PhiDof::Interior(r) => b_i[(r, 3 * nbn + kk)] += v,
                        PhiDof::Boundary(r) => b_b[(r, 3 * nbn + kk)] += v,
                    }
                }
                let v = blk.p[(a, b)];
                match (pa, map.phi[nbn].expect("potential dof on every node")) {
                    (PhiDof::Interior(r), PhiDof::Interior(s)) => p_ii[(r, s)] += v,
                    (PhiDof::Interior(r), PhiDof::Boundary(s)) => p_ib[(r, s)] += v,
                    (PhiDof::Boundary(r), PhiDof::Boundary(s)) => p_bb[(r, s)] += v,
                    (PhiDof::Boundary(_), PhiDof::Interior(_)) => {}
                }
            }
        }
    }
    for sides in &sblocks {
        for (nodes, local) in sides {
            scatter_uu(&map, nodes, local, &mut k_surface);
        }
    }
    k += &k_surface;
    let f = map.restrict(&f_full);

    let n_boundary = boundary_operator(model, mesh, &map)?;
    let mut k_potential = DMatrix::zeros(nu, nu);
    let mut b = DMatrix::zeros(ni, nu);
    if model.g.is_some() {
        let t = map.transform();
        let nt = &n_boundary * &t;
        let bbt = &b_b * &t;
        k_potential = nt.transpose() * &bbt + bbt.transpose() * &nt + nt.transpose() * &p_bb * &nt;
        b = (&b_i + &p_ib * &n_boundary) * &t;
        k += &k_potential;
    }
    Ok(SystemMatrices { dofs: map, m, c, k, k_surface, k_potential, b, p: p_ii, f, n_boundary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::mesh::{CellKind, Region};
    use crate::numerics::max_abs;

    fn unit_cube() -> CompositeMesh {
        let mut nodes = Vec::new();
        for s in [[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.], [0., 0., 1.], [1., 0., 1.], [1., 1., 1.], [0., 1., 1.]] {
            nodes.push(Vec3::new(s[0], s[1], s[2]));
        }
        CompositeMesh {
            nodes,
            cells: vec![Cell { kind: CellKind::Hex8, nodes: (0..8).collect(), region: 0 }],
            regions: vec![Region { name: "solid".into(), kind: RegionKind::Solid }],
            faces: vec![],
            patches: vec![],
        }
    }

    #[test]
    fn single_cube_matches_brute_force() {
        let mesh = unit_cube();
        let model = EarthModel::new(vec![Material::solid(1.0, 5.0 / 3.0, 1.0)]);
        let sys = assemble(&model, &mesh).unwrap();
        assert_eq!(max_abs(&sys.c), 0.0);
        let (kappa, mu) = (5.0 / 3.0, 1.0);
        let lam = kappa - 2.0 * mu / 3.0;
        let g = 1.0 / 3f64.sqrt();
        let corner = |a: usize| [mesh.nodes[a].x * 2.0 - 1.0, mesh.nodes[a].y * 2.0 - 1.0, mesh.nodes[a].z * 2.0 - 1.0];
        let mut oracle = DMatrix::<f64>::zeros(24, 24);
        for &xi in &[-g, g] {
            for &eta in &[-g, g] {
                for &zeta in &[-g, g] {
                    // physical gradient on the unit cube is twice the reference one
                    let dn = |a: usize| {
                        let s = corner(a);
                        let f = [1.0 + s[0] * xi, 1.0 + s[1] * eta, 1.0 + s[2] * zeta];
                        [0.25 * s[0] * f[1] * f[2], 0.25 * s[1] * f[0] * f[2], 0.25 * s[2] * f[0] * f[1]]
                    };
                    for a in 0..8 {
                        for b in 0..8 {
                            let (da, db) = (dn(a), dn(b));
                            for i in 0..3 {
                                for k in 0..3 {
                                    let v = lam * da[i] * db[k]
                                        + mu * da[k] * db[i]
                                        + if i == k { mu * (0..3).map(|j| da[j] * db[j]).sum::<f64>() } else { 0.0 };
                                    oracle[(3 * a + i, 3 * b + k)] += v / 8.0;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(max_abs(&(&sys.k - &oracle)) < 1e-12, "{}", max_abs(&(&sys.k - &oracle)));
        assert!((sys.m.sum() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_gives_skew_coriolis() {
        let mut model = EarthModel::new(vec![Material::solid(2.0, 5.0 / 3.0, 1.0)]);
        model.omega = Vec3::new(0.0, 0.0, 1.0);
        let sys = assemble(&model, &unit_cube()).unwrap();
        assert!(max_abs(&sys.c) > 0.1);
        assert!(max_abs(&(&sys.c + sys.c.transpose())) < 1e-14);
    }

    #[test]
    fn rigid_motions_are_in_the_kernel() {
        let mesh = unit_cube();
        let model = EarthModel::new(vec![Material::solid(1.0, 2.0, 0.7)]);
        let sys = assemble(&model, &mesh).unwrap();
        for r in 0..6 {
            let q = DVector::from_iterator(
                24,
                mesh.nodes.iter().flat_map(|x| {
                    let v = if r < 3 { Vec3::ith(r, 1.0) } else { Vec3::ith(r - 3, 1.0).cross(x) };
                    [v.x, v.y, v.z]
                }),
            );
            assert!((&sys.k * q).amax() < 1e-13);
        }
    }

    #[test]
    fn fluid_with_shear_is_rejected() {
        let mut mesh = unit_cube();
        mesh.regions[0].kind = RegionKind::Fluid;
        let model = EarthModel::new(vec![Material::Fluid { rho: super::super::model::Density::Constant(1.0), kappa: 1.0, mu: 0.5 }]);
        assert!(assemble(&model, &mesh).is_err());
    }
}
