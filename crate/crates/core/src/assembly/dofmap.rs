use super::mesh::{CompositeMesh, FaceTag};
use crate::error::{invalid, Result};
use crate::numerics::Vec3;
use nalgebra::{DMatrix, DVector};

/// The `+` node of a slipping pair: `u⁺ = (ν·u⁻)ν + a t₁ + b t₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlipNode {
    pub plus: usize,
    pub minus: usize,
    pub nu: Vec3,
    pub t1: Vec3,
    pub t2: Vec3,
    /// Reduced indices of `a` and `b`.
    pub dofs: [usize; 2],
    pub tag: FaceTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiDof {
    Interior(usize),
    Boundary(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub n_nodes: usize,
    pub n_u: usize,
    /// Row `3·node + i` of the map from reduced to nodal displacements.
    pub u_rows: Vec<Vec<(usize, f64)>>,
    pub slip: Vec<SlipNode>,
    /// Potential dof of every node; split pairs share one.
    pub phi: Vec<Option<PhiDof>>,
    pub n_phi_interior: usize,
    pub n_phi_boundary: usize,
    /// Node representing each boundary potential dof.
    pub phi_boundary_nodes: Vec<usize>,
}

/// Orthonormal tangents completing `nu`.
pub fn tangent_frame(nu: &Vec3) -> (Vec3, Vec3) {
    let seed = if nu.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let t1 = (seed - nu * nu.dot(&seed)).normalize();
    (t1, nu.cross(&t1))
}

impl DofMap {
    pub fn build(mesh: &CompositeMesh, with_potential: bool) -> Result<Self> {
        mesh.validate()?;
        let nn = mesh.nodes.len();
        let body = mesh.body_nodes();
        let pairs = mesh.split_pairs();
        let mut slave = vec![None; nn];
        for (k, p) in pairs.iter().enumerate() {
            slave[p.plus] = Some(k);
        }
        let mut base = vec![usize::MAX; nn];
        let mut n_u = 0;
        let mut slip = Vec::new();
        for node in 0..nn {
            if !body[node] {
                continue;
            }
            if let Some(k) = slave[node] {
                let p = pairs[k];
                let nu = mesh.patches[p.patch].normal_at(&mesh.nodes[node]);
                let (t1, t2) = tangent_frame(&nu);
                slip.push(SlipNode { plus: node, minus: p.minus, nu, t1, t2, dofs: [n_u, n_u + 1], tag: p.tag });
                n_u += 2;
            } else {
                base[node] = n_u;
                n_u += 3;
            }
        }
        let mut u_rows = vec![Vec::new(); 3 * nn];
        for node in 0..nn {
            if base[node] != usize::MAX {
                for i in 0..3 {
                    u_rows[3 * node + i] = vec![(base[node] + i, 1.0)];
                }
            }
        }
        for s in &slip {
            let mb = base[s.minus];
            for i in 0..3 {
                let mut row: Vec<(usize, f64)> = (0..3).map(|k| (mb + k, s.nu[i] * s.nu[k])).collect();
                row.push((s.dofs[0], s.t1[i]));
                row.push((s.dofs[1], s.t2[i]));
                u_rows[3 * s.plus + i] = row;
            }
        }

        let mut phi = vec![None; nn];
        let (mut ni, mut nb) = (0, 0);
        let mut phi_boundary_nodes = Vec::new();
        if with_potential {
            let rep = mesh.merged_node();
            let outer = mesh.outer_boundary_nodes();
            for node in 0..nn {
                if rep[node] == node {
                    phi[node] = Some(if outer[node] {
                        phi_boundary_nodes.push(node);
                        nb += 1;
                        PhiDof::Boundary(nb - 1)
                    } else {
                        ni += 1;
                        PhiDof::Interior(ni - 1)
                    });
                }
            }
            for node in 0..nn {
                phi[node] = phi[rep[node]];
            }
        }
        Ok(Self { n_nodes: nn, n_u, u_rows, slip, phi, n_phi_interior: ni, n_phi_boundary: nb, phi_boundary_nodes })
    }

    /// Nodal displacements from reduced dofs.
    pub fn expand(&self, q: &DVector<f64>) -> Vec<Vec3> {
        (0..self.n_nodes)
            .map(|n| {
                Vec3::from_fn(|i, _| self.u_rows[3 * n + i].iter().map(|&(j, c)| c * q[j]).sum())
            })
            .collect()
    }

    /// `Tᵀ g` for a nodal covector `g`.
    pub fn restrict(&self, g: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.n_u);
        for (r, row) in self.u_rows.iter().enumerate() {
            for &(j, c) in row {
                out[j] += c * g[r];
            }
        }
        out
    }

    /// Reduced dofs interpolating a nodal field: free nodes take their value,
    /// slipping nodes the tangential part of theirs.
    pub fn sample(&self, field: &[Vec3]) -> Result<DVector<f64>> {
        if field.len() != self.n_nodes {
            return Err(invalid("nodal field has the wrong length"));
        }
        let mut q = DVector::zeros(self.n_u);
        for (r, row) in self.u_rows.iter().enumerate() {
            if let [(j, c)] = row.as_slice() {
                if *c == 1.0 {
                    q[*j] = field[r / 3][r % 3];
                }
            }
        }
        for s in &self.slip {
            q[s.dofs[0]] = s.t1.dot(&field[s.plus]);
            q[s.dofs[1]] = s.t2.dot(&field[s.plus]);
        }
        Ok(q)
    }

    /// Dense transform from reduced to nodal displacements.
    pub fn transform(&self) -> DMatrix<f64> {
        let mut t = DMatrix::zeros(3 * self.n_nodes, self.n_u);
        for (r, row) in self.u_rows.iter().enumerate() {
            for &(j, c) in row {
                t[(r, j)] += c;
            }
        }
        t
    }

    /// `max |(u⁺ − u⁻)·ν|` over slipping pairs.
    pub fn normal_jump(&self, q: &DVector<f64>) -> f64 {
        let u = self.expand(q);
        self.slip.iter().map(|s| (u[s.plus] - u[s.minus]).dot(&s.nu).abs()).fold(0.0, f64::max)
    }

    /// Tangential jump `u⁺ − u⁻` at each slipping pair.
    pub fn tangential_jump(&self, q: &DVector<f64>) -> Vec<Vec3> {
        let u = self.expand(q);
        self.slip.iter().map(|s| u[s.plus] - u[s.minus]).collect()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi_interior + self.n_phi_boundary
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_orthonormal() {
        for nu in [Vec3::x(), Vec3::new(0.3, -0.4, 0.866).normalize(), -Vec3::z()] {
            let (a, b) = tangent_frame(&nu);
            assert!(a.dot(&nu).abs() < 1e-15 && b.dot(&nu).abs() < 1e-15 && a.dot(&b).abs() < 1e-15);
            assert!((a.norm() - 1.0).abs() < 1e-15 && (a.cross(&b) - nu).norm() < 1e-15);
        }
    }
}
