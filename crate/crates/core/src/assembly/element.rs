use super::mesh::CellKind;
use crate::error::{Error, Result};
use crate::numerics::{Mat3, Vec3};

/// Quadrature point of a cell with physical shape data.
#[derive(Debug, Clone)]
pub struct QuadPoint {
    pub x: Vec3,
    /// Weight including the Jacobian determinant.
    pub w: f64,
    pub n: Vec<f64>,
    pub grad: Vec<Vec3>,
}

/// Quadrature point of a flat facet.
#[derive(Debug, Clone)]
pub struct FaceQuadPoint {
    pub x: Vec3,
    pub w: f64,
    pub n: Vec<f64>,
    /// In-plane gradients of the shape functions.
    pub grad: Vec<Vec3>,
    /// Unit facet normal following the node ordering.
    pub normal: Vec3,
}

const G2: f64 = 0.577_350_269_189_625_8;

fn hex_reference() -> Vec<([f64; 3], f64)> {
    let mut out = Vec::with_capacity(8);
    for &a in &[-G2, G2] {
        for &b in &[-G2, G2] {
            for &c in &[-G2, G2] {
                out.push(([a, b, c], 1.0));
            }
        }
    }
    out
}

// degree-2 rule on the unit tetrahedron
fn tet_reference() -> Vec<([f64; 3], f64)> {
    let a = 0.585_410_196_624_968_5;
    let b = 0.138_196_601_125_010_5;
    let w = 1.0 / 24.0;
    vec![([b, b, b], w), ([a, b, b], w), ([b, a, b], w), ([b, b, a], w)]
}

const HEX_SIGNS: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// Reference shape values and derivatives.
pub fn reference_shape(kind: CellKind, xi: [f64; 3]) -> (Vec<f64>, Vec<Vec3>) {
    match kind {
        CellKind::Hex8 => {
            let mut n = Vec::with_capacity(8);
            let mut d = Vec::with_capacity(8);
            for s in HEX_SIGNS {
                let f = [1.0 + s[0] * xi[0], 1.0 + s[1] * xi[1], 1.0 + s[2] * xi[2]];
                n.push(0.125 * f[0] * f[1] * f[2]);
                d.push(0.125 * Vec3::new(s[0] * f[1] * f[2], s[1] * f[0] * f[2], s[2] * f[0] * f[1]));
            }
            (n, d)
        }
        CellKind::Tet4 => (
            vec![1.0 - xi[0] - xi[1] - xi[2], xi[0], xi[1], xi[2]],
            vec![Vec3::repeat(-1.0), Vec3::x(), Vec3::y(), Vec3::z()],
        ),
    }
}

/// Physical shape data at a reference point.
pub fn shape_at(kind: CellKind, coords: &[Vec3], xi: [f64; 3]) -> Result<(Vec<f64>, Vec<Vec3>, f64)> {
    let (n, dref) = reference_shape(kind, xi);
    // J_ij = ∂x_i/∂ξ_j
    let mut jac = Mat3::zeros();
    for (x, d) in coords.iter().zip(&dref) {
        jac += x * d.transpose();
    }
    let det = jac.determinant();
    if !(det > 0.0) {
        return Err(Error::Orientation { det, min: 0.0 });
    }
    let jinv_t = jac.try_inverse().ok_or_else(|| Error::Singular("singular matrix".into()))?.transpose();
    let grad = dref.iter().map(|d| jinv_t * d).collect();
    Ok((n, grad, det))
}

pub fn cell_quadrature(kind: CellKind, coords: &[Vec3]) -> Result<Vec<QuadPoint>> {
    let rule = match kind {
        CellKind::Hex8 => hex_reference(),
        CellKind::Tet4 => tet_reference(),
    };
    rule.into_iter()
        .map(|(xi, w)| {
            let (n, grad, det) = shape_at(kind, coords, xi)?;
            let x = coords.iter().zip(&n).map(|(c, v)| c * *v).sum();
            Ok(QuadPoint { x, w: w * det, n, grad })
        })
        .collect()
}

/// Shape data on a triangle or bilinear quad facet. Gradients lie in the
/// local tangent plane at each point.
pub fn face_quadrature(coords: &[Vec3]) -> Result<Vec<FaceQuadPoint>> {
    let pts: Vec<([f64; 2], f64)> = match coords.len() {
        3 => vec![([1.0 / 6.0, 1.0 / 6.0], 1.0 / 6.0), ([2.0 / 3.0, 1.0 / 6.0], 1.0 / 6.0), ([1.0 / 6.0, 2.0 / 3.0], 1.0 / 6.0)],
        4 => {
            let mut v = Vec::new();
            for &a in &[-G2, G2] {
                for &b in &[-G2, G2] {
                    v.push(([a, b], 1.0));
                }
            }
            v
        }
        k => return Err(Error::InvalidArgument(format!("facet with {k} nodes"))),
    };
    pts.into_iter()
        .map(|(r, w)| {
            let (n, dr): (Vec<f64>, Vec<[f64; 2]>) = if coords.len() == 3 {
                (vec![1.0 - r[0] - r[1], r[0], r[1]], vec![[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
            } else {
                let s = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
                let n = s.iter().map(|s| 0.25 * (1.0 + s[0] * r[0]) * (1.0 + s[1] * r[1])).collect();
                let d = s
                    .iter()
                    .map(|s| [0.25 * s[0] * (1.0 + s[1] * r[1]), 0.25 * s[1] * (1.0 + s[0] * r[0])])
                    .collect();
                (n, d)
            };
            let mut t1 = Vec3::zeros();
            let mut t2 = Vec3::zeros();
            for (c, d) in coords.iter().zip(&dr) {
                t1 += c * d[0];
                t2 += c * d[1];
            }
            let cross = t1.cross(&t2);
            let area = cross.norm();
            if !(area > 0.0) {
                return Err(Error::Orientation { det: area, min: 0.0 });
            }
            // dual basis of the tangent plane
            let g = nalgebra::Matrix2::new(t1.dot(&t1), t1.dot(&t2), t2.dot(&t1), t2.dot(&t2));
            let gi = g.try_inverse().ok_or_else(|| Error::Singular("singular matrix".into()))?;
            let d1 = gi[(0, 0)] * t1 + gi[(0, 1)] * t2;
            let d2 = gi[(1, 0)] * t1 + gi[(1, 1)] * t2;
            let grad = dr.iter().map(|d| d[0] * d1 + d[1] * d2).collect();
            let x = coords.iter().zip(&n).map(|(c, v)| c * *v).sum();
            Ok(FaceQuadPoint { x, w: w * area, n, grad, normal: cross / area })
        })
        .collect()
}
