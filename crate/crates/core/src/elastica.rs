//! Fourth-order elasticity tensors for prestressed media.
//!
//! Contractions use `(A:G)_{ij} = Σ A_{ijkl} G_{kl}` with `G_{kl} = ∂_l u_k`.

use crate::error::{Error, Result};
use crate::numerics::Mat3;
use nalgebra::Matrix6;

const SYM_TOL: f64 = 1e-14;

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

#[inline]
fn idx(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * 3 + j) * 3 + k) * 3 + l
}

/// Dense fourth-order tensor with symmetry flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    c: [f64; 81],
    pub has_minor_sym: bool,
    pub has_major_sym: bool,
}

impl Default for Tensor4 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl Tensor4 {
    pub fn zeros() -> Self {
        Self { c: [0.0; 81], has_minor_sym: true, has_major_sym: true }
    }

    /// Builds a tensor componentwise; symmetry flags are detected.
    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut c = [0.0; 81];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        c[idx(i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        let mut t = Self { c, has_minor_sym: false, has_major_sym: false };
        t.detect_symmetries();
        t
    }

    /// Voigt order 11, 22, 33, 23, 13, 12. The result has classical symmetries
    /// when `v` is symmetric.
    pub fn from_voigt(v: &Matrix6<f64>) -> Self {
        const V: [[usize; 3]; 3] = [[0, 5, 4], [5, 1, 3], [4, 3, 2]];
        Self::from_fn(|i, j, k, l| v[(V[i][j], V[k][l])])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[idx(i, j, k, l)]
    }

    pub fn components(&self) -> &[f64; 81] {
        &self.c
    }

    /// max |c_ijkl − c_jikl| and |c_ijkl − c_ijlk|
    pub fn minor_residual(&self) -> f64 {
        self.residual(|i, j, k, l| (j, i, k, l))
            .max(self.residual(|i, j, k, l| (i, j, l, k)))
    }

    /// max |c_ijkl − c_jikl|
    pub fn left_minor_residual(&self) -> f64 {
        self.residual(|i, j, k, l| (j, i, k, l))
    }

    /// max |c_ijkl − c_klij|
    pub fn major_residual(&self) -> f64 {
        self.residual(|i, j, k, l| (k, l, i, j))
    }

    fn residual(&self, perm: impl Fn(usize, usize, usize, usize) -> (usize, usize, usize, usize)) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let (a, b, c, d) = perm(i, j, k, l);
                        r = r.max((self.get(i, j, k, l) - self.get(a, b, c, d)).abs());
                    }
                }
            }
        }
        r
    }

    fn scale(&self) -> f64 {
        self.c.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
    }

    fn detect_symmetries(&mut self) {
        let tol = SYM_TOL * self.scale();
        self.has_minor_sym = self.minor_residual() <= tol;
        self.has_major_sym = self.major_residual() <= tol;
    }

    /// Errors unless both minor and major symmetries hold.
    pub fn require_classical(&self, what: &str) -> Result<()> {
        let tol = SYM_TOL * self.scale();
        let (mi, ma) = (self.minor_residual(), self.major_residual());
        if mi > tol || ma > tol {
            return Err(Error::Symmetry(format!(
                "{what}: minor residual {mi:e}, major residual {ma:e}"
            )));
        }
        Ok(())
    }

    /// `A:G`.
    pub fn contract(&self, g: &Mat3) -> Mat3 {
        let mut out = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        s += self.c[idx(i, j, k, l)] * g[(k, l)];
                    }
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    /// `G:A:H`.
    pub fn bilinear(&self, g: &Mat3, h: &Mat3) -> f64 {
        g.component_mul(&self.contract(h)).sum()
    }

    pub fn max_abs_diff(&self, other: &Tensor4) -> f64 {
        self.c.iter().zip(&other.c).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Add for &Tensor4 {
    type Output = Tensor4;
    fn add(self, rhs: &Tensor4) -> Tensor4 {
        Tensor4::from_fn(|i, j, k, l| self.get(i, j, k, l) + rhs.get(i, j, k, l))
    }
}

/// Symmetric equilibrium stress.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prestress(Mat3);

impl Prestress {
    pub fn new(t0: Mat3) -> Result<Self> {
        let asym = (t0 - t0.transpose()).amax();
        if asym > 1e-12 * t0.amax().max(1.0) {
            return Err(Error::Symmetry(format!("prestress asymmetric by {asym:e}")));
        }
        Ok(Self(t0))
    }

    pub fn hydrostatic(p0: f64) -> Self {
        Self(-p0 * Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn pressure(&self) -> f64 {
        -self.0.trace() / 3.0
    }

    pub fn deviatoric(&self) -> Mat3 {
        self.0 + self.pressure() * Mat3::identity()
    }
}

/// Bulk modulus and equilibrium pressure of an elastic fluid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidModuli {
    pub kappa: f64,
    pub p0: f64,
    pub gamma: f64,
}

impl FluidModuli {
    pub fn new(kappa: f64, p0: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(crate::error::invalid(format!("bulk modulus must be positive, got {kappa}")));
        }
        if p0 == 0.0 {
            return Err(crate::error::invalid("adiabatic index undefined at zero pressure"));
        }
        Ok(Self { kappa, p0, gamma: kappa / p0 })
    }
}

/// Convention parameters for splitting the prestress dependence of the
/// elasticity tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrestressParams {
    pub a: f64,
    pub b: f64,
}

impl Default for PrestressParams {
    fn default() -> Self {
        Self { a: 0.5, b: -0.5 }
    }
}

pub fn isotropic_gamma(kappa: f64, mu: f64) -> Result<Tensor4> {
    if !(kappa > 0.0) || !(mu >= 0.0) {
        return Err(crate::error::invalid(format!("moduli must satisfy kappa > 0, mu >= 0 (got {kappa}, {mu})")));
    }
    let lam = kappa - 2.0 * mu / 3.0;
    Ok(Tensor4::from_fn(|i, j, k, l| {
        lam * delta(i, j) * delta(k, l) + mu * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k))
    }))
}

/// `Γ` plus a user-supplied anisotropic part.
pub fn anisotropic_gamma(kappa: f64, mu: f64, aniso: &Tensor4) -> Result<Tensor4> {
    aniso.require_classical("anisotropic elasticity")?;
    Ok(&isotropic_gamma(kappa, mu)? + aniso)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrestressedTensors {
    pub xi: Tensor4,
    pub lambda: Tensor4,
    pub upsilon: Tensor4,
}

pub fn build_prestressed(gamma: &Tensor4, t0: &Prestress, params: PrestressParams) -> Result<PrestressedTensors> {
    gamma.require_classical("Gamma")?;
    let t = t0.matrix();
    let PrestressParams { a, b } = params;
    let xi = Tensor4::from_fn(|i, j, k, l| {
        gamma.get(i, j, k, l)
            + a * (t[(i, j)] * delta(k, l) + t[(k, l)] * delta(i, j))
            + b * (t[(i, k)] * delta(j, l)
                + t[(j, k)] * delta(i, l)
                + t[(i, l)] * delta(j, k)
                + t[(j, l)] * delta(i, k))
    });
    let lambda = Tensor4::from_fn(|i, j, k, l| delta(i, k) * t[(j, l)] + xi.get(i, j, k, l));
    let upsilon = Tensor4::from_fn(|i, j, k, l| {
        lambda.get(i, j, k, l) + t[(i, l)] * delta(k, j) - t[(i, j)] * delta(k, l)
    });
    Ok(PrestressedTensors { xi, lambda, upsilon })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressPerturbations {
    pub tpk1: Mat3,
    pub t1: Mat3,
}

pub fn stress_perturbations(lambda: &Tensor4, upsilon: &Tensor4, grad_u: &Mat3) -> StressPerturbations {
    StressPerturbations { tpk1: lambda.contract(grad_u), t1: upsilon.contract(grad_u) }
}

/// `T¹ = T^{PK1} + T⁰(∇u)ᵀ − T⁰ ∇·u`.
pub fn t1_from_tpk1(tpk1: &Mat3, t0: &Prestress, grad_u: &Mat3) -> Mat3 {
    tpk1 + t0.matrix() * grad_u.transpose() - t0.matrix() * grad_u.trace()
}

/// Incremental Cauchy stress written through the strain and rotation parts of
/// `∇u`; independent of the pressure (`a = −b = 1/2`).
pub fn t1_strain_form(gamma: &Tensor4, t0_dev: &Mat3, grad_u: &Mat3) -> Mat3 {
    let eps = 0.5 * (grad_u + grad_u.transpose());
    let omega = 0.5 * (grad_u - grad_u.transpose());
    gamma.contract(&eps)
        + 0.5 * (-t0_dev * eps.trace() + t0_dev.component_mul(&eps).sum() * Mat3::identity())
        - t0_dev * omega
        + omega * t0_dev
}

pub fn deviatoric_split(t0: &Mat3) -> Result<(f64, Mat3)> {
    let t = Prestress::new(*t0)?;
    Ok((t.pressure(), t.deviatoric()))
}
