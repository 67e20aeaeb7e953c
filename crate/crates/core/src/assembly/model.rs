use crate::elastica::{build_prestressed, isotropic_gamma, anisotropic_gamma, Prestress, PrestressParams, PrestressedTensors, Tensor4};
use crate::error::{invalid, Error, Result};
use crate::gravity::{centrifugal, RadialDensityModel};
use crate::numerics::{Mat3, Vec3};
use std::fmt;
use std::sync::Arc;

pub type ScalarFn = Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>;
pub type TensorFn = Arc<dyn Fn(&Vec3) -> Mat3 + Send + Sync>;

#[derive(Clone)]
pub enum Density {
    Constant(f64),
    Field(ScalarFn),
}

impl Density {
    pub fn at(&self, x: &Vec3) -> f64 {
        match self {
            Density::Constant(r) => *r,
            Density::Field(f) => f(x),
        }
    }
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Constant(r) => write!(f, "Constant({r})"),
            Density::Field(_) => write!(f, "Field(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Material {
    Solid { rho: Density, kappa: f64, mu: f64, aniso: Option<Box<Tensor4>> },
    /// `mu` must be zero; it is kept so configurations can be checked.
    Fluid { rho: Density, kappa: f64, mu: f64 },
    Vacuum,
}

impl Material {
    pub fn solid(rho: f64, kappa: f64, mu: f64) -> Self {
        Material::Solid { rho: Density::Constant(rho), kappa, mu, aniso: None }
    }

    pub fn fluid(rho: f64, kappa: f64) -> Self {
        Material::Fluid { rho: Density::Constant(rho), kappa, mu: 0.0 }
    }

    pub fn density(&self, x: &Vec3) -> f64 {
        match self {
            Material::Solid { rho, .. } | Material::Fluid { rho, .. } => rho.at(x),
            Material::Vacuum => 0.0,
        }
    }

    pub fn gamma(&self) -> Result<Option<Tensor4>> {
        match self {
            Material::Solid { kappa, mu, aniso: None, .. } => isotropic_gamma(*kappa, *mu).map(Some),
            Material::Solid { kappa, mu, aniso: Some(a), .. } => anisotropic_gamma(*kappa, *mu, a).map(Some),
            Material::Fluid { kappa, mu, .. } => {
                if *mu != 0.0 {
                    return Err(invalid(format!("fluid region with shear modulus {mu}")));
                }
                isotropic_gamma(*kappa, 0.0).map(Some)
            }
            Material::Vacuum => Ok(None),
        }
    }

    pub fn is_fluid(&self) -> bool {
        matches!(self, Material::Fluid { .. })
    }
}

/// Equilibrium stress field.
#[derive(Clone)]
pub enum PrestressField {
    Zero,
    Uniform(Mat3),
    /// `T⁰ = −p⁰I` with `p⁰` interpolated from nodal values.
    NodalPressure(Vec<f64>),
    Field(TensorFn),
}

impl fmt::Debug for PrestressField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrestressField::Zero => write!(f, "Zero"),
            PrestressField::Uniform(t) => write!(f, "Uniform({t:?})"),
            PrestressField::NodalPressure(p) => write!(f, "NodalPressure({} nodes)", p.len()),
            PrestressField::Field(_) => write!(f, "Field(..)"),
        }
    }
}

impl PrestressField {
    /// `T⁰` at a point of a cell with shape values `n` over `nodes`.
    pub fn at(&self, x: &Vec3, nodes: &[usize], n: &[f64]) -> Mat3 {
        match self {
            PrestressField::Zero => Mat3::zeros(),
            PrestressField::Uniform(t) => *t,
            PrestressField::NodalPressure(p) => -Mat3::identity() * nodes.iter().zip(n).map(|(&a, w)| p[a] * w).sum::<f64>(),
            PrestressField::Field(f) => f(x),
        }
    }

    /// Gradient of `p⁰` for nodal pressure fields.
    pub fn pressure_gradient(&self, nodes: &[usize], grad: &[Vec3]) -> Option<Vec3> {
        match self {
            PrestressField::NodalPressure(p) => Some(nodes.iter().zip(grad).map(|(&a, g)| p[a] * g).sum()),
            PrestressField::Zero | PrestressField::Uniform(_) => Some(Vec3::zeros()),
            PrestressField::Field(_) => None,
        }
    }

    pub fn is_hydrostatic(&self) -> bool {
        match self {
            PrestressField::Zero | PrestressField::NodalPressure(_) => true,
            PrestressField::Uniform(t) => (t - Mat3::identity() * (t.trace() / 3.0)).amax() == 0.0,
            PrestressField::Field(_) => false,
        }
    }
}

/// Reference potential `Φ⁰` with analytic derivatives.
#[derive(Debug, Clone)]
pub enum Background {
    None,
    Radial(RadialDensityModel),
}

impl Background {
    pub fn value(&self, x: &Vec3) -> f64 {
        match self {
            Background::None => 0.0,
            Background::Radial(m) => m.potential(x),
        }
    }

    pub fn gradient(&self, x: &Vec3) -> Vec3 {
        match self {
            Background::None => Vec3::zeros(),
            Background::Radial(m) => m.potential_gradient(x),
        }
    }

    pub fn hessian(&self, x: &Vec3) -> Mat3 {
        match self {
            Background::None => Mat3::zeros(),
            Background::Radial(m) => m.potential_hessian(x),
        }
    }
}

/// External force potential `Fˢ`.
#[derive(Clone)]
pub struct ForcePotential {
    pub value: ScalarFn,
    pub gradient: VectorFn,
    pub hessian: TensorFn,
}

impl ForcePotential {
    /// `Fˢ = g·x`.
    pub fn linear(g: Vec3) -> Self {
        Self {
            value: Arc::new(move |x| g.dot(x)),
            gradient: Arc::new(move |_| g),
            hessian: Arc::new(|_| Mat3::zeros()),
        }
    }

    /// `Fˢ = ½xᵀAx + g·x` with `A` symmetrised.
    pub fn quadratic(a: Mat3, g: Vec3) -> Self {
        let a = 0.5 * (a + a.transpose());
        Self {
            value: Arc::new(move |x| 0.5 * x.dot(&(a * x)) + g.dot(x)),
            gradient: Arc::new(move |x| a * x + g),
            hessian: Arc::new(move |_| a),
        }
    }
}

impl fmt::Debug for ForcePotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ForcePotential(..)")
    }
}

#[derive(Debug, Clone)]
pub struct EarthModel {
    /// One material per mesh region.
    pub materials: Vec<Material>,
    pub prestress: PrestressField,
    pub params: PrestressParams,
    pub omega: Vec3,
    /// Gravitational constant for self-gravitation; `None` drops `Φ¹`.
    pub g: Option<f64>,
    pub background: Background,
    pub force: Option<ForcePotential>,
}

impl EarthModel {
    pub fn new(materials: Vec<Material>) -> Self {
        Self {
            materials,
            prestress: PrestressField::Zero,
            params: PrestressParams::default(),
            omega: Vec3::zeros(),
            g: None,
            background: Background::None,
            force: None,
        }
    }

    /// Hessian of `Φ⁰ + Ψ`.
    pub fn potential_hessian(&self, x: &Vec3) -> Mat3 {
        self.background.hessian(x) + centrifugal(&self.omega, x).hess
    }

    pub fn potential_gradient(&self, x: &Vec3) -> Vec3 {
        self.background.gradient(x) + centrifugal(&self.omega, x).grad
    }

    /// `Λ`, `Ξ` and `Υ` for a region at a point with prestress `t0`.
    pub fn tensors(&self, gamma: &Tensor4, t0: &Mat3) -> Result<PrestressedTensors> {
        build_prestressed(gamma, &Prestress::new(*t0)?, self.params)
    }

    pub fn check_regions(&self, n: usize) -> Result<()> {
        if self.materials.len() != n {
            return Err(invalid(format!("{} materials for {n} regions", self.materials.len())));
        }
        if let Some(g) = self.g {
            if !(g > 0.0) {
                return Err(invalid("gravitational constant must be positive"));
            }
        }
        for m in &self.materials {
            m.gamma()?;
        }
        Ok(())
    }
}

pub(crate) fn not_hydrostatic() -> Error {
    invalid("prestress is not hydrostatic")
}
