//! Surface calculus on analytic patches: tangential projection, surface
//! gradient and divergence, curvature, jumps and interface tractions.
//!
//! Surface gradients of a field `f` are `(∇^Σ f)_{ij} = ∂^Σ_j f_i`, computed
//! from parametric derivatives as `[f_s f_t] g⁻¹ [σ_s σ_t]ᵀ`.

use crate::error::{invalid, Error, Result};
use crate::numerics::{central_diff4, gauss_legendre_on, Mat3, Vec3};
use nalgebra::{Matrix2, Matrix3x2};
use std::f64::consts::PI;

/// Parametric step for surface derivatives.
const FD_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// `σ = origin + s·e1 + t·e2`, normal `e1 × e2`.
    Plane { origin: Vec3, e1: Vec3, e2: Vec3 },
    /// `σ = c + R(sin s cos t, sin s sin t, cos s)`, outward normal.
    Sphere { centre: Vec3, radius: f64 },
    /// `σ = o + R(cos s·e1 + sin s·e2) + t·axis`, outward normal.
    Cylinder { origin: Vec3, axis: Vec3, e1: Vec3, radius: f64 },
}

/// Analytic surface patch over a parameter rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePatch {
    pub geometry: Geometry,
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
}

/// Quadrature node on a patch with its surface-measure weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub s: f64,
    pub t: f64,
    pub x: Vec3,
    pub weight: f64,
}

impl SurfacePatch {
    pub fn plane(origin: Vec3, e1: Vec3, e2: Vec3, s_range: (f64, f64), t_range: (f64, f64)) -> Result<Self> {
        if e1.cross(&e2).norm() < 1e-12 {
            return Err(invalid("plane spanning vectors are parallel"));
        }
        Ok(Self { geometry: Geometry::Plane { origin, e1, e2 }, s_range, t_range })
    }

    /// Whole sphere.
    pub fn sphere(centre: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("sphere radius must be positive"));
        }
        Ok(Self { geometry: Geometry::Sphere { centre, radius }, s_range: (0.0, PI), t_range: (0.0, 2.0 * PI) })
    }

    pub fn cylinder(origin: Vec3, axis: Vec3, radius: f64, t_range: (f64, f64)) -> Result<Self> {
        if !(radius > 0.0) || axis.norm() == 0.0 {
            return Err(invalid("cylinder needs a positive radius and a nonzero axis"));
        }
        let axis = axis.normalize();
        let trial = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = (trial - trial.dot(&axis) * axis).normalize();
        Ok(Self { geometry: Geometry::Cylinder { origin, axis, e1, radius }, s_range: (0.0, 2.0 * PI), t_range })
    }

    /// Closed patches have no boundary curve.
    pub fn is_closed(&self) -> bool {
        matches!(self.geometry, Geometry::Sphere { .. })
            && (self.s_range.0 - 0.0).abs() < 1e-15
            && (self.s_range.1 - PI).abs() < 1e-15
            && (self.t_range.1 - self.t_range.0 - 2.0 * PI).abs() < 1e-15
    }

    pub fn sigma(&self, s: f64, t: f64) -> Vec3 {
        match self.geometry {
            Geometry::Plane { origin, e1, e2 } => origin + s * e1 + t * e2,
            Geometry::Sphere { centre, radius } => {
                centre + radius * Vec3::new(s.sin() * t.cos(), s.sin() * t.sin(), s.cos())
            }
            Geometry::Cylinder { origin, axis, e1, radius } => {
                let e2 = axis.cross(&e1);
                origin + radius * (s.cos() * e1 + s.sin() * e2) + t * axis
            }
        }
    }

    /// Analytic unit normal at a point of (or near) the surface.
    pub fn normal_at(&self, x: &Vec3) -> Vec3 {
        match self.geometry {
            Geometry::Plane { e1, e2, .. } => e1.cross(&e2).normalize(),
            Geometry::Sphere { centre, .. } => (x - centre).normalize(),
            Geometry::Cylinder { origin, axis, .. } => {
                let d = x - origin;
                (d - d.dot(&axis) * axis).normalize()
            }
        }
    }

    /// Analytic Weingarten map `∇^Σν` at a surface point.
    pub fn weingarten_at(&self, x: &Vec3) -> Mat3 {
        let nu = self.normal_at(x);
        let p = Mat3::identity() - nu * nu.transpose();
        match self.geometry {
            Geometry::Plane { .. } => Mat3::zeros(),
            Geometry::Sphere { radius, .. } => p / radius,
            Geometry::Cylinder { axis, radius, .. } => (p - axis * axis.transpose()) / radius,
        }
    }

    /// Closest point on the underlying surface.
    pub fn project(&self, x: &Vec3) -> Vec3 {
        match self.geometry {
            Geometry::Plane { origin, .. } => {
                let n = self.normal_at(x);
                x - (x - origin).dot(&n) * n
            }
            Geometry::Sphere { centre, radius } => centre + radius * (x - centre).normalize(),
            Geometry::Cylinder { origin, axis, radius, .. } => {
                let d = x - origin;
                let along = d.dot(&axis) * axis;
                origin + along + radius * (d - along).normalize()
            }
        }
    }

    pub fn normal(&self, s: f64, t: f64) -> Vec3 {
        self.normal_at(&self.sigma(s, t))
    }

    pub fn weingarten(&self, s: f64, t: f64) -> Mat3 {
        self.weingarten_at(&self.sigma(s, t))
    }

    /// Tangent vectors `σ_s`, `σ_t`.
    pub fn tangents(&self, s: f64, t: f64) -> (Vec3, Vec3) {
        match self.geometry {
            Geometry::Plane { e1, e2, .. } => (e1, e2),
            Geometry::Sphere { radius, .. } => (
                radius * Vec3::new(s.cos() * t.cos(), s.cos() * t.sin(), -s.sin()),
                radius * Vec3::new(-s.sin() * t.sin(), s.sin() * t.cos(), 0.0),
            ),
            Geometry::Cylinder { axis, e1, radius, .. } => {
                let e2 = axis.cross(&e1);
                (radius * (-s.sin() * e1 + s.cos() * e2), axis)
            }
        }
    }

    /// `[σ_s σ_t] g⁻¹`, i.e. the dual basis used by the chain rule.
    fn dual_basis(&self, s: f64, t: f64) -> Result<Matrix3x2<f64>> {
        let (a, b) = self.tangents(s, t);
        let jac = Matrix3x2::from_columns(&[a, b]);
        let g: Matrix2<f64> = jac.transpose() * jac;
        let det = g.determinant();
        if det <= 1e-14 * g.norm_squared() {
            return Err(Error::InvalidArgument(format!("degenerate parametrization at ({s}, {t})")));
        }
        Ok(jac * g.try_inverse().expect("checked determinant"))
    }

    /// Tensor-product quadrature: Gauss–Legendre in both parameters, except
    /// the periodic sphere longitude and cylinder angle, which use the
    /// trapezoid rule.
    pub fn quadrature(&self, ns: usize, nt: usize) -> Vec<SurfacePoint> {
        let (ss, ws) = match self.geometry {
            Geometry::Cylinder { .. } => periodic(ns, self.s_range),
            _ => gauss_legendre_on(ns, self.s_range.0, self.s_range.1),
        };
        let (ts, wt) = match self.geometry {
            Geometry::Sphere { .. } => periodic(nt, self.t_range),
            _ => gauss_legendre_on(nt, self.t_range.0, self.t_range.1),
        };
        let mut out = Vec::with_capacity(ns * nt);
        for (s, wsi) in ss.iter().zip(&ws) {
            for (t, wti) in ts.iter().zip(&wt) {
                let (a, b) = self.tangents(*s, *t);
                out.push(SurfacePoint { s: *s, t: *t, x: self.sigma(*s, *t), weight: wsi * wti * a.cross(&b).norm() });
            }
        }
        out
    }
}

fn periodic(n: usize, (a, b): (f64, f64)) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / n as f64;
    ((0..n).map(|i| a + (i as f64 + 0.5) * h).collect(), vec![h; n])
}

fn require_unit(nu: &Vec3) -> Result<()> {
    if (nu.norm() - 1.0).abs() > 1e-10 {
        return Err(invalid("normal must be a unit vector"));
    }
    Ok(())
}

/// `f − (f·ν)ν`.
pub fn project_tangential(f: &Vec3, nu: &Vec3) -> Result<Vec3> {
    require_unit(nu)?;
    Ok(f - f.dot(nu) * nu)
}

/// Rows of `m` projected onto the tangent plane: `m(I − νν)`.
pub fn project_rows(m: &Mat3, nu: &Vec3) -> Result<Mat3> {
    require_unit(nu)?;
    Ok(m * (Mat3::identity() - nu * nu.transpose()))
}

/// Surface gradient of a vector field sampled along the patch.
pub fn surface_gradient(patch: &SurfacePatch, f: &dyn Fn(&Vec3) -> Vec3, s: f64, t: f64) -> Result<Mat3> {
    let dual = patch.dual_basis(s, t)?;
    let fs: Vec3 = central_diff4(|q| f(&patch.sigma(q, t)), s, FD_STEP);
    let ft: Vec3 = central_diff4(|q| f(&patch.sigma(s, q)), t, FD_STEP);
    Ok(Matrix3x2::from_columns(&[fs, ft]) * dual.transpose())
}

/// Surface gradient of a scalar field.
pub fn surface_gradient_scalar(patch: &SurfacePatch, f: &dyn Fn(&Vec3) -> f64, s: f64, t: f64) -> Result<Vec3> {
    let g = surface_gradient(patch, &|x| Vec3::new(f(x), 0.0, 0.0), s, t)?;
    Ok(g.row(0).transpose())
}

pub fn surface_divergence(patch: &SurfacePatch, f: &dyn Fn(&Vec3) -> Vec3, s: f64, t: f64) -> Result<f64> {
    Ok(surface_gradient(patch, f, s, t)?.trace())
}

/// Weingarten map obtained by differentiating the analytic normal.
pub fn numerical_weingarten(patch: &SurfacePatch, s: f64, t: f64) -> Result<Mat3> {
    surface_gradient(patch, &|x| patch.normal_at(x), s, t)
}

/// Values on the two sides of an interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSided<T> {
    pub plus: T,
    pub minus: T,
}

impl<T> TwoSided<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    pub fn new(plus: T, minus: T) -> Self {
        Self { plus, minus }
    }

    /// `[f] = f⁺ − f⁻`.
    pub fn jump(&self) -> T {
        self.plus - self.minus
    }

    /// `{f} = ½(f⁺ + f⁻)`.
    pub fn mean(&self) -> T {
        (self.plus + self.minus) * 0.5
    }
}

/// Residuals of `[fg] = f⁺[g] + [f]g⁻` and `[fg] = {f}[g] + [f]{g}`.
pub fn jump_algebra<A, B, P>(f: &TwoSided<A>, g: &TwoSided<B>) -> (P, P)
where
    A: Copy + std::ops::Add<Output = A> + std::ops::Sub<Output = A> + std::ops::Mul<f64, Output = A> + std::ops::Mul<B, Output = P>,
    B: Copy + std::ops::Add<Output = B> + std::ops::Sub<Output = B> + std::ops::Mul<f64, Output = B>,
    P: Copy + std::ops::Add<Output = P> + std::ops::Sub<Output = P>,
{
    let fg = f.plus * g.plus - f.minus * g.minus;
    let first = fg - (f.plus * g.jump() + f.jump() * g.minus);
    let second = fg - (f.mean() * g.jump() + f.jump() * g.mean());
    (first, second)
}

/// `max |ν·∇^Σa + a·∇^Σν|` over quadrature nodes for a tangential field `a`.
pub fn wswap_check(patch: &SurfacePatch, a: &dyn Fn(&Vec3) -> Vec3, ns: usize, nt: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for q in patch.quadrature(ns, nt) {
        let nu = patch.normal(q.s, q.t);
        let av = a(&q.x);
        if av.dot(&nu).abs() > 1e-10 * av.norm().max(1.0) {
            return Err(invalid("field is not tangential"));
        }
        let lhs = surface_gradient(patch, a, q.s, q.t)?.transpose() * nu;
        let rhs = patch.weingarten(q.s, q.t).transpose() * av;
        worst = worst.max((lhs + rhs).norm());
    }
    Ok(worst)
}

/// `∫_S ∇^Σ·f dS` on a closed patch for a tangential field `f`.
pub fn surface_divergence_theorem_check(
    patch: &SurfacePatch,
    f: &dyn Fn(&Vec3) -> Vec3,
    ns: usize,
    nt: usize,
) -> Result<f64> {
    if !patch.is_closed() {
        return Err(invalid("patch has a boundary"));
    }
    let mut acc = 0.0;
    for q in patch.quadrature(ns, nt) {
        let nu = patch.normal(q.s, q.t);
        let v = f(&q.x);
        if v.dot(&nu).abs() > 1e-10 * v.norm().max(1.0) {
            return Err(invalid("field is not tangential"));
        }
        acc += q.weight * surface_divergence(patch, f, q.s, q.t)?;
    }
    Ok(acc)
}

/// Tangential part of the traction `T·ν`.
pub fn normality_check(t: &Mat3, nu: &Vec3) -> Result<f64> {
    require_unit(nu)?;
    let tr = t * nu;
    Ok((tr - nu.dot(&tr) * nu).norm())
}

/// One side of an interface: stress and fields evaluated from that side.
pub struct InterfaceSide<'a> {
    pub tpk1: Mat3,
    pub p0: &'a dyn Fn(&Vec3) -> f64,
    pub u: &'a dyn Fn(&Vec3) -> Vec3,
}

/// `τ^{PK1} = T^{PK1}ν + ν ∇^Σ·(p⁰u) − p⁰ ν·∇^Σu` at `σ(s, t)`.
pub fn modified_traction(patch: &SurfacePatch, side: &InterfaceSide, s: f64, t: f64) -> Result<Vec3> {
    let x = patch.sigma(s, t);
    let nu = patch.normal(s, t);
    let pu = |y: &Vec3| (side.p0)(y) * (side.u)(y);
    let div_pu = surface_divergence(patch, &pu, s, t)?;
    let grad_u = surface_gradient(patch, side.u, s, t)?;
    Ok(side.tpk1 * nu + div_pu * nu - (side.p0)(&x) * grad_u.transpose() * nu)
}

/// `[τ^{PK1}]` across the interface; the pressure must be continuous.
pub fn traction_jump(patch: &SurfacePatch, plus: &InterfaceSide, minus: &InterfaceSide, s: f64, t: f64) -> Result<Vec3> {
    let x = patch.sigma(s, t);
    let (pp, pm) = ((plus.p0)(&x), (minus.p0)(&x));
    if (pp - pm).abs() > 1e-12 * pp.abs().max(pm.abs()).max(1.0) {
        return Err(invalid(format!("pressure jumps across the interface ({pp} vs {pm})")));
    }
    Ok(modified_traction(patch, plus, s, t)? - modified_traction(patch, minus, s, t)?)
}
