#![allow(dead_code)]

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stratovar::assembly::{Background, CompositeMesh, EarthModel, FaceTag, ForcePotential, Material, PrestressField, RegionKind};
use stratovar::gravity::RadialDensityModel;
use stratovar::numerics::{Mat3, Vec3};
use stratovar::shell::generate::{box_mesh, BoxSpec};
use std::sync::Arc;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| scale * rng.random_range(-1.0..1.0))
}

/// Two-region box: solid on the − side, fluid on the + side across an FS
/// plane, with vacuum padding carrying the potential.
pub fn fs_box(n: usize, padding: usize) -> CompositeMesh {
    box_mesh(&BoxSpec {
        n,
        size: 1.0,
        interface: Some((FaceTag::FluidSolid, RegionKind::Solid, RegionKind::Fluid)),
        kind: RegionKind::Solid,
        padding,
    })
    .unwrap()
}

/// Prestress that is a pure pressure for `x ≥ 0` and carries a deviatoric
/// part on the solid side.
pub fn mixed_prestress() -> PrestressField {
    PrestressField::Field(Arc::new(|x: &Vec3| {
        let p = 0.6 + 0.2 * x.y - 0.1 * x.z + 0.05 * x.x;
        let s = x.x.min(0.0).powi(2);
        let d = Mat3::new(0.3, 0.2, -0.1, 0.2, -0.5, 0.15, -0.1, 0.15, 0.2);
        -p * Mat3::identity() + s * d
    }))
}

/// Everything switched on: prestress, rotation, background gravity,
/// self-gravitation, force potential and an FS interface.
pub fn rich_model(with_padding: bool) -> (EarthModel, CompositeMesh) {
    let mesh = fs_box(2, usize::from(with_padding));
    let mut materials = vec![Material::solid(1.3, 2.0, 0.8), Material::fluid(0.9, 1.5)];
    if with_padding {
        materials.push(Material::Vacuum);
    }
    let mut model = EarthModel::new(materials);
    model.prestress = mixed_prestress();
    model.omega = Vec3::new(0.1, -0.2, 0.3);
    model.g = Some(0.7);
    model.background = Background::Radial(RadialDensityModel::uniform(2.0, 1.0, 0.7).unwrap());
    model.force = Some(ForcePotential::linear(Vec3::new(0.1, 0.0, -0.3)));
    (model, mesh)
}

/// Two solid blocks meeting on the plane `x = 0`, either welded or across a
/// frictional fault, held by a uniform-sphere background potential and
/// prestressed by `−pI` plus a shear `τ⁰` on the plane.
pub fn shear_blocks(tag: FaceTag, p: f64, tau0: f64) -> (EarthModel, CompositeMesh) {
    let mesh = box_mesh(&BoxSpec {
        n: 2,
        size: 1.0,
        interface: Some((tag, RegionKind::Solid, RegionKind::Solid)),
        kind: RegionKind::Solid,
        padding: 0,
    })
    .unwrap();
    let mut model = EarthModel::new(vec![Material::solid(1.0, 2.0, 1.0); 2]);
    model.background = Background::Radial(RadialDensityModel::uniform(2.0, 1.0, 1.0).unwrap());
    let mut t0 = -p * Mat3::identity();
    t0[(0, 1)] = tau0;
    t0[(1, 0)] = tau0;
    model.prestress = PrestressField::Uniform(t0);
    (model, mesh)
}

/// Smooth velocity field used to start runs.
pub fn swirl(x: &Vec3) -> Vec3 {
    0.01 * Vec3::new((2.0 * x.x + x.y).sin(), (x.y - x.z).cos(), x.x * x.z + 0.3)
}
