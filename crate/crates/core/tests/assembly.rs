mod common;

use common::*;
use nalgebra::DVector;
use stratovar::assembly::*;
use stratovar::gravity::RadialDensityModel;
use stratovar::numerics::{loglog_slope, max_abs, Mat3, Vec3};
use stratovar::shell::generate::{box_mesh, layered_ball, BallSpec, BoxSpec};
use stratovar::surface::SurfacePatch;

#[test]
fn matrices_have_their_symmetries() {
    let (model, mesh) = rich_model(true);
    let sys = assemble(&model, &mesh).unwrap();
    assert!(max_abs(&(&sys.c + sys.c.transpose())) < 1e-14);
    assert!(max_abs(&(&sys.k - sys.k.transpose())) < 1e-12, "{}", max_abs(&(&sys.k - sys.k.transpose())));
    assert!(max_abs(&sys.k_surface) > 1e-3);
    assert!(sys.m.clone().cholesky().is_some());
    assert!(sys.p.clone().cholesky().is_some());
}

#[test]
fn quadrature_action_matches_matrix_form() {
    let (model, mesh) = rich_model(true);
    let sys = assemble(&model, &mesh).unwrap();
    let mut r = rng(7);
    for _ in 0..3 {
        let q = random_vector(&mut r, sys.n_u(), 0.1);
        let phi = random_vector(&mut r, sys.n_phi(), 0.1);
        let qd = random_vector(&mut r, sys.n_u(), 0.1);
        let a = action_value(&model, &mesh, &sys.dofs, &q, &phi, &qd).unwrap();
        let b = sys.quadratic_action(&q, &phi, &qd);
        assert!((a.a2 - b).abs() < 1e-12 * b.abs().max(1.0), "{} vs {}", a.a2, b);
    }
    let z = DVector::zeros(sys.n_u());
    let a = action_value(&model, &mesh, &sys.dofs, &z, &DVector::zeros(sys.n_phi()), &z).unwrap();
    assert_eq!((a.a1 == 0.0, a.a2 == 0.0), (false, true));
}

#[test]
fn frechet_and_expansion() {
    let (model, mesh) = rich_model(true);
    let sys = assemble(&model, &mesh).unwrap();
    let mut r = rng(11);
    let q = random_vector(&mut r, sys.n_u(), 0.1);
    let phi = random_vector(&mut r, sys.n_phi(), 0.1);
    let qd = random_vector(&mut r, sys.n_u(), 0.1);
    let rep = frechet_fd_check(&model, &mesh, &sys, &q, &phi, &qd, 1e-4).unwrap();
    eprintln!("frechet {:?}", rep);
    assert!(rep.relative_error < 1e-6);
    let ex = expansion_check(&model, &mesh, &sys.dofs, &q, &phi, &qd, &[1e-1, 3e-2, 1e-2, 3e-3]).unwrap();
    eprintln!("expansion {:?}", ex);
    assert!(ex.slope.unwrap() >= 2.9);
}


fn hydrostatic_ball(tags: Vec<FaceTag>, kinds: Vec<RegionKind>) -> (EarthModel, CompositeMesh) {
    let radii = vec![0.5, 0.8, 1.0];
    let rho = vec![3.0, 2.0, 1.5];
    let mesh = layered_ball(&BallSpec::new(radii.clone(), kinds.clone(), tags)).unwrap().tetrahedralize().unwrap();
    let earth = RadialDensityModel::new(radii, rho.clone(), 1.0).unwrap();
    let materials = kinds
        .iter()
        .zip(&rho)
        .map(|(k, &r)| match k {
            RegionKind::Fluid => Material::fluid(r, 4.0),
            _ => Material::solid(r, 4.0, 1.5),
        })
        .collect();
    let mut model = EarthModel::new(materials);
    model.prestress = PrestressField::NodalPressure(mesh.nodes.iter().map(|x| earth.pressure(x.norm())).collect());
    model.background = Background::Radial(earth);
    (model, mesh)
}

#[test]
fn hydrostatic_forms_agree_on_welded_layers() {
    let (model, mesh) = hydrostatic_ball(vec![FaceTag::SolidSolid; 2], vec![RegionKind::Solid; 3]);
    let rep = hydrostatic_assemble(&model, &mesh).unwrap();
    eprintln!("hyd rel {:e}", rep.relative_difference);
    assert!(rep.relative_difference < 1e-10);
}

#[test]
fn hydrostatic_fs_block() {
    let (model, mesh) = hydrostatic_ball(
        vec![FaceTag::FluidSolid, FaceTag::FluidSolid],
        vec![RegionKind::Solid, RegionKind::Fluid, RegionKind::Solid],
    );
    let rep = hydrostatic_assemble(&model, &mesh).unwrap();
    eprintln!("fs: rel {:e} block {:e} |K| {:e}", rep.relative_difference, rep.surface_block_norm, rep.k_general.norm());
}

#[test]
fn surface_forms_agree_on_a_sphere() {
    let patch = SurfacePatch::sphere(Vec3::new(0.1, 0.0, -0.2), 0.8).unwrap();
    let c = Vec3::new(0.1, 0.0, -0.2);
    let p0 = |x: &Vec3| 1.0 + 0.3 * (x - c).norm_squared();
    let normal = move |x: &Vec3| (x - c).normalize();
    // common normal component, different tangential parts
    let un = move |x: &Vec3| 0.2 * x.x + 0.1 * x.y * x.z;
    let tm = move |x: &Vec3| {
        let v = Vec3::new(x.y, -0.5 * x.z, 0.3);
        v - normal(x) * normal(x).dot(&v)
    };
    let tp = move |x: &Vec3| {
        let v = Vec3::new(0.2 * x.z * x.z, x.x, -x.y);
        v - normal(x) * normal(x).dot(&v)
    };
    let um = move |x: &Vec3| normal(x) * un(x) + tm(x);
    let up = move |x: &Vec3| normal(x) * un(x) + tp(x);
    let (a, b) = surface_form_pair(&patch, &p0, &up, &um, 48, 96).unwrap();
    eprintln!("surface {a} {b}");
    assert!((a - b).abs() < 1e-6 * a.abs().max(1.0));
}

#[test]
fn free_cube_has_six_rigid_modes() {
    let mesh = box_mesh(&BoxSpec::default()).unwrap();
    let model = EarthModel::new(vec![Material::solid(1.0, 5.0 / 3.0, 1.0)]);
    let sys = assemble(&model, &mesh).unwrap();
    let modes = eigenmodes(&sys.m, &sys.c, &sys.k, sys.n_u()).unwrap();
    let zeros = modes.omega2.iter().filter(|w| w.abs() < 1e-10).count();
    assert_eq!(zeros, 6, "{:?}", &modes.omega2[..8]);
    assert!(modes.omega2[6] > 1e-3);
}

fn confined_cube(omega: Vec3) -> SystemMatrices {
    let mesh = box_mesh(&BoxSpec::default()).unwrap();
    let mut model = EarthModel::new(vec![Material::solid(1.0, 2.0, 1.0)]);
    model.background = Background::Radial(RadialDensityModel::uniform(2.0, 1.0, 1.0).unwrap());
    model.omega = omega;
    assemble(&model, &mesh).unwrap()
}

#[test]
fn conservative_runs_keep_energy() {
    let mut drifts = Vec::new();
    for omega in [Vec3::zeros(), Vec3::new(0.1, -0.2, 0.3)] {
        let sys = confined_cube(omega);
        let mut r = rng(3);
        let u0 = random_vector(&mut r, sys.n_u(), 0.01);
        let v0 = random_vector(&mut r, sys.n_u(), 0.01);
        let t = evolve(&sys, &u0, &v0, 0.05, 1000, &[0, 1]).unwrap();
        drifts.push(t.drift);
    }
    eprintln!("drift {drifts:?}");
    assert!(drifts.iter().all(|d| *d < 1e-6));
}

#[test]
fn traction_residuals_shrink_under_refinement() {
    let mut sup = Vec::new();
    let mut rms = Vec::new();
    let mut hs = Vec::new();
    for n in [2, 4, 6] {
        let mesh = box_mesh(&BoxSpec {
            n,
            interface: Some((FaceTag::SolidSolid, RegionKind::Solid, RegionKind::Solid)),
            ..Default::default()
        })
        .unwrap();
        let mut model = EarthModel::new(vec![Material::solid(1.0, 2.0, 1.0), Material::solid(2.0, 2.0, 1.0)]);
        model.background = Background::Radial(RadialDensityModel::uniform(3.0, 1.0, 1.0).unwrap());
        let a = Mat3::new(0.4, 0.1, 0.0, 0.1, -0.3, 0.2, 0.0, 0.2, 0.5);
        model.force = Some(ForcePotential::quadratic(a, Vec3::new(0.0, 0.0, 1.0)));
        let sys = assemble(&model, &mesh).unwrap();
        let (q, phi) = sys.static_solve().unwrap();
        let rep = interface_residuals(&model, &mesh, &sys, &q, &phi).unwrap();
        eprintln!("n={n} ss {:?} ext {:?}", rep.ss_traction_jump, rep.exterior_traction);
        sup.push(rep.ss_traction_jump.sup.max(rep.exterior_traction.sup));
        rms.push(rep.ss_traction_jump.rms.max(rep.exterior_traction.rms));
        hs.push(1.0 / n as f64);
    }
    let (ssup, srms) = (loglog_slope(&hs, &sup).unwrap(), loglog_slope(&hs, &rms).unwrap());
    eprintln!("slopes sup {ssup} rms {srms}");
    assert!(srms > 0.4);
}
