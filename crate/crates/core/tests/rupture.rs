mod common;

use common::*;
use nalgebra::DVector;
use stratovar::assembly::*;
use stratovar::rupture::*;

fn nearest(nodes: &[stratovar::numerics::Vec3], x: &stratovar::numerics::Vec3) -> usize {
    (0..nodes.len()).min_by(|&a, &b| (nodes[a] - x).norm().total_cmp(&(nodes[b] - x).norm())).unwrap()
}

#[test]
fn locked_fault_matches_welded_blocks() {
    let (dt, steps) = (0.05, 200);
    let (wm, wmesh) = shear_blocks(FaceTag::SolidSolid, 0.1, 0.05);
    let wsys = assemble(&wm, &wmesh).unwrap();
    let wv0 = wsys.dofs.sample(&wmesh.nodes.iter().map(swirl).collect::<Vec<_>>()).unwrap();
    let welded = evolve(&wsys, &DVector::zeros(wsys.n_u()), &wv0, dt, steps, &[]).unwrap();

    let (fm, fmesh) = shear_blocks(FaceTag::Fault, 0.1, 0.05);
    let fsys = assemble(&fm, &fmesh).unwrap();
    let law = FrictionLaw::new(0.6, 0.01, 0.015, 0.01, 1.0).unwrap();
    let fault = FaultSystem::new(&fm, &fmesh, &fsys, law, dt).unwrap();
    let v0 = fsys.dofs.sample(&fmesh.nodes.iter().map(swirl).collect::<Vec<_>>()).unwrap();
    let run = fault.run(&DVector::zeros(fsys.n_u()), &v0, fault.uniform_states(1.0), steps).unwrap();

    let uw = wsys.dofs.expand(&welded.u);
    let uf = fsys.dofs.expand(&run.u);
    let scale = uw.iter().map(|u| u.norm()).fold(0.0, f64::max);
    let diff = fmesh.nodes.iter().enumerate().map(|(i, x)| (uf[i] - uw[nearest(&wmesh.nodes, x)]).norm()).fold(0.0, f64::max);
    eprintln!("locked diff {diff:e} scale {scale:e} dissipation {:e}", run.dissipation.last().unwrap());
    assert!(scale > 1e-3);
    assert!(diff < 1e-10 * scale);
    assert!(*run.dissipation.last().unwrap() >= 0.0);
    assert!(fsys.dofs.normal_jump(&run.u) < 1e-13);
}

#[test]
fn sliding_fault_balances_energy() {
    let (fm, fmesh) = shear_blocks(FaceTag::Fault, 0.1, 0.05);
    let sys = assemble(&fm, &fmesh).unwrap();
    let law = FrictionLaw::new(0.6, 0.01, 0.015, 0.01, 1.0).unwrap();
    let fault = FaultSystem::new(&fm, &fmesh, &sys, law, 0.02).unwrap();
    let run = fault.run(&DVector::zeros(sys.n_u()), &DVector::zeros(sys.n_u()), fault.uniform_states(-0.3), 300).unwrap();
    let d = *run.dissipation.last().unwrap();
    let de = run.energy.last().unwrap() - run.energy[0];
    eprintln!("D {d:e} dE {de:e} balance {:e} vmax {:e}", run.balance_error(), run.max_slip_rate.iter().cloned().fold(0.0, f64::max));
    assert!(d > 0.0);
    assert!(run.dissipation.windows(2).all(|w| w[1] >= w[0]));
    assert!(run.balance_error() < 1e-6);
    assert!(sys.dofs.normal_jump(&run.u) < 1e-13);
    for s in &run.states {
        assert!(collinearity_residual(&s.tau_f, &s.v_t).amax() <= 1e-15 * s.tau_f.norm().max(1e-300) * s.v_t.norm().max(1.0));
    }
    assert!(dissipation_rate(&fault.nodes, &run.states) <= 0.0);
}

#[test]
fn opening_faults_are_rejected() {
    let (fm, fmesh) = shear_blocks(FaceTag::Fault, -0.1, 0.05);
    let sys = assemble(&fm, &fmesh).unwrap();
    let law = FrictionLaw::new(0.6, 0.01, 0.015, 0.01, 1.0).unwrap();
    let fault = FaultSystem::new(&fm, &fmesh, &sys, law, 0.02).unwrap();
    let err = fault.run(&DVector::zeros(sys.n_u()), &DVector::zeros(sys.n_u()), fault.uniform_states(0.0), 1).unwrap_err();
    assert!(matches!(err, stratovar::Error::FaultOpening { .. }));
}
