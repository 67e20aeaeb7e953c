use super::friction::{friction_regularized_slope, state_rate, FaultPointState, FrictionLaw};
use super::slider::slip_rate_for_traction;
use crate::assembly::{face_quadrature, locate, shape_at, CompositeMesh, EarthModel, FaceTag, SystemMatrices};
use crate::error::{invalid, Error, Result};
use crate::numerics::{Mat3, Vec3};
use nalgebra::{DMatrix, DVector, Dyn, Matrix2, Vector2, LU};
use std::collections::HashMap;

/// One split node on a fault, with its lumped area and tangent frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultNode {
    /// Index into the slipping pairs of the dof map.
    pub slip: usize,
    pub x: Vec3,
    pub area: f64,
    pub nu: Vec3,
    pub t1: Vec3,
    pub t2: Vec3,
    /// Prestress shear `(t₁·T⁰ν, t₂·T⁰ν)`.
    pub tau0: Vector2<f64>,
    /// `−ν·T⁰ν`.
    pub sigma0: f64,
}

/// Elastic system with frictional faults, advanced by the implicit
/// midpoint (average-acceleration) rule
/// `M(v₁−v₀)/Δt + C v̄ + K ū + f = Sᵀ A (τ⁰ − τ_f(S v̄))`.
#[derive(Debug, Clone)]
pub struct FaultSystem {
    pub law: FrictionLaw,
    pub nodes: Vec<FaultNode>,
    pub dt: f64,
    pub m: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub f: DVector<f64>,
    /// Slip-rate operator, two rows per fault node.
    pub s: DMatrix<f64>,
    /// `Sᵀ A τ⁰`.
    pub f_pre: DVector<f64>,
    /// Normal-stress change per reduced dof: `σ_N = σ⁰ + N_σ q`.
    pub n_sigma: DMatrix<f64>,
    h: LU<f64, Dyn, Dyn>,
    h_inv_st: DMatrix<f64>,
    g: DMatrix<f64>,
}

/// Per-step bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// Energy dissipated by friction over the step (≥ 0).
    pub dissipated: f64,
    pub newton_iterations: usize,
    pub max_slip_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaultRun {
    pub t: Vec<f64>,
    /// Mechanical energy including the load and prestress potentials.
    pub energy: Vec<f64>,
    /// Cumulative frictional dissipation.
    pub dissipation: Vec<f64>,
    pub max_slip_rate: Vec<f64>,
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    pub states: Vec<FaultPointState>,
    /// Fault states after every step, starting with the initial ones.
    pub history: Vec<Vec<FaultPointState>>,
}

impl FaultRun {
    /// `|ΔE + D| / max(D, |ΔE|, 1e-9·max|E|)` at the final time. The floor
    /// keeps locked runs, where both terms are roundoff, from reading as O(1).
    pub fn balance_error(&self) -> f64 {
        let de = self.energy.last().copied().unwrap_or(0.0) - self.energy[0];
        let d = self.dissipation.last().copied().unwrap_or(0.0);
        let e = self.energy.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let scale = d.abs().max(de.abs()).max(1e-9 * e);
        if scale > 0.0 {
            (de + d).abs() / scale
        } else {
            0.0
        }
    }
}

fn cells_by_face(mesh: &CompositeMesh) -> HashMap<Vec<usize>, Vec<usize>> {
    let mut by_key: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (ci, c) in mesh.cells.iter().enumerate() {
        for lf in c.kind.local_faces() {
            let mut key: Vec<usize> = lf.iter().map(|&i| c.nodes[i]).collect();
            key.sort_unstable();
            by_key.entry(key).or_default().push(ci);
        }
    }
    by_key
}

impl FaultSystem {
    pub fn new(model: &EarthModel, mesh: &CompositeMesh, sys: &SystemMatrices, law: FrictionLaw, dt: f64) -> Result<Self> {
        law.validate()?;
        if !(dt > 0.0) {
            return Err(invalid("time step must be positive"));
        }
        let dofs = &sys.dofs;
        let mut index_of_plus = HashMap::new();
        let mut nodes = Vec::new();
        for (k, s) in dofs.slip.iter().enumerate() {
            if s.tag != FaceTag::Fault {
                continue;
            }
            let x = mesh.nodes[s.plus];
            let t0 = model.prestress.at(&x, &[s.plus], &[1.0]);
            let tn = t0 * s.nu;
            index_of_plus.insert(s.plus, nodes.len());
            nodes.push(FaultNode {
                slip: k,
                x,
                area: 0.0,
                nu: s.nu,
                t1: s.t1,
                t2: s.t2,
                tau0: Vector2::new(s.t1.dot(&tn), s.t2.dot(&tn)),
                sigma0: -s.nu.dot(&tn),
            });
        }
        if nodes.is_empty() {
            return Err(invalid("mesh has no fault faces"));
        }
        let n = sys.n_u();
        let nf = nodes.len();
        let by_key = cells_by_face(mesh);
        let mut n_sigma_nodal = DMatrix::zeros(nf, 3 * mesh.nodes.len());
        for face in mesh.faces_with(FaceTag::Fault) {
            let coords: Vec<Vec3> = face.plus.iter().map(|&p| mesh.nodes[p]).collect();
            let qps = face_quadrature(&coords)?;
            let centre = coords.iter().sum::<Vec3>() / coords.len() as f64;
            // normal-stress coefficients at the face centre, averaged over both sides
            let mut coeff: Vec<(usize, usize, f64)> = Vec::new();
            for side in [&face.minus, &face.plus] {
                let mut key = side.clone();
                key.sort_unstable();
                let cell = by_key
                    .get(&key)
                    .and_then(|c| c.first())
                    .map(|&c| &mesh.cells[c])
                    .ok_or_else(|| Error::Validation { invariant: "face adjacency", detail: "fault face without a cell".into() })?;
                let cc = mesh.cell_coords(cell);
                let xi = locate(cell.kind, &cc, &centre)?;
                let (sn, grad, _) = shape_at(cell.kind, &cc, xi)?;
                let nu = face.patch.map(|p| mesh.patches[p].normal_at(&centre)).unwrap_or(qps[0].normal);
                let gamma = model.materials[cell.region].gamma()?.ok_or_else(|| invalid("fault borders a vacuum region"))?;
                let t0 = model.prestress.at(&centre, &cell.nodes, &sn);
                let lambda = model.tensors(&gamma, &t0)?.lambda;
                for (b, &node) in cell.nodes.iter().enumerate() {
                    for i in 0..3 {
                        let mut e = Mat3::zeros();
                        e.set_row(i, &grad[b].transpose());
                        let t = lambda.contract(&e);
                        coeff.push((node, i, -0.5 * nu.dot(&(t * nu))));
                    }
                }
            }
            for qp in &qps {
                for (a, &p) in face.plus.iter().enumerate() {
                    let Some(&fi) = index_of_plus.get(&p) else { continue };
                    let w = qp.w * qp.n[a];
                    nodes[fi].area += w;
                    for &(node, i, c) in &coeff {
                        n_sigma_nodal[(fi, 3 * node + i)] += w * c;
                    }
                }
            }
        }
        if nodes.iter().any(|nd| !(nd.area > 0.0)) {
            return Err(invalid("fault node without fault area"));
        }
        let t = dofs.transform();
        let mut n_sigma = n_sigma_nodal * &t;
        for (fi, nd) in nodes.iter().enumerate() {
            let mut row = n_sigma.row_mut(fi);
            row /= nd.area;
        }
        let mut s = DMatrix::zeros(2 * nf, n);
        for (fi, nd) in nodes.iter().enumerate() {
            let sl = &dofs.slip[nd.slip];
            for (r, tang) in [nd.t1, nd.t2].iter().enumerate() {
                for i in 0..3 {
                    for &(j, c) in &dofs.u_rows[3 * sl.plus + i] {
                        s[(2 * fi + r, j)] += tang[i] * c;
                    }
                    for &(j, c) in &dofs.u_rows[3 * sl.minus + i] {
                        s[(2 * fi + r, j)] -= tang[i] * c;
                    }
                }
            }
        }
        let mut a_tau0 = DVector::zeros(2 * nf);
        for (fi, nd) in nodes.iter().enumerate() {
            a_tau0[2 * fi] = nd.area * nd.tau0[0];
            a_tau0[2 * fi + 1] = nd.area * nd.tau0[1];
        }
        let f_pre = s.transpose() * a_tau0;
        let k = sys.k_effective()?;
        let hm = &sys.m * (2.0 / dt) + &sys.c + &k * (0.5 * dt);
        let h = hm.lu();
        let h_inv_st = h.solve(&s.transpose()).ok_or_else(|| Error::Singular("singular effective matrix".into()))?;
        let g = &s * &h_inv_st;
        Ok(Self { law, nodes, dt, m: sys.m.clone(), c: sys.c.clone(), k, f: sys.f.clone(), s, f_pre, n_sigma, h, h_inv_st, g })
    }

    pub fn n_fault(&self) -> usize {
        self.nodes.len()
    }

    /// `E = ½vᵀMv + ½uᵀKu + fᵀu − F_preᵀu`.
    pub fn energy(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        0.5 * v.dot(&(&self.m * v)) + 0.5 * u.dot(&(&self.k * u)) + self.f.dot(u) - self.f_pre.dot(u)
    }

    /// Compressive normal stress at every fault node; errors on opening.
    pub fn normal_stress(&self, u: &DVector<f64>) -> Result<Vec<f64>> {
        let d = &self.n_sigma * u;
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, nd)| {
                let s = nd.sigma0 + d[i];
                if s > 0.0 {
                    Ok(s)
                } else {
                    Err(Error::FaultOpening { point: i, sigma_n: s })
                }
            })
            .collect()
    }

    /// Slip rate carried by a traction `τ` at one node and its Jacobian
    /// `∂V/∂τ`, from the closed-form inverse of the regularized law.
    fn rate_of(&self, tau: Vector2<f64>, sigma: f64, psi: f64) -> (Vector2<f64>, Matrix2<f64>) {
        let law = FrictionLaw { v_creep: 0.0, ..self.law };
        let mag = tau.norm();
        let speed = slip_rate_for_traction(&law, sigma, mag, psi);
        let slope = 1.0 / (sigma * friction_regularized_slope(&law, speed, psi));
        if mag == 0.0 {
            return (Vector2::zeros(), Matrix2::identity() * slope);
        }
        let e = tau / mag;
        let ee = e * e.transpose();
        (e * speed, ee * slope + (Matrix2::identity() - ee) * (speed / mag))
    }

    // R(τ) = V(τ) − V_pred + G A τ
    fn residual(&self, tau: &DVector<f64>, vpred: &DVector<f64>, sigma: &[f64], states: &[FaultPointState]) -> DVector<f64> {
        let mut rate = DVector::zeros(tau.len());
        let mut at = tau.clone();
        for (i, nd) in self.nodes.iter().enumerate() {
            let (v, _) = self.rate_of(Vector2::new(tau[2 * i], tau[2 * i + 1]), sigma[i], states[i].psi);
            rate[2 * i] = v[0];
            rate[2 * i + 1] = v[1];
            at[2 * i] *= nd.area;
            at[2 * i + 1] *= nd.area;
        }
        rate - vpred + &self.g * at
    }

    /// Frictional tractions for the step: the unique root of `R(τ)`,
    /// monotone because `G` has a positive-definite symmetric part.
    fn solve_tractions(&self, vpred: &DVector<f64>, sigma: &[f64], states: &[FaultPointState]) -> Result<(DVector<f64>, usize)> {
        let nf = self.nodes.len();
        let mut tau = DVector::from_iterator(
            2 * nf,
            states.iter().zip(&self.nodes).flat_map(|(s, nd)| [nd.t1.dot(&s.tau_f), nd.t2.dot(&s.tau_f)]),
        );
        let area = DVector::from_iterator(2 * nf, self.nodes.iter().flat_map(|nd| [nd.area, nd.area]));
        let mut r = self.residual(&tau, vpred, sigma, states);
        let scale = vpred.amax().max(f64::MIN_POSITIVE);
        let mut iterations = 0;
        while r.amax() > 1e-14 * scale {
            iterations += 1;
            if iterations > 200 {
                return Err(Error::NonConvergence(format!("fault traction solve, residual {:e}", r.amax())));
            }
            let mut jac = &self.g * DMatrix::from_diagonal(&area);
            for (i, _) in self.nodes.iter().enumerate() {
                let (_, d) = self.rate_of(Vector2::new(tau[2 * i], tau[2 * i + 1]), sigma[i], states[i].psi);
                let mut block = jac.view_mut((2 * i, 2 * i), (2, 2));
                block += d;
            }
            let dt = jac.lu().solve(&(-&r)).ok_or_else(|| Error::Singular("fault traction Jacobian".into()))?;
            let norm0 = r.norm();
            let mut lambda = 1.0;
            loop {
                let trial = &tau + &dt * lambda;
                let rt = self.residual(&trial, vpred, sigma, states);
                if rt.norm() < norm0 {
                    tau = trial;
                    r = rt;
                    break;
                }
                lambda *= 0.5;
                if lambda < 1e-30 {
                    // no descent left at roundoff level
                    return Ok((tau, iterations));
                }
            }
            if (&dt * lambda).amax() <= 1e-15 * tau.amax() {
                break;
            }
        }
        Ok((tau, iterations))
    }

    /// Advances `(u, v)` and the fault states by one step.
    pub fn step(&self, u: &mut DVector<f64>, v: &mut DVector<f64>, states: &mut [FaultPointState]) -> Result<StepReport> {
        let nf = self.nodes.len();
        if states.len() != nf {
            return Err(invalid("one state per fault node is required"));
        }
        let dt = self.dt;
        let sigma = self.normal_stress(u)?;
        let rhs = &self.m * &*v * (2.0 / dt) - &self.k * &*u - &self.f + &self.f_pre;
        let v_free = self.h.solve(&rhs).ok_or_else(|| Error::Singular("singular effective matrix".into()))?;
        let vpred = &self.s * &v_free;
        let (tau, iterations) = self.solve_tractions(&vpred, &sigma, states)?;
        let mut at = tau.clone();
        for (i, nd) in self.nodes.iter().enumerate() {
            at[2 * i] *= nd.area;
            at[2 * i + 1] *= nd.area;
        }
        let vbar_full = v_free - &self.h_inv_st * &at;
        // slip rates from the friction law: pointwise dissipation τ·V ≥ 0, and
        // S v̄ differs from them only by the solve residual
        let mut vbar = DVector::zeros(2 * nf);
        for i in 0..nf {
            let (vr, _) = self.rate_of(Vector2::new(tau[2 * i], tau[2 * i + 1]), sigma[i], states[i].psi);
            vbar[2 * i] = vr[0];
            vbar[2 * i + 1] = vr[1];
        }
        let u1 = &*u + &vbar_full * dt;
        let v1 = &vbar_full * 2.0 - &*v;
        let dissipated = dt * vbar.dot(&at);
        let sigma1 = self.normal_stress(&u1)?;
        let mut max_rate = 0.0f64;
        for (i, nd) in self.nodes.iter().enumerate() {
            let vv = nd.t1 * vbar[2 * i] + nd.t2 * vbar[2 * i + 1];
            let speed = vv.norm();
            max_rate = max_rate.max(speed);
            let st = &mut states[i];
            let sdot = (sigma1[i] - sigma[i]) / dt;
            let half = st.psi + 0.5 * dt * state_rate(&self.law, st.psi, speed, sigma[i], sdot)?;
            st.psi += dt * state_rate(&self.law, half, speed, 0.5 * (sigma[i] + sigma1[i]), sdot)?;
            st.delta += vv * dt;
            st.v_t = vv;
            st.sigma_n = sigma1[i];
            st.tau_f = nd.t1 * tau[2 * i] + nd.t2 * tau[2 * i + 1];
        }
        *u = u1;
        *v = v1;
        Ok(StepReport { dissipated, newton_iterations: iterations, max_slip_rate: max_rate })
    }

    /// Runs `steps` steps from `(u0, v0)` with the given initial states.
    pub fn run(&self, u0: &DVector<f64>, v0: &DVector<f64>, states: Vec<FaultPointState>, steps: usize) -> Result<FaultRun> {
        let n = self.m.nrows();
        if u0.len() != n || v0.len() != n {
            return Err(invalid("initial state has the wrong number of dofs"));
        }
        let (mut u, mut v) = (u0.clone(), v0.clone());
        let mut states = states;
        let sigma = self.normal_stress(&u)?;
        for (s, sn) in states.iter_mut().zip(sigma) {
            s.sigma_n = sn;
        }
        let mut run = FaultRun {
            t: vec![0.0],
            energy: vec![self.energy(&u, &v)],
            dissipation: vec![0.0],
            max_slip_rate: vec![0.0],
            u: u.clone(),
            v: v.clone(),
            states: Vec::new(),
            history: vec![states.clone()],
        };
        let mut total = 0.0;
        for k in 1..=steps {
            let rep = self.step(&mut u, &mut v, &mut states)?;
            total += rep.dissipated;
            run.t.push(k as f64 * self.dt);
            run.energy.push(self.energy(&u, &v));
            run.dissipation.push(total);
            run.max_slip_rate.push(rep.max_slip_rate);
            run.history.push(states.clone());
        }
        run.u = u;
        run.v = v;
        run.states = states;
        Ok(run)
    }

    /// Initial states with uniform `ψ`.
    pub fn uniform_states(&self, psi: f64) -> Vec<FaultPointState> {
        self.nodes.iter().map(|nd| FaultPointState::at_rest(psi, nd.sigma0.max(f64::MIN_POSITIVE))).collect()
    }
}

/// `Ė = −Σ A τ_f·V_T`, the rate of change of mechanical energy due to
/// friction (≤ 0).
pub fn dissipation_rate(nodes: &[FaultNode], states: &[FaultPointState]) -> f64 {
    -nodes.iter().zip(states).map(|(n, s)| n.area * s.tau_f.dot(&s.v_t)).sum::<f64>()
}
