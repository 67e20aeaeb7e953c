use super::assemble::SystemMatrices;
use crate::error::{invalid, Error, Result};
use nalgebra::{DMatrix, DVector, LU, Dyn};

/// Average-acceleration Newmark scheme for `M ü + C u̇ + K u = F`.
/// Each step satisfies `ΔE = Δuᵀ F̄` exactly for the energy
/// `½u̇ᵀMu̇ + ½uᵀKu`, with `F̄` the mean load over the step.
#[derive(Debug, Clone)]
pub struct Newmark {
    pub dt: f64,
    pub m: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub k: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
    /// `(4/Δt² M + 2/Δt C + K)⁻¹` when requested.
    inverse: Option<DMatrix<f64>>,
}

impl Newmark {
    pub fn new(m: DMatrix<f64>, c: DMatrix<f64>, k: DMatrix<f64>, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(invalid("time step must be positive"));
        }
        let a = &m * (4.0 / (dt * dt)) + &c * (2.0 / dt) + &k;
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular("singular effective matrix".into()));
        }
        Ok(Self { dt, m, c, k, lu, inverse: None })
    }

    /// Displacement increment for a mean load `fbar`.
    pub fn increment(&self, u: &DVector<f64>, v: &DVector<f64>, fbar: &DVector<f64>) -> DVector<f64> {
        let rhs = 2.0 * fbar - 2.0 * (&self.k * u) + (4.0 / self.dt) * (&self.m * v);
        self.lu.solve(&rhs).expect("invertible")
    }

    pub fn step(&self, u: &DVector<f64>, v: &DVector<f64>, fbar: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let du = self.increment(u, v, fbar);
        let v1 = (2.0 / self.dt) * &du - v;
        (u + du, v1)
    }

    pub fn effective_inverse(&mut self) -> Result<&DMatrix<f64>> {
        if self.inverse.is_none() {
            self.inverse = Some(self.lu.try_inverse().ok_or_else(|| Error::Singular("singular matrix".into()))?);
        }
        Ok(self.inverse.as_ref().expect("just set"))
    }

    pub fn energy(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        0.5 * v.dot(&(&self.m * v)) + 0.5 * u.dot(&(&self.k * u))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub energy: Vec<f64>,
    /// Values of the probed dofs at every recorded time.
    pub probes: Vec<Vec<f64>>,
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    /// `max |E(t) − E(0)| / |E(0)|`, absolute when `E(0) = 0`.
    pub drift: f64,
}

/// Integrates the system with the potential eliminated and a constant load
/// `−f`. The energy includes the load potential `fᵀu`.
pub fn evolve(sys: &SystemMatrices, u0: &DVector<f64>, v0: &DVector<f64>, dt: f64, steps: usize, probes: &[usize]) -> Result<Trajectory> {
    let n = sys.n_u();
    if u0.len() != n || v0.len() != n {
        return Err(invalid("initial state has the wrong number of dofs"));
    }
    if probes.iter().any(|&p| p >= n) {
        return Err(invalid("probe dof out of range"));
    }
    let nm = Newmark::new(sys.m.clone(), sys.c.clone(), sys.k_effective()?, dt)?;
    let load = -&sys.f;
    let energy = |u: &DVector<f64>, v: &DVector<f64>| nm.energy(u, v) - load.dot(u);
    let (mut u, mut v) = (u0.clone(), v0.clone());
    let mut traj = Trajectory {
        t: vec![0.0],
        energy: vec![energy(&u, &v)],
        probes: vec![probes.iter().map(|&p| u[p]).collect()],
        u: u.clone(),
        v: v.clone(),
        drift: 0.0,
    };
    for s in 1..=steps {
        (u, v) = nm.step(&u, &v, &load);
        traj.t.push(s as f64 * dt);
        traj.energy.push(energy(&u, &v));
        traj.probes.push(probes.iter().map(|&p| u[p]).collect());
    }
    let e0 = traj.energy[0];
    let dev = traj.energy.iter().fold(0.0f64, |a, e| a.max((e - e0).abs()));
    traj.drift = if e0 != 0.0 { dev / e0.abs() } else { dev };
    traj.u = u;
    traj.v = v;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_energy_is_exact() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.1, 0.1, 1.0]);
        let k = DMatrix::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 2.0]);
        let c = DMatrix::from_row_slice(2, 2, &[0.0, 0.7, -0.7, 0.0]);
        let nm = Newmark::new(m, c, k, 0.3).unwrap();
        let f = DVector::zeros(2);
        let (mut u, mut v) = (DVector::from_vec(vec![1.0, -0.5]), DVector::from_vec(vec![0.2, 0.0]));
        let e0 = nm.energy(&u, &v);
        for _ in 0..500 {
            (u, v) = nm.step(&u, &v, &f);
        }
        assert!((nm.energy(&u, &v) - e0).abs() < 1e-12 * e0);
    }

    #[test]
    fn work_balances_energy_change() {
        let m = DMatrix::identity(2, 2);
        let k = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let nm = Newmark::new(m, DMatrix::zeros(2, 2), k, 0.1).unwrap();
        let (u, v) = (DVector::from_vec(vec![0.1, 0.0]), DVector::from_vec(vec![0.0, 0.3]));
        let fbar = DVector::from_vec(vec![0.4, -1.0]);
        let du = nm.increment(&u, &v, &fbar);
        let (u1, v1) = nm.step(&u, &v, &fbar);
        let de = nm.energy(&u1, &v1) - nm.energy(&u, &v);
        assert!((de - du.dot(&fbar)).abs() < 1e-14);
    }
}
