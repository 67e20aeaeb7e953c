use super::friction::{friction_regularized, friction_regularized_slope, state_rate, steady_state, FrictionLaw};
use crate::error::{invalid, Error, Result};

/// Single-degree-of-freedom block pulled through a spring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringSlider {
    pub k: f64,
    /// Block mass; zero selects the quasi-static branch.
    pub mass: f64,
    pub v_load: f64,
    pub law: FrictionLaw,
    pub sigma_n: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SliderTrajectory {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    pub psi: Vec<f64>,
    pub delta: Vec<f64>,
    pub tau: Vec<f64>,
    /// Set when the slip rate passed the runaway cap and the run stopped.
    pub runaway: bool,
}

/// Slip rate, relative to the load rate, at which a run is declared a
/// runaway. Without inertia the unstable branch reaches infinite slip rate
/// in finite time.
pub const RUNAWAY_RATIO: f64 = 1e8;

impl SliderTrajectory {
    /// `ln(max |ln(V/V_load)|)` over the last quarter minus the same over
    /// the first quarter: positive when a perturbation grows.
    pub fn growth(&self, v_load: f64) -> f64 {
        if self.runaway {
            return f64::INFINITY;
        }
        let x: Vec<f64> = self.v.iter().map(|v| (v.max(f64::MIN_POSITIVE) / v_load).ln().abs()).collect();
        let q = (x.len() / 4).max(1);
        let early = x[1.min(x.len() - 1)..q.max(2).min(x.len())].iter().fold(0.0f64, |a, &b| a.max(b));
        let late = x[x.len() - q..].iter().fold(0.0f64, |a, &b| a.max(b));
        late.ln() - early.ln()
    }
}

/// Slip rate at which `σ_N f^reg(V, ψ) = τ`. The regularized law inverts in
/// closed form: `V = V0 e^{(y−f0−ψ)/a}(1 − e^{−2y/a}) − V_creep` for
/// `y = τ/σ_N > 0`.
pub fn slip_rate_for_traction(law: &FrictionLaw, sigma_n: f64, tau: f64, psi: f64) -> f64 {
    let y = (tau / sigma_n).abs();
    if y == 0.0 {
        return 0.0;
    }
    let v = law.v0 * ((y - law.f0 - psi) / law.a).exp() * -(-2.0 * y / law.a).exp_m1() - law.v_creep;
    tau.signum() * v.max(0.0)
}

impl SpringSlider {
    pub fn validate(&self) -> Result<()> {
        self.law.validate()?;
        if !(self.k > 0.0) || !(self.mass >= 0.0) || !(self.sigma_n > 0.0) || !(self.v_load > 0.0) {
            return Err(invalid("spring slider needs k > 0, mass ≥ 0, σ_N > 0 and V_load > 0"));
        }
        Ok(())
    }

    /// Initial traction for steady sliding at the load rate.
    pub fn steady_traction(&self) -> Result<f64> {
        let ss = steady_state(&self.law, self.v_load)?;
        Ok(self.sigma_n * friction_regularized(&self.law, self.v_load, ss.psi_ss))
    }

    fn spring(&self, tau0: f64, t: f64, delta: f64) -> f64 {
        tau0 + self.k * (self.v_load * t - delta)
    }

    // (δ̇, ψ̇) with V slaved to the spring force
    fn quasi_static_rate(&self, tau0: f64, t: f64, delta: f64, psi: f64) -> Result<(f64, f64, f64)> {
        let v = slip_rate_for_traction(&self.law, self.sigma_n, self.spring(tau0, t, delta), psi);
        Ok((v, state_rate(&self.law, psi, v.abs(), self.sigma_n, 0.0)?, v))
    }

    /// Solves `m(V − V_prev)/h = τ_spring(V) − σ_N f^reg(V, ψ)` with
    /// `τ_spring` evaluated at `δ + hV`; Newton safeguarded by bisection.
    fn implicit_velocity(&self, tau0: f64, t1: f64, delta: f64, psi: f64, v_prev: f64, h: f64) -> Result<f64> {
        let g = |v: f64| {
            self.mass * (v - v_prev) / h - self.spring(tau0, t1, delta + h * v)
                + self.sigma_n * friction_regularized(&self.law, v, psi)
        };
        let dg = |v: f64| self.mass / h + self.k * h + self.sigma_n * friction_regularized_slope(&self.law, v, psi);
        // g is strictly increasing: bracket the root
        let mut lo = v_prev.min(0.0) - 1.0;
        let mut hi = v_prev.max(0.0) + 1.0;
        let mut grow = 0;
        while g(lo) > 0.0 || g(hi) < 0.0 {
            lo *= 2.0;
            hi *= 2.0;
            grow += 1;
            if grow > 200 {
                return Err(Error::NonConvergence("slider velocity bracket".into()));
            }
        }
        let mut v = v_prev.clamp(lo, hi);
        for _ in 0..200 {
            let gv = g(v);
            if gv == 0.0 {
                return Ok(v);
            }
            if gv > 0.0 {
                hi = v;
            } else {
                lo = v;
            }
            let mut next = v - gv / dg(v);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - v).abs() <= 1e-15 * v.abs().max(self.v_load) {
                return Ok(next);
            }
            v = next;
        }
        Err(Error::NonConvergence("slider velocity solve".into()))
    }
}

/// Runs the slider from steady sliding at `V_load` with the state shifted
/// by `perturbation`, sampling every `dt` for `steps` steps. Internal
/// substeps keep the slip per substep below `L_c/50`.
pub fn spring_slider_run(slider: &SpringSlider, dt: f64, steps: usize, perturbation: f64) -> Result<SliderTrajectory> {
    slider.validate()?;
    if !(dt > 0.0) {
        return Err(invalid("time step must be positive"));
    }
    let law = &slider.law;
    let tau0 = slider.steady_traction()?;
    let mut psi = steady_state(law, slider.v_load)?.psi_ss + perturbation;
    let mut delta = 0.0;
    let mut t = 0.0;
    let mut v = if slider.mass > 0.0 { slider.v_load } else { slip_rate_for_traction(law, slider.sigma_n, tau0, psi) };
    let mut out = SliderTrajectory::default();
    let record = |t: f64, v: f64, psi: f64, delta: f64, out: &mut SliderTrajectory| {
        out.t.push(t);
        out.v.push(v);
        out.psi.push(psi);
        out.delta.push(delta);
        out.tau.push(slider.spring(tau0, t, delta));
    };
    record(t, v, psi, delta, &mut out);
    for s in 1..=steps {
        let t_end = s as f64 * dt;
        while t < t_end {
            let h = (t_end - t).min(0.02 * law.l_c / v.abs().max(slider.v_load)).max(1e-12 * dt);
            let h = if t + h > t_end { t_end - t } else { h };
            if slider.mass == 0.0 {
                let k1 = slider.quasi_static_rate(tau0, t, delta, psi)?;
                let k2 = slider.quasi_static_rate(tau0, t + 0.5 * h, delta + 0.5 * h * k1.0, psi + 0.5 * h * k1.1)?;
                let k3 = slider.quasi_static_rate(tau0, t + 0.5 * h, delta + 0.5 * h * k2.0, psi + 0.5 * h * k2.1)?;
                let k4 = slider.quasi_static_rate(tau0, t + h, delta + h * k3.0, psi + h * k3.1)?;
                delta += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                psi += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                t += h;
                v = slider.quasi_static_rate(tau0, t, delta, psi)?.2;
            } else {
                let v1 = slider.implicit_velocity(tau0, t + h, delta, psi, v, h)?;
                // state by the midpoint rule at the new rate
                let half = psi + 0.5 * h * state_rate(law, psi, v1.abs(), slider.sigma_n, 0.0)?;
                psi += h * state_rate(law, half, v1.abs(), slider.sigma_n, 0.0)?;
                delta += h * v1;
                v = v1;
                t += h;
            }
            if !psi.is_finite() {
                return Err(Error::NonConvergence("slider state diverged".into()));
            }
            if !(v.abs() < RUNAWAY_RATIO * slider.v_load) {
                record(t, v, psi, delta, &mut out);
                out.runaway = true;
                return Ok(out);
            }
        }
        record(t, v, psi, delta, &mut out);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slider(k: f64, a: f64, b: f64) -> SpringSlider {
        SpringSlider { k, mass: 0.0, v_load: 1.0, law: FrictionLaw::new(0.6, a, b, 0.01, 1.0).unwrap(), sigma_n: 1.0 }
    }

    #[test]
    fn inverse_recovers_the_rate() {
        let law = FrictionLaw::new(0.6, 0.01, 0.015, 0.01, 1.0).unwrap();
        for (v, psi) in [(1e-8, 0.0), (0.3, -0.1), (1.0, 0.02), (1e4, 0.0), (-2.0, 0.05)] {
            let tau = 1.7 * friction_regularized(&law, v, psi);
            let back = slip_rate_for_traction(&law, 1.7, tau, psi);
            assert!((back - v).abs() < 1e-10 * v.abs(), "{v}: {back}");
        }
    }

    #[test]
    fn steady_sliding_is_a_fixed_point() {
        let s = slider(0.7, 0.01, 0.015);
        let tr = spring_slider_run(&s, 1e-3, 10_000, 0.0).unwrap();
        let drift = tr.v.iter().fold(0.0f64, |a, v| a.max((v - 1.0).abs()));
        assert!(drift < 1e-8, "{drift}");
    }

    #[test]
    fn stiff_springs_stabilise_weakening_contacts() {
        let stable = spring_slider_run(&slider(1.0, 0.01, 0.015), 1e-3, 3000, 0.002).unwrap();
        let unstable = spring_slider_run(&slider(0.25, 0.01, 0.015), 1e-3, 3000, 0.002).unwrap();
        assert!(stable.growth(1.0) < 0.0, "{}", stable.growth(1.0));
        assert!(unstable.growth(1.0) > 0.0, "{}", unstable.growth(1.0));
        assert!(unstable.runaway);
    }

    #[test]
    fn strengthening_contacts_are_stable() {
        for k in [0.05, 0.25, 1.0] {
            let tr = spring_slider_run(&slider(k, 0.015, 0.01), 1e-3, 3000, 0.002).unwrap();
            assert!(tr.growth(1.0) < 0.0);
        }
    }

    #[test]
    fn inertial_branch_tracks_the_load() {
        let mut s = slider(1.0, 0.01, 0.015);
        s.mass = 1e-4;
        let tr = spring_slider_run(&s, 1e-3, 3000, 0.002).unwrap();
        assert!(tr.growth(1.0) < 0.0);
        assert!((tr.delta.last().unwrap() - 3.0).abs() < 0.05);
    }
}
