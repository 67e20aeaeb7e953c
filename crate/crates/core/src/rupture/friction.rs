use crate::error::{invalid, Result};
use crate::numerics::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateLaw {
    Aging,
    Slip,
}

/// Normal-stress coupling coefficient of the state equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormalCoupling {
    Constant(f64),
    /// The coefficient follows the current regularized friction coefficient.
    Friction,
}

/// Rate-and-state friction parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionLaw {
    pub f0: f64,
    pub a: f64,
    pub b: f64,
    pub l_c: f64,
    pub v0: f64,
    pub v_creep: f64,
    pub state_law: StateLaw,
    pub gamma_ld: NormalCoupling,
}

impl FrictionLaw {
    pub fn new(f0: f64, a: f64, b: f64, l_c: f64, v0: f64) -> Result<Self> {
        let law = Self { f0, a, b, l_c, v0, v_creep: 0.0, state_law: StateLaw::Aging, gamma_ld: NormalCoupling::Constant(0.0) };
        law.validate()?;
        Ok(law)
    }

    pub fn with_state_law(mut self, law: StateLaw) -> Self {
        self.state_law = law;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0 && self.l_c > 0.0 && self.v0 > 0.0) {
            return Err(invalid("friction law needs a, b, L_c and V0 positive"));
        }
        if !(self.v_creep >= 0.0) || !self.f0.is_finite() {
            return Err(invalid("friction law needs V_creep ≥ 0 and finite f0"));
        }
        Ok(())
    }

    fn rate(&self, v: f64) -> Result<f64> {
        let ve = v + self.v_creep;
        if !(ve > 0.0) {
            return Err(invalid(format!("slip rate {v:e} plus creep rate must be positive")));
        }
        Ok(ve)
    }
}

/// `f = f0 + a ln((V + V_creep)/V0) + ψ`.
pub fn friction_coefficient(law: &FrictionLaw, v: f64, psi: f64) -> Result<f64> {
    let ve = law.rate(v)?;
    Ok(law.f0 + law.a * (ve / law.v0).ln() + psi)
}

/// `f^reg = a asinh((V + V_creep)/(2V0) · exp((f0 + ψ)/a))`, odd in `V`.
pub fn friction_regularized(law: &FrictionLaw, v: f64, psi: f64) -> f64 {
    let ve = v.abs() + law.v_creep;
    v.signum() * reg_magnitude(law, ve, psi)
}

fn reg_magnitude(law: &FrictionLaw, ve: f64, psi: f64) -> f64 {
    if ve == 0.0 {
        return 0.0;
    }
    // log of the asinh argument
    let l = (ve / (2.0 * law.v0)).ln() + (law.f0 + psi) / law.a;
    if l > 20.0 {
        // asinh(e^l) = l + ln 2 + ln1p(w / (2(√(1+w) + 1))), w = e^{−2l}
        let w = (-2.0 * l).exp();
        law.f0 + psi + law.a * (ve / law.v0).ln() + law.a * (w / (2.0 * ((1.0 + w).sqrt() + 1.0))).ln_1p()
    } else {
        law.a * l.exp().asinh()
    }
}

/// `∂f^reg/∂V` at `V ≥ 0`.
pub fn friction_regularized_slope(law: &FrictionLaw, v: f64, psi: f64) -> f64 {
    let ve = v.abs() + law.v_creep;
    let l = (ve.max(f64::MIN_POSITIVE) / (2.0 * law.v0)).ln() + (law.f0 + psi) / law.a;
    if l > 20.0 {
        law.a / (ve * (1.0 + (-2.0 * l).exp()).sqrt())
    } else {
        let c = ((law.f0 + psi) / law.a).exp() / (2.0 * law.v0);
        law.a * c / (1.0 + (c * ve).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub psi_ss: f64,
    pub f_ss: f64,
}

pub fn steady_state(law: &FrictionLaw, v: f64) -> Result<SteadyState> {
    let x = (law.rate(v)? / law.v0).ln();
    Ok(SteadyState { psi_ss: -law.b * x, f_ss: law.f0 + (law.a - law.b) * x })
}

/// `ψ̇` for the configured state law, including the normal-stress term
/// `−(γ/σ_N) σ̇_N`.
pub fn state_rate(law: &FrictionLaw, psi: f64, v: f64, sigma_n: f64, sigma_n_dot: f64) -> Result<f64> {
    if !(sigma_n > 0.0) {
        return Err(invalid(format!("normal stress {sigma_n:e} must be compressive")));
    }
    let ve = v + law.v_creep;
    if !(ve >= 0.0) {
        return Err(invalid(format!("slip rate {v:e} must be non-negative")));
    }
    let base = match law.state_law {
        StateLaw::Aging => law.b * law.v0 / law.l_c * (-psi / law.b).exp() - law.b * ve / law.l_c,
        // V ln V → 0 at a locked contact
        StateLaw::Slip if ve == 0.0 => 0.0,
        StateLaw::Slip => -(ve / law.l_c) * (psi - steady_state(law, v)?.psi_ss),
    };
    let gamma = match law.gamma_ld {
        NormalCoupling::Constant(g) => g,
        NormalCoupling::Friction => friction_regularized(law, v, psi),
    };
    Ok(base - gamma / sigma_n * sigma_n_dot)
}

/// State of one fault point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultPointState {
    pub psi: f64,
    /// Tangential slip rate vector.
    pub v_t: Vec3,
    /// Compressive normal stress.
    pub sigma_n: f64,
    pub tau_f: Vec3,
    /// Accumulated slip.
    pub delta: Vec3,
}

impl FaultPointState {
    pub fn at_rest(psi: f64, sigma_n: f64) -> Self {
        Self { psi, v_t: Vec3::zeros(), sigma_n, tau_f: Vec3::zeros(), delta: Vec3::zeros() }
    }
}

/// Largest frictional traction the point can sustain without slipping.
pub fn strength(law: &FrictionLaw, state: &FaultPointState) -> f64 {
    state.sigma_n * reg_magnitude(law, law.v_creep, state.psi)
}

/// `τ_f = σ_N f^reg(|V_T|, ψ) V_T/|V_T|`; zero when `V_T = 0`, where the
/// admissible traction is bounded by [`strength`].
pub fn traction_vector(law: &FrictionLaw, state: &FaultPointState, nu: &Vec3) -> Result<Vec3> {
    let v = state.v_t;
    let speed = v.norm();
    if v.dot(nu).abs() > 1e-12 * speed.max(f64::MIN_POSITIVE) && speed > 0.0 {
        return Err(invalid("slip rate must be tangential to the fault"));
    }
    if !(state.sigma_n > 0.0) {
        return Err(invalid(format!("normal stress {:e} must be compressive", state.sigma_n)));
    }
    if speed == 0.0 {
        return Ok(Vec3::zeros());
    }
    Ok(v * (state.sigma_n * reg_magnitude(law, speed + law.v_creep, state.psi) / speed))
}

/// `|τ_f| V_T − τ_f |V_T|`, componentwise.
pub fn collinearity_residual(tau: &Vec3, v: &Vec3) -> Vec3 {
    v * tau.norm() - tau * v.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law() -> FrictionLaw {
        FrictionLaw::new(0.6, 0.010, 0.015, 0.01, 1.0).unwrap()
    }

    #[test]
    fn reference_values() {
        let l = law();
        assert_eq!(friction_coefficient(&l, 1.0, 0.0).unwrap(), 0.6);
        assert!((friction_coefficient(&l, std::f64::consts::E, 0.0).unwrap() - 0.61).abs() < 1e-15);
        assert!((friction_regularized(&l, 1.0, 0.0) - 0.6).abs() < 1e-20);
        assert_eq!(friction_regularized(&l, 0.0, 0.0), 0.0);
        assert!(friction_coefficient(&l, 0.0, 0.0).is_err());
        let ss = steady_state(&l, 10.0).unwrap();
        assert!((ss.f_ss - 0.588487).abs() < 1e-6);
    }

    #[test]
    fn regularization_is_odd_and_monotone() {
        let l = law();
        let mut prev = f64::NEG_INFINITY;
        for k in -40..=40 {
            let v = 10f64.powf(k as f64 / 4.0);
            assert_eq!(friction_regularized(&l, -v, 0.1), -friction_regularized(&l, v, 0.1));
            let f = friction_regularized(&l, v, 0.1);
            assert!(f > prev);
            prev = f;
        }
    }

    #[test]
    fn regularized_slope_matches_differences() {
        let l = law();
        for (v, psi) in [(1e-30, 0.0), (1e-27, 0.0), (0.3, -0.2), (5.0, 0.1), (1e-3, -0.55)] {
            let h = 1e-6 * v;
            let fd = (friction_regularized(&l, v + h, psi) - friction_regularized(&l, v - h, psi)) / (2.0 * h);
            let s = friction_regularized_slope(&l, v, psi);
            assert!((fd - s).abs() < 1e-6 * s.abs(), "{v} {psi}: {fd} vs {s}");
        }
    }

    #[test]
    fn steady_state_is_a_fixed_point() {
        for sl in [StateLaw::Aging, StateLaw::Slip] {
            let l = law().with_state_law(sl);
            for v in [1e-3, 1.0, 42.0] {
                let ss = steady_state(&l, v).unwrap();
                assert!(state_rate(&l, ss.psi_ss, v, 2.0, 0.0).unwrap().abs() < 1e-12);
                // monotone approach
                assert!(state_rate(&l, ss.psi_ss + 0.01, v, 2.0, 0.0).unwrap() < 0.0);
                assert!(state_rate(&l, ss.psi_ss - 0.01, v, 2.0, 0.0).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn normal_stress_term_is_isolated() {
        let mut l = law();
        l.gamma_ld = NormalCoupling::Constant(0.3);
        let a = state_rate(&l, 0.02, 2.0, 1.5, 0.0).unwrap();
        let b = state_rate(&l, 0.02, 2.0, 1.5, 0.6).unwrap();
        assert!((a - b - 0.3 * 0.6 / 1.5).abs() < 1e-15);
        assert!(state_rate(&l, 0.0, 1.0, 0.0, 0.0).is_err());
        // healing at a locked contact
        assert!(state_rate(&l, 0.0, 0.0, 1.0, 0.0).unwrap() > 0.0);
        assert_eq!(state_rate(&l.with_state_law(StateLaw::Slip), 0.0, 0.0, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn traction_is_collinear() {
        let l = law();
        let nu = Vec3::z();
        let mut s = FaultPointState::at_rest(0.05, 1.3);
        assert_eq!(traction_vector(&l, &s, &nu).unwrap(), Vec3::zeros());
        s.v_t = Vec3::new(-0.7, 0.0, 0.0);
        let t = traction_vector(&l, &s, &nu).unwrap();
        assert!((t.x + 1.3 * friction_regularized(&l, 0.7, 0.05)).abs() < 1e-15 && t.y == 0.0);
        s.v_t = Vec3::new(0.3, 0.2, 0.1);
        assert!(traction_vector(&l, &s, &nu).is_err());
    }
}
