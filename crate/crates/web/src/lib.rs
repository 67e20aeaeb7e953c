//! Browser bindings: friction curves, spring-slider runs and radial gravity
//! profiles. Every function returns a flat row-major table.

use stratovar::gravity::{hydrostatic_solve, RadialDensityModel};
use stratovar::numerics::Vec3;
use stratovar::rupture::{friction_regularized, spring_slider_run, steady_state, FrictionLaw, SpringSlider};
use wasm_bindgen::prelude::*;

fn js(e: stratovar::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Rows `(V, f_ss(V), f_reg(V, ψ = 0))` at `n` log-spaced rates.
pub fn friction_table(f0: f64, a: f64, b: f64, v0: f64, v_min: f64, v_max: f64, n: usize) -> stratovar::Result<Vec<f64>> {
    let law = FrictionLaw::new(f0, a, b, 1.0, v0)?;
    if !(v_min > 0.0 && v_max > v_min) || n < 2 {
        return Err(stratovar::Error::InvalidArgument("need 0 < v_min < v_max and n >= 2".into()));
    }
    let step = (v_max / v_min).ln() / (n - 1) as f64;
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        let v = v_min * (step * i as f64).exp();
        out.extend([v, steady_state(&law, v)?.f_ss, friction_regularized(&law, v, 0.0)]);
    }
    Ok(out)
}

/// Rows `(t, V, ψ, τ)`; the last entry is the growth indicator, positive
/// when the perturbation grows.
#[allow(clippy::too_many_arguments)]
pub fn slider_table(k: f64, a: f64, b: f64, l_c: f64, sigma_n: f64, v_load: f64, dt: f64, steps: usize, perturbation: f64) -> stratovar::Result<Vec<f64>> {
    let law = FrictionLaw::new(0.6, a, b, l_c, 1.0)?;
    let s = SpringSlider { k, mass: 0.0, v_load, law, sigma_n };
    let tr = spring_slider_run(&s, dt, steps, perturbation)?;
    let mut out = Vec::with_capacity(4 * tr.t.len() + 1);
    for i in 0..tr.t.len() {
        out.extend([tr.t[i], tr.v[i], tr.psi[i], tr.tau[i]]);
    }
    out.push(tr.growth(v_load));
    Ok(out)
}

/// Rows `(r, Φ, g, p⁰, ρ)` for a layered ball.
pub fn radial_table(radii: &[f64], densities: &[f64], g: f64, n: usize) -> stratovar::Result<Vec<f64>> {
    let model = RadialDensityModel::new(radii.to_vec(), densities.to_vec(), g)?;
    let p = hydrostatic_solve(&model, &Vec3::zeros(), n)?;
    let mut out = Vec::with_capacity(5 * p.r.len());
    for i in 0..p.r.len() {
        out.extend([p.r[i], model.potential_at_radius(p.r[i]), p.g[i], p.p0[i], p.rho[i]]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn friction_curves(f0: f64, a: f64, b: f64, v0: f64, v_min: f64, v_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    friction_table(f0, a, b, v0, v_min, v_max, n).map_err(js)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn slider_trajectory(k: f64, a: f64, b: f64, l_c: f64, sigma_n: f64, v_load: f64, dt: f64, steps: usize, perturbation: f64) -> Result<Vec<f64>, JsError> {
    slider_table(k, a, b, l_c, sigma_n, v_load, dt, steps, perturbation).map_err(js)
}

#[wasm_bindgen]
pub fn radial_profiles(radii: Vec<f64>, densities: Vec<f64>, g: f64, n: usize) -> Result<Vec<f64>, JsError> {
    radial_table(&radii, &densities, g, n).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steady_state_friction_at_ten_v0() {
        let t = friction_table(0.6, 0.01, 0.015, 1.0, 1.0, 100.0, 3).unwrap();
        assert_eq!(t.len(), 9);
        assert!((t[3] - 10.0).abs() < 1e-12);
        assert!((t[4] - 0.588487).abs() < 1e-6);
        assert!(friction_table(0.6, 0.01, 0.015, 1.0, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn slider_verdicts_bracket_the_critical_stiffness() {
        let grow = |k| *slider_table(k, 0.01, 0.015, 0.01, 1.0, 1.0, 1e-3, 3000, 0.002).unwrap().last().unwrap();
        assert!(grow(1.0) < 0.0);
        assert!(grow(0.25) > 0.0);
    }

    #[test]
    fn uniform_ball_centre_pressure() {
        let t = radial_table(&[1.0], &[1.0], 1.0, 11).unwrap();
        assert_eq!(t.len(), 55);
        assert!((t[3] - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-9);
        assert!((t[1] + 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
