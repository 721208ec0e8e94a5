//! Three operations for the static page in `www/`. Each takes the single zero
//! `a` of `F_a(z) = z (z - a)/(1 - ā z)` and returns a flat numeric array.

use num_complex::Complex64;
use thermoform_core::{orbit, transfer, Arc, ArcSet, BlaschkeMap, CirclePoint, Observable};
use wasm_bindgen::prelude::*;

/// Largest `T` the page may request; keeps enumeration under a second.
pub const T_LIMIT: f64 = 14.0;

fn map(re: f64, im: f64) -> Result<BlaschkeMap, String> {
    BlaschkeMap::one_zero(Complex64::new(re, im)).map_err(|e| e.to_string())
}

pub fn clark(re: f64, im: f64, alpha: f64) -> Result<Vec<f64>, String> {
    let mu = map(re, im)?.clark_measure(CirclePoint::new(alpha)).map_err(|e| e.to_string())?;
    Ok(mu.atoms.iter().flat_map(|(p, m)| [p.angle(), *m]).collect())
}

pub fn ratios(re: f64, im: f64, x: f64, b0: f64, b1: f64, t_max: f64) -> Result<Vec<f64>, String> {
    let f = map(re, im)?;
    let t_max = t_max.clamp(1.0, T_LIMIT);
    let set = if b1 - b0 >= std::f64::consts::TAU {
        ArcSet::full()
    } else {
        ArcSet::new(vec![Arc::new(b0, b1)]).map_err(|e| e.to_string())?
    };
    let ledger = orbit::enumerate(&f, CirclePoint::new(x), t_max).map_err(|e| e.to_string())?.restrict_arcs(&set);
    let lyapunov = f.lyapunov_exponent(1024).map_err(|e| e.to_string())?;
    Ok((1..=t_max as usize)
        .map(|t| {
            let t = t as f64;
            ledger.count(t, true) as f64 * (-t).exp() * lyapunov / set.measure()
        })
        .collect())
}

pub fn pressures(re: f64, im: f64, obs: &str, ts: &[f64]) -> Result<Vec<f64>, String> {
    let f = map(re, im)?;
    let g: Observable = obs.parse().map_err(|e: thermoform_core::Error| e.to_string())?;
    ts.iter().map(|t| transfer::pressure(&f, &g, *t, 64).map(|(p, _)| p).map_err(|e| e.to_string())).collect()
}

/// Atoms of the Clark measure at angle `alpha`, as `[θ_1, m_1, θ_2, m_2]`.
#[wasm_bindgen]
pub fn clark_atoms(re: f64, im: f64, alpha: f64) -> Result<Vec<f64>, JsError> {
    clark(re, im, alpha).map_err(|e| JsError::new(&e))
}

/// `N(T) e^{-T} Λ / m(B)` at `T = 1, 2, ..., t_max` for backward orbits of
/// the angle `x` landing in the arc `[b0, b1]`.
#[wasm_bindgen]
pub fn counting_ratio(re: f64, im: f64, x: f64, b0: f64, b1: f64, t_max: f64) -> Result<Vec<f64>, JsError> {
    ratios(re, im, x, b0, b1, t_max).map_err(|e| JsError::new(&e))
}

/// `P(t)` at each `t` in `ts` for the potential `-log|F'| + t·g`.
#[wasm_bindgen]
pub fn pressure_curve(re: f64, im: f64, obs: &str, ts: &[f64]) -> Result<Vec<f64>, JsError> {
    pressures(re, im, obs, ts).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_map_operations() {
        let atoms = clark(0.5, 0.0, 0.0).unwrap();
        assert_eq!(atoms.len(), 4);
        assert!((atoms[1] - 0.25).abs() < 1e-10 && (atoms[3] - 0.75).abs() < 1e-10);
        let r = ratios(0.5, 0.0, 0.7, 0.0, std::f64::consts::TAU, 10.0).unwrap();
        assert_eq!(r.len(), 10);
        assert!((r[9] - 1.0).abs() < 0.15);
        let p = pressures(0.5, 0.0, "cos", &[0.0, 0.5]).unwrap();
        assert!(p[0].abs() < 1e-10 && p[1] > 0.0);
        assert!(clark(1.5, 0.0, 0.0).is_err());
    }
}
