//! Browser bindings. Each export returns a JSON string; errors are thrown as
//! JS strings.

use serde_json::json;
use wasm_bindgen::prelude::*;

use scghg_core::damages_macro::{impulse_response, run_damage, Study, T_BASE};
use scghg_core::discounting::{ce_term_structure, RamseyParams};
use scghg_core::patterns::UsTempPath;

const HIST_START: i32 = 1900;
const RAMP_START: i32 = 2020;
const RAMP_END: i32 = 2100;

fn study(name: &str) -> Result<Study, String> {
    name.parse().map_err(|e: scghg_core::Error| e.to_string())
}

/// Impulse response of one macro family to a 1 C shock at `t_eval`.
pub fn irf_json(name: &str, horizon: usize, t_eval: f64) -> Result<String, String> {
    let s = study(name)?;
    let i = impulse_response(&s.default_spec(), horizon.min(200), t_eval).map_err(|e| e.to_string())?;
    Ok(json!({ "study": s.as_str(), "response": i.response, "lo95": i.lo95, "hi95": i.hi95 }).to_string())
}

/// Loss fraction in the final year of a linear U.S. warming ramp, for each
/// end-of-ramp warming in `0..=max_warming`.
pub fn damage_curve_json(name: &str, max_warming: f64, steps: usize) -> Result<String, String> {
    if !(max_warming.is_finite() && max_warming > 0.0) || steps == 0 {
        return Err("max_warming must be positive and steps at least 1".into());
    }
    let spec = study(name)?.default_spec();
    let ramp = (RAMP_END - RAMP_START) as usize;
    let mut warming = Vec::with_capacity(steps + 1);
    let mut loss = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let dt = max_warming * k as f64 / steps as f64;
        let mut level = vec![T_BASE; (RAMP_START - HIST_START) as usize];
        level.extend((0..=ramp).map(|i| T_BASE + dt * i as f64 / ramp as f64));
        let us = UsTempPath { start_year: HIST_START, level };
        let d = run_damage(&spec, &us, RAMP_START, ramp + 1).map_err(|e| e.to_string())?;
        warming.push(dt);
        loss.push(d.loss(ramp));
    }
    Ok(json!({ "study": name, "warming": warming, "loss": loss }).to_string())
}

/// Certainty-equivalent discount rates for an ensemble of constant growth
/// paths spread uniformly with the given mean and standard deviation.
pub fn term_structure_json(rho: f64, eta: f64, mean: f64, sd: f64, members: usize, horizon: usize) -> Result<String, String> {
    if members == 0 || horizon == 0 || sd < 0.0 {
        return Err("members and horizon must be positive, sd non-negative".into());
    }
    let half = sd * 3f64.sqrt();
    let growth: Vec<Vec<f64>> = (0..members)
        .map(|i| {
            let u = (i as f64 + 0.5) / members as f64;
            vec![mean + half * (2.0 * u - 1.0); horizon.min(1000)]
        })
        .collect();
    let p = RamseyParams { rho, eta, alpha: 0.0 };
    let rates = ce_term_structure(&growth, &p, horizon.min(1000)).map_err(|e| e.to_string())?;
    Ok(json!({ "rates": rates }).to_string())
}

#[wasm_bindgen]
pub fn studies() -> String {
    json!(Study::ALL.iter().map(|s| s.as_str()).collect::<Vec<_>>()).to_string()
}

#[wasm_bindgen]
pub fn irf(name: &str, horizon: usize, t_eval: f64) -> Result<String, JsValue> {
    irf_json(name, horizon, t_eval).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn damage_curve(name: &str, max_warming: f64, steps: usize) -> Result<String, JsValue> {
    damage_curve_json(name, max_warming, steps).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn term_structure(rho: f64, eta: f64, mean: f64, sd: f64, members: usize, horizon: usize) -> Result<String, JsValue> {
    term_structure_json(rho, eta, mean, sd, members, horizon).map_err(JsValue::from)
}
