//! Browser demo: three curve-valued operations exported through
//! `wasm-bindgen`, each returning a JSON string for the page to plot.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use lilbound::bound::{theorem_bound, BoundOptions, BoundProblem};
use lilbound::grid::{lin_space, log_space};
use lilbound::phi::conjugate_grid;
use lilbound::registry;
use lilbound::verify::empirical_sup_tail;

/// Largest horizon times paths the page may request in one call.
pub const MAX_WORK: u64 = 50_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct ConjugateCurve {
    pub phi: String,
    pub u: Vec<f64>,
    pub phi_star: Vec<f64>,
}

/// `φ*(u)` on `points` evenly spaced `u ∈ [0, u_max]`.
pub fn conjugate_curve(phi_id: &str, u_max: f64, points: usize) -> Result<ConjugateCurve, String> {
    if !(u_max > 0.0) || !(2..=2000).contains(&points) {
        return Err("need u_max > 0 and 2 to 2000 points".into());
    }
    let phi = registry::parse_phi(phi_id).map_err(|e| e.to_string())?;
    let grid = conjugate_grid(&phi, &lin_space(0.0, u_max, points)).map_err(|e| e.to_string())?;
    Ok(ConjugateCurve {
        phi: phi.label().to_string(),
        u: grid.u_values,
        phi_star: grid.phi_star_values,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCurve {
    pub model: String,
    pub norming: String,
    pub c: f64,
    pub u: Vec<f64>,
    /// `+∞` (divergent) points are sent as `null`.
    pub bound: Vec<Option<f64>>,
    pub ratio: Vec<f64>,
}

/// Optimized block-sum bound for a built-in model on log-spaced
/// `u ∈ [u_lo, u_hi]`.
pub fn bound_curve(
    model_id: &str,
    norming_id: &str,
    c: f64,
    u_lo: f64,
    u_hi: f64,
    points: usize,
) -> Result<BoundCurve, String> {
    if !(u_lo > 0.0 && u_hi > u_lo) || !(2..=200).contains(&points) {
        return Err("need 0 < u_lo < u_hi and 2 to 200 points".into());
    }
    let model = registry::parse_model(model_id).map_err(|e| e.to_string())?;
    let phi = model
        .phi()
        .ok_or_else(|| format!("{model_id} has no associated generator"))?;
    let v = registry::parse_norming(norming_id).map_err(|e| e.to_string())?;
    let problem = BoundProblem::new(v, model.sigma_profile(), phi);
    let u = log_space(u_lo, u_hi, points);
    let report = theorem_bound(&problem, &u, c, &BoundOptions::default()).map_err(|e| e.to_string())?;
    Ok(BoundCurve {
        model: model.id(),
        norming: report.norming.clone(),
        c,
        bound: report.bounds.iter().map(|b| b.is_finite().then_some(*b)).collect(),
        ratio: report.chosen_ratio.clone(),
        u,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TailCurve {
    pub model: String,
    pub horizon: u64,
    pub paths: u64,
    pub u: Vec<f64>,
    pub w_hat: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub w_plus_hat: Vec<f64>,
}

/// Monte Carlo sup tail on evenly spaced `u ∈ [u_lo, u_hi]`.
#[allow(clippy::too_many_arguments)]
pub fn tail_curve(
    model_id: &str,
    norming_id: &str,
    horizon: u64,
    paths: u64,
    seed: u64,
    u_lo: f64,
    u_hi: f64,
    points: usize,
) -> Result<TailCurve, String> {
    if !(u_hi > u_lo) || !(2..=200).contains(&points) {
        return Err("need u_lo < u_hi and 2 to 200 points".into());
    }
    if horizon.saturating_mul(paths) > MAX_WORK {
        return Err(format!("horizon x paths is capped at {MAX_WORK} in the browser"));
    }
    let model = registry::parse_model(model_id).map_err(|e| e.to_string())?;
    let v = registry::parse_norming(norming_id).map_err(|e| e.to_string())?;
    let u = lin_space(u_lo, u_hi, points);
    let est = empirical_sup_tail(&model, &v, horizon, paths, &u, seed).map_err(|e| e.to_string())?;
    Ok(TailCurve {
        model: model.id(),
        horizon,
        paths,
        u,
        w_hat: est.w_hat,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        w_plus_hat: est.w_plus_hat,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = conjugateCurve)]
pub fn conjugate_curve_js(phi_id: &str, u_max: f64, points: usize) -> Result<String, JsValue> {
    to_js(conjugate_curve(phi_id, u_max, points))
}

#[wasm_bindgen(js_name = boundCurve)]
pub fn bound_curve_js(
    model_id: &str,
    norming_id: &str,
    c: f64,
    u_lo: f64,
    u_hi: f64,
    points: usize,
) -> Result<String, JsValue> {
    to_js(bound_curve(model_id, norming_id, c, u_lo, u_hi, points))
}

#[wasm_bindgen(js_name = tailCurve)]
#[allow(clippy::too_many_arguments)]
pub fn tail_curve_js(
    model_id: &str,
    norming_id: &str,
    horizon: u32,
    paths: u32,
    seed: u32,
    u_lo: f64,
    u_hi: f64,
    points: usize,
) -> Result<String, JsValue> {
    to_js(tail_curve(model_id, norming_id, horizon as u64, paths as u64, seed as u64, u_lo, u_hi, points))
}
