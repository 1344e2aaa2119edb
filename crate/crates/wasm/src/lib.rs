//! Browser bindings: bound curves, a bounds table and small simulations.
//!
//! Each export wraps a plain function returning `Result<String, String>`,
//! so the same logic is tested natively.

use wasm_bindgen::prelude::*;

use cascade_lab::attacks::AttackSpec;
use cascade_lab::bounds::{bounds_report, curves_csv, emit_curves};
use cascade_lab::estimator::{estimate_advantage, EstimateOptions};
use cascade_lab::game::{Operator, OracleBudget};
use cascade_lab::CipherParams;

/// Upper limit on trials per world for a page request; the page runs on
/// the main thread.
pub const MAX_BROWSER_TRIALS: u64 = 200_000;

pub fn curves(kappa: u32, n: u32, from: f64, to: f64, step: f64) -> Result<String, String> {
    let rows = emit_curves(kappa, n, from, to, step).map_err(|e| e.to_string())?;
    Ok(curves_csv(&rows))
}

pub fn bounds(kappa: u32, n: u32, log2_t: f64, op: &str) -> Result<String, String> {
    let op: Operator = op.parse().map_err(|e: cascade_lab::Error| e.to_string())?;
    let report = bounds_report(kappa, n, log2_t.exp2(), op).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    op: &str,
    kappa: u32,
    n: u32,
    q: u64,
    t: u64,
    attack: &str,
    trials: u64,
    seed: u64,
) -> Result<String, String> {
    if trials == 0 || trials > MAX_BROWSER_TRIALS {
        return Err(format!("trials must be in 1..={MAX_BROWSER_TRIALS} in the browser"));
    }
    let run = || -> cascade_lab::Result<String> {
        let op: Operator = op.parse()?;
        let params = CipherParams::new(kappa, n)?;
        let spec: AttackSpec = attack.parse()?;
        let budget = OracleBudget::new(q, t);
        let adversary = spec.build(params, budget)?;
        let est = estimate_advantage(
            adversary.as_ref(),
            op,
            params,
            budget,
            trials,
            seed,
            EstimateOptions::default(),
        )?;
        let mut record = est.record();
        record.attack = spec.to_string();
        Ok(record.to_json())
    };
    run().map_err(|e| e.to_string())
}

/// CSV with columns `log2_t,sec1,sec2_upper,sec2_lower`.
#[wasm_bindgen(js_name = curvesCsv)]
pub fn curves_js(kappa: u32, n: u32, from: f64, to: f64, step: f64) -> Result<String, JsValue> {
    curves(kappa, n, from, to, step).map_err(|e| JsValue::from_str(&e))
}

/// JSON object with the single, upper and optimal-lower bounds at `t = 2^log2_t`.
#[wasm_bindgen(js_name = boundsJson)]
pub fn bounds_js(kappa: u32, n: u32, log2_t: f64, op: &str) -> Result<String, JsValue> {
    bounds(kappa, n, log2_t, op).map_err(|e| JsValue::from_str(&e))
}

/// One advantage record as JSON. Budgets arrive as `f64` because JS numbers
/// are doubles; they must be nonnegative integers.
#[wasm_bindgen(js_name = simulateJson)]
#[allow(clippy::too_many_arguments)]
pub fn simulate_js(
    op: &str,
    kappa: u32,
    n: u32,
    q: f64,
    t: f64,
    attack: &str,
    trials: f64,
    seed: f64,
) -> Result<String, JsValue> {
    let int = |v: f64, name: &str| -> Result<u64, JsValue> {
        if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(53) {
            Ok(v as u64)
        } else {
            Err(JsValue::from_str(&format!("{name} must be a nonnegative integer")))
        }
    };
    simulate(
        op,
        kappa,
        n,
        int(q, "q")?,
        int(t, "t")?,
        attack,
        int(trials, "trials")?,
        int(seed, "seed")?,
    )
    .map_err(|e| JsValue::from_str(&e))
}
