//! Browser bindings for three demo operations: a reliability diagram of a
//! simulated series, its decompositions and tests as JSON, and decimal odds
//! conversion.
//!
//! The `*_impl` functions carry the logic and are tested natively.

use fverify::binning::pav_calibrate;
use fverify::decomposition::{cr_decompose, lb_decompose, yates_decompose};
use fverify::diagram::{diagram_data, render_svg};
use fverify::discrimination::c_statistic;
use fverify::inference::{fit_cox_calibration, spiegelhalter_test};
use fverify::ingest::{odds_to_probabilities, OddsTriple};
use fverify::simulate::{generate, CoxParameters, ForecastLaw};
use fverify::{BinaryForecastSeries, ScoreDecomposition};
use serde_json::{json, Map, Value};
use wasm_bindgen::prelude::*;

/// Band resamples; kept low so sliders stay responsive.
pub const DEMO_REPS: usize = 200;

fn simulated(n: usize, alpha: f64, beta: f64, law: &str, seed: u64) -> Result<BinaryForecastSeries, String> {
    let law: ForecastLaw = law.parse()?;
    generate(n, CoxParameters { alpha, beta }, law, seed).map_err(|e| e.to_string())
}

pub fn reliability_svg_impl(
    n: usize,
    alpha: f64,
    beta: f64,
    law: &str,
    seed: u64,
    bands: bool,
) -> Result<String, String> {
    let series = simulated(n, alpha, beta, law, seed)?;
    let binned = pav_calibrate(&series);
    let mut data = diagram_data(&series, &binned, 0.95, DEMO_REPS, seed).map_err(|e| e.to_string())?;
    if !bands {
        data.band.clear();
    }
    Ok(render_svg(&data))
}

fn components(d: &ScoreDecomposition) -> Value {
    let map: Map<String, Value> = d.components.iter().map(|c| (c.name.to_owned(), json!(c.value))).collect();
    Value::Object(map)
}

pub fn analysis_json_impl(n: usize, alpha: f64, beta: f64, law: &str, seed: u64) -> Result<String, String> {
    let series = simulated(n, alpha, beta, law, seed)?;
    let cr = cr_decompose(&series, &pav_calibrate(&series)).map_err(|e| e.to_string())?;
    let cox = match fit_cox_calibration(&series) {
        Ok(fit) => json!({ "alpha": fit.alpha, "beta": fit.beta, "se_alpha": fit.se_alpha, "se_beta": fit.se_beta }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let report = json!({
        "n": series.len(),
        "brier": cr.mean_score,
        "skill": cr.skill,
        "CR": components(&cr),
        "LB": components(&lb_decompose(&series)),
        "YATES": components(&yates_decompose(&series)),
        "spiegelhalter_z": spiegelhalter_test(&series).ok().map(|s| s.z),
        "cox": cox,
        "c_statistic": c_statistic(&series).ok(),
    });
    Ok(report.to_string())
}

/// `[p_home, p_draw, p_away, overround]`.
pub fn convert_odds_impl(home: f64, draw: f64, away: f64) -> Result<Vec<f64>, String> {
    let odds = OddsTriple::new(home, draw, away).map_err(|e| e.to_string())?;
    let mut out = odds_to_probabilities(&odds).to_vec();
    out.push(odds.overround());
    Ok(out)
}

/// SVG reliability diagram of `n` simulated forecasts whose outcomes follow
/// logit Pr(X = 1) = alpha + beta·logit(p).
#[wasm_bindgen]
pub fn reliability_svg(n: usize, alpha: f64, beta: f64, law: &str, seed: u64, bands: bool) -> Result<String, JsError> {
    reliability_svg_impl(n, alpha, beta, law, seed, bands).map_err(|e| JsError::new(&e))
}

/// Decompositions, reliability tests and C statistic of the same simulated
/// series, as a JSON string.
#[wasm_bindgen]
pub fn analysis_json(n: usize, alpha: f64, beta: f64, law: &str, seed: u64) -> Result<String, JsError> {
    analysis_json_impl(n, alpha, beta, law, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn convert_odds(home: f64, draw: f64, away: f64) -> Result<Vec<f64>, JsError> {
    convert_odds_impl(home, draw, away).map_err(|e| JsError::new(&e))
}
