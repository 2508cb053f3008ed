//! Browser bindings. Every entry point takes the same text forms as the
//! command line and returns JSON; the pure functions are usable natively.

use serde::Serialize;
use stabkit_core::*;
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load(group: &str, function: &str) -> Result<TestFunction, String> {
    let g: GroupDescriptor = group.parse().map_err(err)?;
    TestFunction::parse_spec(g, function).map_err(err)
}

fn shells(list: &str) -> Result<Vec<Rational>, String> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse().map_err(err)).collect()
}

/// Scan report as JSON; an empty `weight` gives the plain defect.
pub fn shell_profile(
    group: &str,
    function: &str,
    equation: &str,
    window: &str,
    shell_list: &str,
    weight: &str,
) -> Result<String, String> {
    let f = load(group, function)?;
    let eq: Equation = equation.parse().map_err(err)?;
    let w: Window = window.parse().map_err(err)?;
    let shells = shells(shell_list)?;
    let report = if weight.trim().is_empty() {
        sup_defect_scan(&f, eq, &w, &shells)
    } else {
        weighted_profile(&f, &weight.parse().map_err(err)?, eq, &w, &shells)
    }
    .map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}

#[derive(Serialize)]
struct Heatmap {
    points: Vec<String>,
    /// `values[i][j]` is the defect at `(points[i], points[j])`; approximate.
    values: Vec<Vec<f64>>,
    /// Exact maximum.
    max: String,
}

/// Pairwise defects over every point of the window, row-major.
pub fn defect_heatmap(group: &str, function: &str, equation: &str, window: &str) -> Result<String, String> {
    const MAX_POINTS: usize = 129;
    let f = load(group, function)?;
    let eq: Equation = equation.parse().map_err(err)?;
    let pts = window.parse::<Window>().map_err(err)?.elements(&f.domain()).map_err(err)?;
    if pts.len() > MAX_POINTS {
        return Err(format!("heatmap is limited to {MAX_POINTS} points, window has {}", pts.len()));
    }
    let mut max = Rational::zero();
    let mut values = Vec::with_capacity(pts.len());
    for x in &pts {
        let mut row = Vec::with_capacity(pts.len());
        for y in &pts {
            let d = defect(&f, eq, x, y).map_err(err)?;
            row.push(d.to_f64());
            max = max.max(d);
        }
        values.push(row);
    }
    let heat = Heatmap { points: pts.iter().map(ToString::to_string).collect(), values, max: max.to_string() };
    serde_json::to_string(&heat).map_err(err)
}

/// Certificate JSON; `equation` is `cauchy` or `jensen`.
pub fn certificate(group: &str, function: &str, equation: &str, r: &str, eta: &str, x: &str, y: &str) -> Result<String, String> {
    let f = load(group, function)?;
    let g = f.domain();
    let budget = StabilityBudget::new(r.parse().map_err(err)?, eta.parse().map_err(err)?).map_err(err)?;
    let (x, y) = (g.parse_element(x).map_err(err)?, g.parse_element(y).map_err(err)?);
    let cert = match equation.parse::<Equation>().map_err(err)? {
        Equation::Cauchy => certify_cauchy(&f, &budget, &x, &y).map(Certificate::Cauchy),
        _ => certify_jensen(&f, &budget, &x, &y).map(Certificate::Jensen),
    }
    .map_err(err)?;
    Ok(cert.to_json_pretty())
}

#[wasm_bindgen(js_name = shellProfile)]
pub fn shell_profile_js(
    group: &str,
    function: &str,
    equation: &str,
    window: &str,
    shells: &str,
    weight: &str,
) -> Result<String, JsError> {
    shell_profile(group, function, equation, window, shells, weight).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = defectHeatmap)]
pub fn defect_heatmap_js(group: &str, function: &str, equation: &str, window: &str) -> Result<String, JsError> {
    defect_heatmap(group, function, equation, window).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = certify)]
pub fn certificate_js(
    group: &str,
    function: &str,
    equation: &str,
    r: &str,
    eta: &str,
    x: &str,
    y: &str,
) -> Result<String, JsError> {
    certificate(group, function, equation, r, eta, x, y).map_err(|e| JsError::new(&e))
}
