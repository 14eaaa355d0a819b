//! Browser bindings for `qfivol-core`.
//!
//! Three operations, each returning a JSON string:
//!
//! - [`tilde_curves`]: `f` and `f̃` for SLD, WY and WYD(β) on `[0, x_max]`.
//! - [`qubit_explorer`]: covariance, QFI bound, gap and Robertson bound for
//!   `(σ_x, σ_y)` on a qubit state with Bloch vector `(r sin θ, 0, r cos θ)`.
//! - [`random_gap`]: `F(f)` and its `H · K` decomposition for a seeded random
//!   complex sample.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qfivol_core::decomposition::decompose_f;
use qfivol_core::matrix::{DensityMatrix, HermitianMatrix};
use qfivol_core::monotone::MonotoneFunction;
use qfivol_core::random::{sample_density, sample_hermitian, Ensemble, RandomSpec};
use qfivol_core::volume::{classify, compute_report, robertson_bound, GramSpec};
use qfivol_core::C64;

fn functions(beta: f64) -> Result<Vec<MonotoneFunction>, String> {
    Ok(vec![
        MonotoneFunction::sld(),
        MonotoneFunction::wy(),
        MonotoneFunction::wyd(beta).map_err(|e| e.to_string())?,
    ])
}

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

/// Curves of `f` and `f̃` sampled at `points` equally spaced `x ∈ [0, x_max]`.
pub fn tilde_curves_json(beta: f64, x_max: f64, points: usize) -> Result<String, String> {
    if !(x_max > 0.0) || !(2..=4096).contains(&points) {
        return Err("need x_max > 0 and 2..=4096 points".into());
    }
    let xs: Vec<f64> = (0..points).map(|k| x_max * k as f64 / (points - 1) as f64).collect();
    let mut curves = Vec::new();
    for f in functions(beta)? {
        let t = f.tilde().map_err(|e| e.to_string())?;
        curves.push(json!({
            "id": f.id().to_string(),
            "f": xs.iter().map(|&x| f.evaluate(x)).collect::<Vec<_>>(),
            "tilde": xs.iter().map(|&x| t.evaluate(x)).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({ "x": xs, "curves": curves }).to_string())
}

fn qubit_state(r: f64, theta: f64) -> Result<DensityMatrix, String> {
    if !(0.0..=1.0).contains(&r) {
        return Err("Bloch radius must lie in [0, 1]".into());
    }
    let (x, z) = (r * theta.sin(), r * theta.cos());
    let m = HermitianMatrix::from_complex_rows(
        2,
        &[
            C64::new(0.5 * (1.0 + z), 0.0),
            C64::new(0.5 * x, 0.0),
            C64::new(0.5 * x, 0.0),
            C64::new(0.5 * (1.0 - z), 0.0),
        ],
    )
    .map_err(|e| e.to_string())?;
    DensityMatrix::new(m).map_err(|e| e.to_string())
}

/// Gram determinants for `(σ_x, σ_y)` on a qubit.
pub fn qubit_explorer_json(r: f64, theta: f64, beta: f64) -> Result<String, String> {
    let rho = qubit_state(r, theta)?;
    let obs = vec![HermitianMatrix::pauli_x(), HermitianMatrix::pauli_y()];
    let robertson = robertson_bound(&rho, &obs).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    let mut cov_det = 0.0;
    for f in functions(beta)? {
        let spec = GramSpec::new(rho.clone(), obs.clone(), f.clone()).map_err(|e| e.to_string())?;
        let rep = compute_report(&spec, false).map_err(|e| e.to_string())?;
        cov_det = rep.cov_det;
        rows.push(json!({
            "id": f.id().to_string(),
            "qfi_det": rep.qfi_det,
            "F": rep.f_gap,
            "v_f": rep.qfi_volume,
        }));
    }
    Ok(json!({
        "eigenvalues": rho.eigenvalues(),
        "cov_det": cov_det,
        "robertson_det": robertson,
        "functions": rows,
    })
    .to_string())
}

/// `F(f)` by determinants and by the `H · K` sum for one random sample.
pub fn random_gap_json(seed: u64, dim: usize, n: usize, beta: f64) -> Result<String, String> {
    if !(2..=5).contains(&dim) || !(1..=3).contains(&n) {
        return Err("need dim in 2..=5 and n in 1..=3".into());
    }
    let rho = sample_density(&RandomSpec::new(seed, dim, Ensemble::Density), 0).map_err(|e| e.to_string())?;
    let obs_spec = RandomSpec::new(seed, dim, Ensemble::ComplexHermitian);
    let obs = (0..n as u64)
        .map(|k| sample_hermitian(&obs_spec, k))
        .collect::<qfivol_core::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let mut rows: Vec<Value> = Vec::new();
    let mut case = String::new();
    for f in functions(beta)? {
        let spec = GramSpec::new(rho.clone(), obs.clone(), f.clone()).map_err(|e| e.to_string())?;
        let rep = compute_report(&spec, false).map_err(|e| e.to_string())?;
        let hk = decompose_f(&spec).map_err(|e| e.to_string())?;
        case = classify(&spec).map_err(|e| e.to_string())?.tag().to_string();
        rows.push(json!({
            "id": f.id().to_string(),
            "cov_det": rep.cov_det,
            "qfi_det": rep.qfi_det,
            "F": rep.f_gap,
            "hk_sum": hk,
        }));
    }
    Ok(json!({ "eigenvalues": rho.eigenvalues(), "proved_case": case, "functions": rows }).to_string())
}

#[wasm_bindgen]
pub fn tilde_curves(beta: f64, x_max: f64, points: usize) -> Result<String, JsValue> {
    to_js(tilde_curves_json(beta, x_max, points))
}

#[wasm_bindgen]
pub fn qubit_explorer(r: f64, theta: f64, beta: f64) -> Result<String, JsValue> {
    to_js(qubit_explorer_json(r, theta, beta))
}

/// The seed arrives as an `f64` from JavaScript and is truncated.
#[wasm_bindgen]
pub fn random_gap(seed: f64, dim: usize, n: usize, beta: f64) -> Result<String, JsValue> {
    to_js(random_gap_json(seed.max(0.0) as u64, dim, n, beta))
}
