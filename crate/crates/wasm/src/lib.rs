//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function returns a flat `Float64Array`; the page builds the
//! matching x grid itself.

use fsosf::montecarlo::{mc_histogram, Shadowing};
use fsosf::stats::{outage_asymptotic, outage_probability, pdf};
use fsosf::{db_to_linear, ModelParams};
use wasm_bindgen::prelude::*;

/// Evenly spaced grid of `points` values on `[from, to]`.
pub fn grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..points)
            .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

fn model(alpha: f64, beta: f64, m: f64, snr_db: f64) -> Result<ModelParams, String> {
    ModelParams::with_snr_db(alpha, beta, m, snr_db).map_err(|e| e.to_string())
}

/// Density on `points` values of `[0, gamma_max]`.
pub fn pdf_values(alpha: f64, beta: f64, m: f64, snr_db: f64, gamma_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let p = model(alpha, beta, m, snr_db)?;
    grid(0.0, gamma_max, points)
        .into_iter()
        .map(|g| pdf(&p, g).map_err(|e| e.to_string()))
        .collect()
}

/// Exact outage probability followed by its high-SNR asymptote, each over
/// `points` mean SNR values in dB. The asymptote is NaN where it is undefined
/// (non-integer `m` or `alpha = 0`).
pub fn outage_values(
    alpha: f64,
    beta: f64,
    m: f64,
    gamma_th_db: f64,
    snr_from_db: f64,
    snr_to_db: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let th = db_to_linear(gamma_th_db);
    let snrs = grid(snr_from_db, snr_to_db, points);
    let mut exact = Vec::with_capacity(points);
    let mut asym = Vec::with_capacity(points);
    for db in snrs {
        let p = model(alpha, beta, m, db)?;
        let op = if p.integer_m().is_some() && p.alpha > 0.0 {
            outage_probability(&p, th)
        } else {
            fsosf::stats::cdf(&p, th)
        };
        exact.push(op.map_err(|e| e.to_string())?);
        asym.push(outage_asymptotic(&p, th).unwrap_or(f64::NAN));
    }
    exact.extend(asym);
    Ok(exact)
}

/// Monte-Carlo density histogram with `bins` bins on `[0, gamma_max]`.
#[allow(clippy::too_many_arguments)]
pub fn histogram_values(
    alpha: f64,
    beta: f64,
    m: f64,
    snr_db: f64,
    samples: u32,
    seed: u32,
    bins: usize,
    gamma_max: f64,
) -> Result<Vec<f64>, String> {
    let p = model(alpha, beta, m, snr_db)?;
    let h = mc_histogram(&p, bins, (0.0, gamma_max), samples as u64, seed as u64, Shadowing::Gamma)
        .map_err(|e| e.to_string())?;
    Ok(h.density())
}

#[wasm_bindgen]
pub fn pdf_curve(alpha: f64, beta: f64, m: f64, snr_db: f64, gamma_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    pdf_values(alpha, beta, m, snr_db, gamma_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn outage_curve(
    alpha: f64,
    beta: f64,
    m: f64,
    gamma_th_db: f64,
    snr_from_db: f64,
    snr_to_db: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    outage_values(alpha, beta, m, gamma_th_db, snr_from_db, snr_to_db, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn mc_histogram_curve(
    alpha: f64,
    beta: f64,
    m: f64,
    snr_db: f64,
    samples: u32,
    seed: u32,
    bins: usize,
    gamma_max: f64,
) -> Result<Vec<f64>, JsError> {
    histogram_values(alpha, beta, m, snr_db, samples, seed, bins, gamma_max).map_err(|e| JsError::new(&e))
}
