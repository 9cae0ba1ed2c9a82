//! Kummer's function `₁F₁(m; 1; z)` for `m > 0`, `z >= 0`, and the
//! Bessel-type limit `₀F₁(; 1; w) = I₀(2√w)`.

use super::gamma::{binomial, ln_gamma};
use crate::error::{Error, Result};

const MAX_SERIES_TERMS: usize = 100_000;
const ASYMPTOTIC_Z: f64 = 60.0;
/// `ln(f64::MAX)`.
const LN_MAX: f64 = 709.782712893384;

/// `₁F₁(m; 1; z)`; fails with [`Error::Overflow`] once the value exceeds `f64`.
pub fn kummer_1f1_m1(m: f64, z: f64) -> Result<f64> {
    let ln = ln_kummer_1f1_m1(m, z)?;
    if ln > LN_MAX {
        Err(Error::Overflow("Kummer 1F1"))
    } else {
        Ok(ln.exp())
    }
}

/// Natural logarithm of `₁F₁(m; 1; z)`.
pub fn ln_kummer_1f1_m1(m: f64, z: f64) -> Result<f64> {
    if !(m > 0.0) || !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain(format!(
            "1F1(m;1;z) needs m > 0 and finite z >= 0, got m={m}, z={z}"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if m.fract() == 0.0 && m <= 1000.0 {
        return Ok(ln_kummer_integer(m as u32, z));
    }
    if z > ASYMPTOTIC_Z {
        if let Some(v) = ln_kummer_asymptotic(m, z) {
            return Ok(v);
        }
    }
    ln_kummer_series(m, z)
}

/// Integer `m`: `e^z ₁F₁(1-m; 1; -z) = e^z Σ_{k<m} C(m-1,k) z^k / k!`.
fn ln_kummer_integer(m: u32, z: f64) -> f64 {
    // Terms are positive; sum relative to the largest to stay in range.
    let ln_terms: Vec<f64> = (0..m)
        .map(|k| binomial(m - 1, k).ln() + k as f64 * z.ln() - ln_gamma(k as f64 + 1.0))
        .collect();
    let peak = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = ln_terms.iter().map(|t| (t - peak).exp()).sum();
    z + peak + s.ln()
}

/// Power series `Σ (m)_k z^k / (k!)^2`, rescaled to avoid overflow.
fn ln_kummer_series(m: f64, z: f64) -> Result<f64> {
    const RESCALE: f64 = 1e200;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ln_scale = 0.0;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= (m + kf) * z / ((kf + 1.0) * (kf + 1.0));
        sum += term;
        if term < 1e-17 * sum && kf > z {
            return Ok(sum.ln() + ln_scale);
        }
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            ln_scale += RESCALE.ln();
        }
    }
    Err(Error::Convergence {
        what: "1F1 power series",
        rel_change: term / sum,
    })
}

/// Large-`z` expansion `e^z z^{m-1} / Γ(m) Σ_k ((1-m)_k)^2 / (k! z^k)`.
/// Returns `None` when the terms stop shrinking before reaching `1e-17`.
fn ln_kummer_asymptotic(m: f64, z: f64) -> Option<f64> {
    let mut term = 1.0f64;
    let mut sum = 1.0;
    for k in 0..200 {
        let kf = k as f64;
        let next = term * (1.0 - m + kf).powi(2) / ((kf + 1.0) * z);
        if next.abs() > term.abs() {
            return None;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            return Some(z + (m - 1.0) * z.ln() - ln_gamma(m) + sum.ln());
        }
    }
    None
}

/// Natural logarithm of `₀F₁(; 1; w) = Σ w^k / (k!)^2 = I₀(2√w)`.
pub fn ln_hyp0f1_1(w: f64) -> Result<f64> {
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::domain(format!("0F1(;1;w) needs finite w >= 0, got {w}")));
    }
    let x = 2.0 * w.sqrt();
    if x < 50.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        while term > 1e-17 * sum {
            k += 1.0;
            term *= w / (k * k);
            sum += term;
        }
        return Ok(sum.ln());
    }
    // I₀(x) ~ e^x / √(2πx) Σ ((2k-1)!!)^2 / (k! (8x)^k)
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        term *= (2.0 * kf - 1.0).powi(2) / (kf * 8.0 * x);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    Ok(x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain series summed to 200 terms, the reference for real m.
    fn series_oracle(m: f64, z: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..200 {
            let kf = k as f64;
            term *= (m + kf) * z / ((kf + 1.0) * (kf + 1.0));
            sum += term;
        }
        sum
    }

    #[test]
    fn examples() {
        let v = kummer_1f1_m1(1.0, 3.5).unwrap();
        assert!((v - 3.5f64.exp()).abs() < 1e-12 * v);
        assert!((v - 33.11545195869231).abs() < 1e-9);
        assert_eq!(kummer_1f1_m1(2.0, 0.0).unwrap(), 1.0);
        let v = kummer_1f1_m1(2.5, 1.0).unwrap();
        let oracle = series_oracle(2.5, 1.0);
        assert!((v - oracle).abs() < 1e-13 * oracle);
    }

    #[test]
    fn real_m_matches_series_oracle() {
        for &m in &[0.3, 0.5, 1.7, 2.5, 7.25, 19.5] {
            for &z in &[0.01, 0.7, 5.0, 20.0, 45.0] {
                let v = kummer_1f1_m1(m, z).unwrap();
                let o = series_oracle(m, z);
                assert!((v - o).abs() < 1e-12 * o, "m={m} z={z}: {v} vs {o}");
            }
        }
    }

    #[test]
    fn asymptotic_branch_continuous_with_series() {
        for &m in &[0.5, 2.5, 4.5] {
            for &z in &[61.0, 100.0, 300.0] {
                let a = ln_kummer_1f1_m1(m, z).unwrap();
                let s = ln_kummer_series(m, z).unwrap();
                assert!((a - s).abs() < 1e-12 * s.abs(), "m={m} z={z}: {a} vs {s}");
            }
        }
    }

    #[test]
    fn integer_form_matches_series() {
        for m in 1..=30u32 {
            for &z in &[0.5, 3.0, 17.0, 50.0] {
                let closed = ln_kummer_integer(m, z);
                let series = ln_kummer_series(m as f64, z).unwrap();
                assert!(
                    ((closed - series) / series.abs().max(1.0)).abs() < 1e-11,
                    "m={m} z={z}"
                );
            }
        }
    }

    #[test]
    fn overflow_is_signalled() {
        assert!(matches!(kummer_1f1_m1(1.0, 800.0), Err(Error::Overflow(_))));
        assert!((ln_kummer_1f1_m1(1.0, 800.0).unwrap() - 800.0).abs() < 1e-12);
        assert!(kummer_1f1_m1(0.0, 1.0).is_err());
        assert!(kummer_1f1_m1(1.0, -1.0).is_err());
    }

    #[test]
    fn bessel_limit() {
        // I₀(2) = 2.2795853023360673, I₀(60) = 5.9893359006e24
        assert!((ln_hyp0f1_1(1.0).unwrap() - 2.2795853023360673f64.ln()).abs() < 1e-14);
        let v = ln_hyp0f1_1(900.0).unwrap();
        assert!((v - 5.894077055609803e24f64.ln()).abs() < 1e-9, "{v}");
        // Either side of the series/asymptotic switch, against 30-digit references.
        assert!((ln_hyp0f1_1(625.0).unwrap() - 47.12757550187180).abs() < 1e-12);
        assert!((ln_hyp0f1_1(624.0).unwrap() - 47.08796185317554).abs() < 1e-12);
    }
}
