//! Distribution function and outage probability.

use super::pdf::converge;
use super::{check_closed_form, check_snr, ln_pow, ClosedFormTerms};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rician_shadowed::{integer_shape, sign, ConditionalRs};
use crate::special::quad::{integrate, Tolerance};
use crate::special::{binomial, ln_chaudhry_gamma, ln_gamma, tricomi_u, CompensatedSum};

/// Closed-form CDF for integer `m` and `alpha > 0`:
///
/// ```text
/// F(g) = 1 - e^ζ Σ_{j<m} Σ_{r<m-j} Σ_{q<=j} C(m-1,j) C(j,q) (-1)^{j-q} α^{q-r-m+1} / r!
///              × (g/ḡ)^r (β/m)^{m-q-1} Γ(q-r-m+2, ζ, g/(αḡ))
/// ```
pub fn cdf_closed(p: &ModelParams, gamma: f64) -> Result<f64> {
    let m = check_closed_form(p)?;
    check_snr(gamma)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let t = ClosedFormTerms::new(p);
    let b = t.chaudhry_b(gamma);
    let ln_ratio = (gamma / p.mean_snr).ln();
    let mut tail = CompensatedSum::new();
    for j in 0..m {
        for q in 0..=j {
            let ln_jq = binomial(m - 1, j).ln() + binomial(j, q).ln() + ln_pow(t.beta_over_m, m - q - 1);
            if ln_jq == f64::NEG_INFINITY {
                continue;
            }
            for r in 0..(m - j) {
                let exponent = q as f64 - r as f64 - m as f64 + 1.0;
                let ln_term = ln_jq + t.zeta + exponent * p.alpha.ln() - ln_gamma(r as f64 + 1.0)
                    + r as f64 * ln_ratio
                    + ln_chaudhry_gamma(exponent + 1.0, t.zeta, b)?;
                tail.add(sign(j - q) * ln_term.exp());
            }
        }
    }
    Ok((1.0 - tail.value()).clamp(0.0, 1.0))
}

/// CDF for any real `m` by adaptive integration of the quadrature-form density.
pub fn cdf_integral(p: &ModelParams, gamma: f64) -> Result<f64> {
    check_snr(gamma)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    converge(|rule| {
        let inner = |x: f64| -> Result<f64> {
            let c = ConditionalRs::condition(p, x)?;
            if integer_shape(p.m).is_ok() {
                return c.cdf(gamma);
            }
            let failure = std::cell::RefCell::new(None);
            let v = integrate(
                |g| {
                    c.pdf_kummer(g).unwrap_or_else(|e| {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    })
                },
                0.0,
                gamma,
                Tolerance { rel: 1e-12, abs: 1e-16 },
            );
            match failure.into_inner() {
                Some(e) => Err(e),
                None => v,
            }
        };
        rule.try_integrate(inner)
    })
}

/// Outage probability `P(gamma < gamma_th)`, the closed-form CDF at the threshold.
pub fn outage_probability(p: &ModelParams, gamma_th: f64) -> Result<f64> {
    if !(gamma_th > 0.0) {
        return Err(Error::domain(format!("threshold must be positive, got {gamma_th}")));
    }
    cdf_closed(p, gamma_th)
}

/// High-SNR outage asymptote, linear in `gamma_th / mean_snr`:
///
/// ```text
/// OP ≈ g_th / (α ḡ) Σ_{j<m} C(m-1,j) c^{m-1-j} Γ(1+j) U(m, m-j, d)
/// ```
pub fn outage_asymptotic(p: &ModelParams, gamma_th: f64) -> Result<f64> {
    let m = check_closed_form(p)?;
    if !(gamma_th > 0.0) {
        return Err(Error::domain(format!("threshold must be positive, got {gamma_th}")));
    }
    let t = ClosedFormTerms::new(p);
    let mut acc = CompensatedSum::new();
    for j in 0..m {
        let weight = binomial(m - 1, j) * t.c.powi((m - 1 - j) as i32) * ln_gamma(1.0 + j as f64).exp();
        if weight == 0.0 {
            continue;
        }
        acc.add(weight * tricomi_u(m as f64, (m - j) as f64, t.zeta)?);
    }
    Ok(gamma_th / (p.alpha * p.mean_snr) * acc.value())
}
