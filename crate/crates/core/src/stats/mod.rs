//! Distribution statistics of the SNR `gamma = mean_snr |S|^2`.
//!
//! Closed forms ([`pdf_closed`], [`cdf_closed`], [`gmgf`], [`moment`],
//! [`outage_asymptotic`]) need integer `m` and `alpha > 0`; [`pdf_integral`]
//! and [`cdf_integral`] cover real `m`. [`pdf`] and [`cdf`] pick a route from
//! [`ModelParams::classify`].

mod cdf;
mod gmgf;
mod moment;
mod pdf;

use std::sync::atomic::{AtomicBool, Ordering};

pub use cdf::{cdf_closed, cdf_integral, outage_asymptotic, outage_probability};
pub use gmgf::{gmgf, GmgfRegimeTerms};
pub use moment::moment;
pub use pdf::{pdf_closed, pdf_integral, pdf_integral_converged, DOUBLING_ORDERS, DOUBLING_TOL};

use crate::error::{Error, Result};
use crate::params::{ModelClass, ModelParams, DEFAULT_EPS};
use crate::rician_shadowed::{integer_shape, rician_pdf, ConditionalRs, MAX_DERIVATIVE_ORDER};
use crate::special::quad::{integrate, Tolerance};
use crate::special::{cached_rule, ln_gamma};

/// Largest `m` inside the validated accuracy envelope of the closed forms.
pub const ENVELOPE_MAX_M: f64 = 25.0;
/// Smallest `alpha` inside the validated accuracy envelope of the closed forms.
pub const ENVELOPE_MIN_ALPHA: f64 = 1e-3;

/// True when the alternating sums of the closed forms may lose accuracy.
pub fn outside_envelope(p: &ModelParams) -> bool {
    p.m > ENVELOPE_MAX_M || p.alpha < ENVELOPE_MIN_ALPHA
}

fn warn_envelope(p: &ModelParams) {
    static WARNED: AtomicBool = AtomicBool::new(false);
    if outside_envelope(p) && !WARNED.swap(true, Ordering::Relaxed) {
        log::warn!(
            "closed forms evaluated outside m <= {ENVELOPE_MAX_M}, alpha >= {ENVELOPE_MIN_ALPHA} \
             (m = {}, alpha = {}); cross-check against the quadrature route",
            p.m,
            p.alpha
        );
    }
}

/// Quantities shared by the closed forms.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ClosedFormTerms {
    /// `ζ = d = (m(1-α-β) + β) / (mα)`, lower limit of the generalized gamma integrals.
    pub zeta: f64,
    /// `c = (1-β)/α - 1`.
    pub c: f64,
    pub beta_over_m: f64,
    alpha_mean: f64,
}

impl ClosedFormTerms {
    pub fn new(p: &ModelParams) -> Self {
        ClosedFormTerms {
            zeta: (p.m * p.rayleigh_share() + p.beta) / (p.m * p.alpha),
            c: p.rayleigh_share() / p.alpha,
            beta_over_m: p.beta / p.m,
            alpha_mean: p.alpha * p.mean_snr,
        }
    }

    pub fn chaudhry_b(&self, gamma: f64) -> f64 {
        gamma / self.alpha_mean
    }
}

pub(crate) fn check_closed_form(p: &ModelParams) -> Result<u32> {
    let m = integer_shape(p.m)?;
    if !(p.alpha > 0.0) {
        return Err(Error::domain(
            "closed forms need alpha > 0; use the Rician-shadowed kernel for alpha = 0",
        ));
    }
    if !(p.m * p.rayleigh_share() + p.beta > 0.0) {
        return Err(Error::domain("closed forms need alpha < 1 (pure double-Rayleigh is degenerate)"));
    }
    warn_envelope(p);
    Ok(m)
}

pub(crate) fn check_snr(gamma: f64) -> Result<()> {
    if gamma >= 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("SNR argument must be finite and >= 0, got {gamma}")))
    }
}

pub(crate) fn check_order(n: u32) -> Result<()> {
    if n <= MAX_DERIVATIVE_ORDER {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "order {n} exceeds the supported maximum {MAX_DERIVATIVE_ORDER}"
        )))
    }
}

pub(crate) fn check_order_any(n: u32) -> Result<()> {
    if n <= 64 {
        Ok(())
    } else {
        Err(Error::domain(format!("moment order {n} is too large")))
    }
}

/// `k ln(base)` with the convention `0^0 = 1`.
pub(crate) fn ln_pow(base: f64, k: u32) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * base.ln()
    }
}

/// Density, routed by model class.
pub fn pdf(p: &ModelParams, gamma: f64) -> Result<f64> {
    check_snr(gamma)?;
    match p.classify(DEFAULT_EPS) {
        ModelClass::Rayleigh => Ok((-gamma / p.mean_snr).exp() / p.mean_snr),
        ModelClass::RicianShadowed | ModelClass::Rician => {
            let rician = p.m >= 1.0 / DEFAULT_EPS;
            if p.rayleigh_share() == 0.0 {
                // All power in the line-of-sight term: gamma = mean_snr * xi.
                return if rician {
                    Err(Error::domain("deterministic channel has no density"))
                } else {
                    Ok(gamma_density(p.m, p.mean_snr / p.m, gamma))
                };
            }
            let k = p.beta / p.rayleigh_share();
            if rician {
                rician_pdf(k, p.mean_snr, gamma)
            } else {
                ConditionalRs::new(k, p.mean_snr, p.m)?.pdf(gamma)
            }
        }
        ModelClass::SosfLimit => pdf_sosf(p, gamma),
        ModelClass::Fsosf => {
            if integer_shape(p.m).is_ok() {
                pdf_closed(p, gamma)
            } else {
                pdf_integral_converged(p, gamma)
            }
        }
    }
}

/// Distribution function, routed by model class.
pub fn cdf(p: &ModelParams, gamma: f64) -> Result<f64> {
    check_snr(gamma)?;
    match p.classify(DEFAULT_EPS) {
        ModelClass::Rayleigh => Ok(-(-gamma / p.mean_snr).exp_m1()),
        ModelClass::RicianShadowed if p.rayleigh_share() > 0.0 && integer_shape(p.m).is_ok() => {
            ConditionalRs::new(p.beta / p.rayleigh_share(), p.mean_snr, p.m)?.cdf(gamma)
        }
        ModelClass::Fsosf if integer_shape(p.m).is_ok() => cdf_closed(p, gamma),
        ModelClass::Fsosf => cdf_integral(p, gamma),
        _ => integrate(|g| pdf(p, g).unwrap_or(f64::NAN), 0.0, gamma, Tolerance { rel: 1e-11, abs: 1e-15 }),
    }
}

/// SOSF density (`m -> inf`): Rician kernel averaged over `x`.
fn pdf_sosf(p: &ModelParams, gamma: f64) -> Result<f64> {
    let rule = cached_rule(256)?;
    rule.try_integrate(|x| {
        let c = ConditionalRs::condition(p, x)?;
        rician_pdf(c.k_factor, c.mean_snr_x, gamma)
    })
}

fn gamma_density(shape: f64, scale: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if shape == 1.0 { 1.0 / scale } else if shape < 1.0 { f64::INFINITY } else { 0.0 };
    }
    ((shape - 1.0) * x.ln() - x / scale - ln_gamma(shape) - shape * scale.ln()).exp()
}
