//! Density of the SNR: exponential-weight average of the conditional kernel,
//! and the integer-`m` closed form in generalized incomplete gamma functions.

use super::{check_closed_form, check_snr, ln_pow, ClosedFormTerms};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rician_shadowed::{sign, ConditionalRs};
use crate::special::{binomial, cached_rule, ln_chaudhry_gamma, ln_gamma, CompensatedSum, QuadratureRule};

/// Rule orders tried by [`pdf_integral_converged`].
pub const DOUBLING_ORDERS: [usize; 5] = [32, 64, 128, 256, 512];
/// Relative change between successive orders accepted as converged.
pub const DOUBLING_TOL: f64 = 1e-9;

/// Density at `gamma` from `∫₀^∞ f_RS(gamma | x) e^{-x} dx` with the Kummer-form
/// kernel, evaluated on the given rule. Valid for any real `m > 0`.
pub fn pdf_integral(p: &ModelParams, gamma: f64, rule: &QuadratureRule) -> Result<f64> {
    check_snr(gamma)?;
    rule.try_integrate(|x| ConditionalRs::condition(p, x)?.pdf_kummer(gamma))
}

/// [`pdf_integral`] with the rule order doubled until successive values agree
/// to [`DOUBLING_TOL`].
pub fn pdf_integral_converged(p: &ModelParams, gamma: f64) -> Result<f64> {
    converge(|rule| pdf_integral(p, gamma, rule))
}

pub(crate) fn converge<F: Fn(&QuadratureRule) -> Result<f64>>(eval: F) -> Result<f64> {
    let mut prev: Option<f64> = None;
    let mut change = f64::NAN;
    for order in DOUBLING_ORDERS {
        let rule = cached_rule(order)?;
        let v = eval(&rule)?;
        if let Some(u) = prev {
            change = (v - u).abs() / v.abs().max(f64::MIN_POSITIVE);
            if change <= DOUBLING_TOL || (v - u).abs() < 1e-300 {
                return Ok(v);
            }
        }
        prev = Some(v);
    }
    Err(Error::Convergence {
        what: "Gauss-Laguerre doubling",
        rel_change: change,
    })
}

/// Closed-form density for integer `m` and `alpha > 0`:
///
/// ```text
/// f(g) = Σ_{j<m} C(m-1,j) g^{m-j-1} e^ζ (β/m)^{m-j-1} / (ḡ^{m-j} (m-j-1)! α^{2m-j-1})
///        × Σ_{r<=j} C(j,r) (-β/m)^{j-r} α^r Γ(r-2m+j+2, ζ, g/(αḡ))
/// ζ = (m(1-α-β) + β) / (mα)
/// ```
pub fn pdf_closed(p: &ModelParams, gamma: f64) -> Result<f64> {
    let m = check_closed_form(p)?;
    check_snr(gamma)?;
    let t = ClosedFormTerms::new(p);
    let mf = m as f64;
    let mut outer = CompensatedSum::new();
    for j in 0..m {
        let power = m - j - 1;
        if gamma == 0.0 && power > 0 {
            continue;
        }
        let ln_outer = binomial(m - 1, j).ln()
            + ln_pow(gamma, power)
            + t.zeta
            + ln_pow(t.beta_over_m, power)
            - (m - j) as f64 * p.mean_snr.ln()
            - ln_gamma((m - j) as f64)
            - (2 * m - j - 1) as f64 * p.alpha.ln();
        if ln_outer == f64::NEG_INFINITY {
            continue;
        }
        let mut inner = CompensatedSum::new();
        for r in 0..=j {
            let order = r as f64 - 2.0 * mf + j as f64 + 2.0;
            let ln_term = binomial(j, r).ln()
                + ln_pow(t.beta_over_m, j - r)
                + r as f64 * p.alpha.ln()
                + ln_chaudhry_gamma(order, t.zeta, t.chaudhry_b(gamma))?;
            inner.add(sign(j - r) * (ln_outer + ln_term).exp());
        }
        outer.add(inner.value());
    }
    Ok(outer.value().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gauss_laguerre;

    fn fig1(m: f64) -> ModelParams {
        ModelParams::with_snr_db(0.1, 0.7, m, 3.0).unwrap()
    }

    #[test]
    fn rayleigh_corner() {
        let p = ModelParams::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let v = pdf_integral_converged(&p, 0.5).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_quadrature_form() {
        for m in [1.0, 2.0, 4.0, 9.0] {
            let p = fig1(m);
            for g in [0.0, 0.1, 1.0, 3.3, 8.0] {
                let closed = pdf_closed(&p, g).unwrap();
                let integral = pdf_integral_converged(&p, g).unwrap();
                assert!(
                    (closed - integral).abs() <= 1e-8 * integral,
                    "m={m} g={g}: {closed} vs {integral}"
                );
            }
        }
    }

    #[test]
    fn m_one_single_term() {
        // m = 1: f(g) = e^ζ / (ḡα) Γ(0, ζ, g/(αḡ)) with ζ = (1-α)/α.
        let p = ModelParams::new(0.1, 0.7, 1.0, 2.0).unwrap();
        let zeta: f64 = 0.9 / 0.1;
        let v = zeta.exp() / (2.0 * 0.1)
            * crate::special::chaudhry_gamma(0.0, zeta, 1.0 / (0.1 * 2.0)).unwrap();
        let closed = pdf_closed(&p, 1.0).unwrap();
        assert!((closed - v).abs() < 1e-13 * v);
        let rule = gauss_laguerre(256).unwrap();
        let integral = pdf_integral(&p, 1.0, &rule).unwrap();
        assert!((closed - integral).abs() < 1e-8 * integral);
    }

    #[test]
    fn closed_form_errors() {
        assert!(matches!(
            pdf_closed(&ModelParams::new(0.1, 0.7, 2.5, 1.0).unwrap(), 1.0),
            Err(Error::NonIntegerShape(_))
        ));
        assert!(pdf_closed(&ModelParams::new(0.0, 0.7, 2.0, 1.0).unwrap(), 1.0).is_err());
        assert!(pdf_closed(&fig1(2.0), -1.0).is_err());
    }

    #[test]
    fn origin_value_is_finite() {
        for m in 1..=6 {
            let v = pdf_closed(&fig1(m as f64), 0.0).unwrap();
            assert!(v.is_finite() && v >= 0.0);
        }
    }
}
