//! Generalized MGF `E[gamma^n e^{s gamma}]` for integer `m`.
//!
//! Averaging the Leibniz expansion of the conditional MGF derivative over
//! `x ~ Exp(1)` leaves integrals of `x^i / (x + p)^j e^{-x}`, which are
//! `Γ(i+1) U(j, j-i, p)`. When the factor `(x + a(s))` appears with a
//! negative power the integrand has a second pole and is first split into
//! partial fractions over `(x + a)` and `(x + b)`.

use std::collections::HashMap;

use super::{check_closed_form, check_order};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rician_shadowed::{check_s, sign, MgfFactorTerms};
use crate::special::{binomial, factorial, pochhammer, tricomi_u, CompensatedSum};

/// Partial-fraction expansion of `x^{i+j} / ((x+a)^{σ₁} (x+b)^{σ₂})`
/// into `Σ_k A_k / (x+a)^k + Σ_k B_k / (x+b)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GmgfRegimeTerms {
    pub sigma1: u32,
    pub sigma2: u32,
    /// `A_k` for `k = 1..=sigma1`.
    pub a_coeffs: Vec<f64>,
    /// `B_k` for `k = 1..=sigma2`.
    pub b_coeffs: Vec<f64>,
    power: u32,
    a: f64,
    b: f64,
}

impl GmgfRegimeTerms {
    /// Expansion for numerator power `power = i + j`; requires `a != b` and a
    /// proper fraction (`power < sigma1 + sigma2`).
    pub fn new(power: u32, sigma1: u32, sigma2: u32, a: f64, b: f64) -> Result<Self> {
        if a == b {
            return Err(Error::domain("partial fractions need distinct poles a != b"));
        }
        if power >= sigma1 + sigma2 {
            return Err(Error::domain(format!(
                "x^{power} / ((x+a)^{sigma1} (x+b)^{sigma2}) is not a proper fraction"
            )));
        }
        let a_coeffs = (1..=sigma1)
            .map(|k| residue_coefficient(power, sigma1, sigma2, k, a, b).0)
            .collect();
        let b_coeffs = (1..=sigma2)
            .map(|k| residue_coefficient(power, sigma2, sigma1, k, b, a).0)
            .collect();
        Ok(GmgfRegimeTerms {
            sigma1,
            sigma2,
            a_coeffs,
            b_coeffs,
            power,
            a,
            b,
        })
    }

    /// Value of the expansion at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let part = |coeffs: &[f64], pole: f64| -> f64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (x + pole).powi(k as i32 + 1))
                .sum()
        };
        part(&self.a_coeffs, self.a) + part(&self.b_coeffs, self.b)
    }

    /// The rational function being expanded, evaluated directly.
    pub fn target(&self, x: f64) -> f64 {
        x.powi(self.power as i32)
            / ((x + self.a).powi(self.sigma1 as i32) * (x + self.b).powi(self.sigma2 as i32))
    }

    /// `∫₀^∞ (expansion) e^{-x} dx = Σ A_k U(k,k,a) + Σ B_k U(k,k,b)`; both poles must be positive.
    pub fn integrate(&self) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for (k, &c) in self.a_coeffs.iter().enumerate() {
            let kf = (k + 1) as f64;
            acc.add(c * tricomi_u(kf, kf, self.a)?);
        }
        for (k, &c) in self.b_coeffs.iter().enumerate() {
            let kf = (k + 1) as f64;
            acc.add(c * tricomi_u(kf, kf, self.b)?);
        }
        Ok(acc.value())
    }
}

/// Coefficient of `(x + own)^{-k}` for `x^p / ((x+own)^{σ} (x+other)^{τ})`:
///
/// ```text
/// Σ_{l=0}^{σ-k} C(σ-k, l)/(σ-k)! (p-σ+k+l+1)_{σ-k-l} (τ)_l (-1)^l (-own)^{p-σ+k+l} (other-own)^{-τ-l}
/// ```
/// Returns the coefficient and the sum of the magnitudes of its terms, which
/// bounds the rounding error of the alternating sum.
fn residue_coefficient(p: u32, sigma: u32, tau: u32, k: u32, own: f64, other: f64) -> (f64, f64) {
    let span = sigma - k;
    let mut acc = CompensatedSum::new();
    let mut magnitude = 0.0;
    for l in 0..=span {
        let exponent = p as i64 - sigma as i64 + k as i64 + l as i64;
        let falling = pochhammer(exponent as f64 + 1.0, span - l);
        if falling == 0.0 {
            continue;
        }
        let term = binomial(span, l) / factorial(span)
            * falling
            * pochhammer(tau as f64, l)
            * sign(l)
            * (-own).powi(exponent as i32)
            * (other - own).powi(-(tau as i32) - l as i32);
        magnitude += term.abs();
        acc.add(term);
    }
    (acc.value(), magnitude)
}

/// `n`-th derivative of the MGF at `s < 0`, i.e. `E[gamma^n e^{s gamma}]`.
///
/// For each Leibniz index `q` the weight is
/// `C(n,q) (-1)^{q+1} (m-n+q)_{n-q} (m)_q / (s^{n+1} ḡ α)`. If `m >= n+1`
/// every term has only the pole at `-b(s)`; otherwise terms with
/// `q <= n-m` also carry `(x+a)^{-(n+1-m-q)}` and use [`GmgfRegimeTerms`].
pub fn gmgf(p: &ModelParams, n: u32, s: f64) -> Result<f64> {
    let m = check_closed_form(p)?;
    check_order(n)?;
    check_s(s)?;
    let f = MgfFactorTerms::new(p, s)?;
    let (a, b, c, d) = (f.a_of_s, f.b_of_s, f.c_const, f.d_const);
    let mut u_cache: HashMap<(u32, i64), f64> = HashMap::new();
    let mut u_at_b = |order: u32, second: i64| -> Result<f64> {
        if let Some(&v) = u_cache.get(&(order, second)) {
            return Ok(v);
        }
        let v = tricomi_u(order as f64, second as f64, b)?;
        u_cache.insert((order, second), v);
        Ok(v)
    };

    let mut total = CompensatedSum::new();
    for q in 0..=n {
        let weight = binomial(n, q)
            * sign(q + 1)
            * pochhammer(m as f64 - n as f64 + q as f64, n - q)
            * pochhammer(m as f64, q)
            / (s.powi(n as i32 + 1) * p.mean_snr * p.alpha);
        // (m-n+q)_{n-q} vanishes whenever m-1-n+q < 0: the (n-q)-th derivative of
        // a degree m-1 polynomial. The two-pole terms therefore carry zero weight.
        if weight == 0.0 {
            continue;
        }
        let a_power = m as i64 - 1 - n as i64 + q as i64;
        let mut inner = CompensatedSum::new();
        for i in 0..=(n - q) {
            for j in 0..=q {
                let poly = binomial(n - q, i)
                    * binomial(q, j)
                    * c.powi((n - q - i) as i32)
                    * d.powi((q - j) as i32);
                if a_power >= 0 {
                    let a_power = a_power as u32;
                    for r in 0..=a_power {
                        let x_power = r + i + j;
                        let order = m + q;
                        inner.add(
                            poly * binomial(a_power, r)
                                * a.powi((a_power - r) as i32)
                                * factorial(x_power)
                                * u_at_b(order, order as i64 - x_power as i64)?,
                        );
                    }
                } else {
                    let split = GmgfRegimeTerms::new(i + j, (-a_power) as u32, m + q, a, b)?;
                    inner.add(poly * split.integrate()?);
                }
            }
        }
        total.add(weight * inner.value());
    }
    Ok(total.value())
}
