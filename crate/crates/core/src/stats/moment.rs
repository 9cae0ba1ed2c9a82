//! Raw moments in closed form.

use super::{check_closed_form, check_order_any};
use crate::error::Result;
use crate::params::ModelParams;
use crate::rician_shadowed::sign;
use crate::special::{binomial, factorial, pochhammer, CompensatedSum};

/// `E[gamma^n]` for integer `m`:
///
/// ```text
/// (ḡα)^n Σ_q C(n,q) (-1)^{q-n} (m-n+q)_{n-q} (m)_q Σ_i Σ_j C(n-q,i) C(q,j) c^{n-q-i} d^{q-j} (i+j)!
/// ```
pub fn moment(p: &ModelParams, n: u32) -> Result<f64> {
    check_closed_form(p)?;
    check_order_any(n)?;
    let m = p.m;
    let c = (1.0 - p.beta) / p.alpha - 1.0;
    let d = (1.0 - p.beta * (m - 1.0) / m) / p.alpha - 1.0;
    let mut total = CompensatedSum::new();
    for q in 0..=n {
        let weight = binomial(n, q) * sign(n - q) * pochhammer(m - n as f64 + q as f64, n - q) * pochhammer(m, q);
        if weight == 0.0 {
            continue;
        }
        let mut inner = CompensatedSum::new();
        for i in 0..=(n - q) {
            for j in 0..=q {
                inner.add(
                    binomial(n - q, i)
                        * binomial(q, j)
                        * c.powi((n - q - i) as i32)
                        * d.powi((q - j) as i32)
                        * factorial(i + j),
                );
            }
        }
        total.add(weight * inner.value());
    }
    Ok((p.mean_snr * p.alpha).powi(n as i32) * total.value())
}
