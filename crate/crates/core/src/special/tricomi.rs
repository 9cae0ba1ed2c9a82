//! Tricomi's confluent hypergeometric function `U(a, b, z)`.

use super::gamma::ln_gamma;
use super::quad::{integrate_to_infinity, Tolerance};
use crate::error::{Error, Result};

const TOL: Tolerance = Tolerance {
    rel: 1e-13,
    abs: 0.0,
};

/// `U(a, b, z)` for `a > 0`, `z > 0` and any real `b`.
///
/// Evaluated from the Laplace integral after scaling `u = z t`:
/// `U = z^{-a} / Γ(a) ∫₀^∞ e^{-u} u^{a-1} (1 + u/z)^{b-a-1} du`.
pub fn tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    let ln = ln_tricomi_u(a, b, z)?;
    let v = ln.exp();
    if v.is_infinite() {
        return Err(Error::Overflow("Tricomi U"));
    }
    Ok(v)
}

/// Natural logarithm of `U(a, b, z)`.
pub fn ln_tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !(z > 0.0) || !b.is_finite() || !z.is_finite() {
        return Err(Error::domain(format!(
            "U(a,b,z) needs a > 0 and z > 0, got a={a}, b={b}, z={z}"
        )));
    }
    let power = b - a - 1.0;
    let integral = if a >= 1.0 {
        let f = |u: f64| ((a - 1.0) * u.ln() + power * (u / z).ln_1p() - u).exp();
        // Integrand vanishes at u = 0 for a > 1; ln(0) handled via exp(-inf).
        let f0 = move |u: f64| if u == 0.0 { if a == 1.0 { 1.0 } else { 0.0 } } else { f(u) };
        integrate_to_infinity(f0, 0.0, initial_width(a, power, z), TOL)?
    } else {
        // u = v^{1/a} removes the endpoint singularity: u^{a-1} du = dv / a.
        let inv = 1.0 / a;
        let f = move |v: f64| {
            if v == 0.0 {
                return inv;
            }
            let u = v.powf(inv);
            inv * (power * (u / z).ln_1p() - u).exp()
        };
        integrate_to_infinity(f, 0.0, 1.0, TOL)?
    };
    if !(integral > 0.0) {
        return Err(Error::Convergence {
            what: "Tricomi U integral",
            rel_change: f64::NAN,
        });
    }
    Ok(integral.ln() - a * z.ln() - ln_gamma(a))
}

/// Width of the first integration segment: the mass sits within roughly
/// `a` units of the origin unless the algebraic factor cuts it off earlier.
fn initial_width(a: f64, power: f64, z: f64) -> f64 {
    let algebraic = if power < 0.0 { z / (-power) } else { f64::INFINITY };
    a.min(algebraic).clamp(1e-6, 1.0)
}
