//! Double-exponential quadrature used only as an independent reference in tests.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Tanh-sinh rule on `[a, b]`, refined by halving the step until two levels
/// agree to `tol` relative.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let eval = |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        let w = FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        // Distance to the nearer endpoint, computed without cancellation.
        let gap = (b - a) / (1.0 + (2.0 * u.abs()).exp());
        let x = if t < 0.0 { a + gap } else { b - gap };
        if w == 0.0 || gap == 0.0 {
            0.0
        } else {
            half * w * f(x)
        }
    };
    refine(eval, -4.0, 4.0, tol)
}

/// Exp-sinh rule on `[a, inf)` with length scale `scale`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: f64) -> f64 {
    let eval = |t: f64| {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let w = scale * FRAC_PI_2 * t.cosh() * e;
        let x = a + scale * e;
        if w == 0.0 || !x.is_finite() {
            return 0.0;
        }
        let v = w * f(x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    refine(eval, -5.0, 4.5, tol)
}

fn refine<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let mut h: f64 = 0.5;
    let count = |h: f64| ((hi - lo) / h).round() as i64;
    let mut sum: f64 = (0..=count(h)).map(|k| g(lo + k as f64 * h)).sum();
    let mut estimate = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let fresh: f64 = (0..count(h)).filter(|k| k % 2 == 1).map(|k| g(lo + k as f64 * h)).sum();
        sum += fresh;
        let next = sum * h;
        if (next - estimate).abs() <= tol * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rules_are_accurate() {
        let v = tanh_sinh(|x: f64| x.sqrt(), 0.0, 1.0, 1e-14);
        assert!((v - 2.0 / 3.0).abs() < 1e-13);
        let v = exp_sinh(|x: f64| (-x).exp(), 0.0, 1.0, 1e-14);
        assert!((v - 1.0).abs() < 1e-13);
        let v = exp_sinh(|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-14);
        assert!((v - FRAC_PI_2).abs() < 1e-12);
    }
}
