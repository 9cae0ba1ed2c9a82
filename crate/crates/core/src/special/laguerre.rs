//! Gauss–Laguerre rules for integrals of the form `∫₀^∞ g(x) e^{-x} dx`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 512;

/// Node/weight set for the weight function `e^{-x}` on `[0, inf)`.
///
/// Weights of the outermost nodes of high-order rules fall below the
/// smallest positive `f64` and are stored as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_k w_k g(x_k)`; nodes with zero weight are skipped.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }

    /// Fallible variant of [`QuadratureRule::integrate`].
    pub fn try_integrate<F: FnMut(f64) -> Result<f64>>(&self, mut g: F) -> Result<f64> {
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            if w > 0.0 {
                acc += w * g(x)?;
            }
        }
        Ok(acc)
    }
}

/// Evaluates the orthonormal Laguerre polynomials `L_{n-1}(x)`, `L_n(x)` and
/// the Christoffel sum `Σ_{k<n} L_k(x)^2`, all divided by `e^{scale}`
/// (the sum by `e^{2 scale}`); returns the scale.
fn laguerre_scaled(n: usize, x: f64) -> (f64, f64, f64, f64) {
    const BIG: f64 = 1e150;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut christoffel = 0.0;
    let mut scale = 0.0;
    for k in 0..n {
        christoffel += cur * cur;
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            christoffel /= BIG * BIG;
            scale += BIG.ln();
        }
    }
    (prev, cur, christoffel, scale)
}

/// Builds the `order`-point Gauss–Laguerre rule.
///
/// Initial nodes come from the eigenvalues of the Jacobi matrix; each is then
/// polished by Newton iteration on the three-term recurrence, and weights use
/// the Christoffel sum so that large nodes do not overflow.
pub fn gauss_laguerre(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::domain(format!(
            "Gauss-Laguerre order must lie in 1..={MAX_ORDER}, got {order}"
        )));
    }
    let n = order;
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (2 * i + 1) as f64
        } else if i.abs_diff(j) == 1 {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    guesses.sort_by(f64::total_cmp);

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for mut x in guesses {
        for _ in 0..50 {
            let (lm1, ln, _, _) = laguerre_scaled(n, x);
            let deriv = n as f64 * (ln - lm1) / x;
            let step = ln / deriv;
            x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
        let (_, _, christoffel, scale) = laguerre_scaled(n, x);
        nodes.push(x);
        weights.push((-(christoffel.ln() + 2.0 * scale)).exp());
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Shared, lazily built rule of the given order.
pub fn cached_rule(order: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&order) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(gauss_laguerre(order)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(order, rule.clone());
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma::factorial;

    #[test]
    fn low_order_closed_forms() {
        let r1 = gauss_laguerre(1).unwrap();
        assert!((r1.nodes()[0] - 1.0).abs() < 1e-15);
        assert!((r1.weights()[0] - 1.0).abs() < 1e-15);

        let r2 = gauss_laguerre(2).unwrap();
        let s2 = 2f64.sqrt();
        assert!((r2.nodes()[0] - (2.0 - s2)).abs() < 1e-15);
        assert!((r2.nodes()[1] - (2.0 + s2)).abs() < 1e-14);
        assert!((r2.weights()[0] - (2.0 + s2) / 4.0).abs() < 1e-15);
        assert!((r2.weights()[1] - (2.0 - s2) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(gauss_laguerre(0).is_err());
        assert!(gauss_laguerre(513).is_err());
    }

    #[test]
    fn moment_exactness() {
        for order in [8, 64, 128, 512] {
            let rule = gauss_laguerre(order).unwrap();
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(rule.weights().iter().all(|&w| w >= 0.0));
            for k in 0..=8u32 {
                let got = rule.integrate(|x| x.powi(k as i32));
                let exact = factorial(k);
                assert!(
                    (got - exact).abs() <= 1e-12 * exact,
                    "order {order}, k {k}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn moderate_orders_have_positive_weights() {
        let rule = gauss_laguerre(128).unwrap();
        assert!(rule.weights().iter().all(|&w| w > 0.0));
    }
}
