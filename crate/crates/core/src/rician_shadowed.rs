//! Rician-shadowed kernel obtained by conditioning on `x = |G₃|²`.
//!
//! Given `x`, the Rayleigh and double-Rayleigh terms merge into one diffuse
//! Gaussian of power `1 - beta - alpha (1 - x)` while the line-of-sight term
//! keeps power `beta` with Gamma-distributed fluctuations, which is exactly a
//! squared Rician-shadowed variable with
//!
//! ```text
//! K_x    = beta / (1 - beta - alpha (1 - x))
//! mean_x = mean_snr (1 - alpha (1 - x))
//! ```
//!
//! For integer `m` the density is a finite mixture of Gamma densities with a
//! common scale `theta = mean_x (K + m) / (m (1 + K))`:
//!
//! ```text
//! f(g) = Σ_{j<m} B_j g^{m-j-1} e^{-g/theta} / ((m-j-1)! theta^{m-j})
//! B_j  = C(m-1, j) (m/(K+m))^j (K/(K+m))^{m-j-1}
//! ```
//!
//! and the MGF `E[e^{s g}]` factors as `F1(s) F2(s)` with
//! `F1 = -(s mean alpha (x + c) - 1)^{m-1}`, `F2 = (s mean alpha (x + d) - 1)^{-m}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::special::{binomial, ln_gamma, ln_hyp0f1_1, ln_kummer_1f1_m1, pochhammer};

/// Largest derivative order accepted by [`rs_gmgf_derivative`].
pub const MAX_DERIVATIVE_ORDER: u32 = 8;

/// Conditional Rician-shadowed parameters `(K_x, mean_x, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalRs {
    pub k_factor: f64,
    pub mean_snr_x: f64,
    pub m: f64,
}

/// `a(s)`, `b(s)`, `c`, `d` of the factored conditional MGF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfFactorTerms {
    pub a_of_s: f64,
    pub b_of_s: f64,
    pub c_const: f64,
    pub d_const: f64,
}

impl ConditionalRs {
    pub fn new(k_factor: f64, mean_snr_x: f64, m: f64) -> Result<Self> {
        if !(k_factor >= 0.0) || !k_factor.is_finite() {
            return Err(Error::domain(format!("K factor must be finite and >= 0, got {k_factor}")));
        }
        if !(mean_snr_x > 0.0) || !mean_snr_x.is_finite() {
            return Err(Error::NonPositiveMeanSnr(mean_snr_x));
        }
        if !(m > 0.0) {
            return Err(Error::NonPositiveShape(m));
        }
        Ok(ConditionalRs {
            k_factor,
            mean_snr_x,
            m,
        })
    }

    /// Conditions the model on `x = |G₃|²`.
    pub fn condition(p: &ModelParams, x: f64) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain(format!("conditioning value x must be finite and >= 0, got {x}")));
        }
        let diffuse = p.rayleigh_share() + p.alpha * x;
        if diffuse <= 0.0 {
            return Err(Error::domain(format!(
                "diffuse power 1 - beta - alpha (1 - x) = {diffuse} is not positive at x = {x}"
            )));
        }
        Self::new(p.beta / diffuse, p.mean_snr * (1.0 - p.alpha * (1.0 - x)), p.m)
    }

    /// Power of the diffuse component, `mean_x / (1 + K)`.
    pub fn diffuse_power(&self) -> f64 {
        self.mean_snr_x / (1.0 + self.k_factor)
    }

    /// Common Gamma scale of the integer-m mixture.
    pub fn mixture_scale(&self) -> f64 {
        self.diffuse_power() * (self.k_factor + self.m) / self.m
    }

    /// Mixture weights `B_j`, `j = 0..m-1`; weight `j` belongs to shape `m - j`.
    pub fn mixture_weights(&self) -> Result<Vec<f64>> {
        let m = integer_shape(self.m)?;
        let k = self.k_factor;
        let (p_fluct, p_los) = (self.m / (k + self.m), k / (k + self.m));
        Ok((0..m)
            .map(|j| binomial(m - 1, j) * p_fluct.powi(j as i32) * p_los.powi((m - j - 1) as i32))
            .collect())
    }

    /// Density at `gamma`: Gamma mixture for integer `m`, Kummer form otherwise.
    pub fn pdf(&self, gamma: f64) -> Result<f64> {
        check_gamma(gamma)?;
        if is_integer(self.m) {
            self.pdf_mixture(gamma)
        } else {
            self.pdf_kummer(gamma)
        }
    }

    fn pdf_mixture(&self, gamma: f64) -> Result<f64> {
        let m = integer_shape(self.m)?;
        let theta = self.mixture_scale();
        let weights = self.mixture_weights()?;
        let mut acc = 0.0;
        for (j, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let shape = (m - j as u32) as f64;
            let ln_density = if gamma == 0.0 {
                if shape == 1.0 {
                    -theta.ln()
                } else {
                    continue;
                }
            } else {
                (shape - 1.0) * gamma.ln() - gamma / theta - ln_gamma(shape) - shape * theta.ln()
            };
            acc += w * ln_density.exp();
        }
        Ok(acc)
    }

    /// `m^m (1+K) / ((m+K)^m mean) e^{-(1+K) g / mean} ₁F₁(m; 1; K(1+K) g / ((K+m) mean))`,
    /// valid for any real `m > 0`.
    pub fn pdf_kummer(&self, gamma: f64) -> Result<f64> {
        check_gamma(gamma)?;
        let (k, m, mean) = (self.k_factor, self.m, self.mean_snr_x);
        let rate = (1.0 + k) / mean;
        let z = k * rate * gamma / (k + m);
        let ln_pref = m * (m / (m + k)).ln() + rate.ln();
        Ok((ln_pref - rate * gamma + ln_kummer_1f1_m1(m, z)?).exp())
    }

    /// Distribution function, integer `m` only.
    pub fn cdf(&self, gamma: f64) -> Result<f64> {
        check_gamma(gamma)?;
        let m = integer_shape(self.m)?;
        if gamma == 0.0 {
            return Ok(0.0);
        }
        let y = gamma / self.mixture_scale();
        let weights = self.mixture_weights()?;
        let total: f64 = weights
            .iter()
            .enumerate()
            .map(|(j, &w)| w * gamma_p_integer(m - j as u32, y))
            .sum();
        Ok(total.min(1.0))
    }

    /// `E[e^{s g}]` for `s < 0`.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        check_s(s)?;
        let (k, m) = (self.k_factor, self.m);
        let rate = (1.0 + k) / self.mean_snr_x;
        let pole = rate * m / (k + m);
        let ln = m * (m / (k + m)).ln() + rate.ln() + (m - 1.0) * (rate - s).ln() - m * (pole - s).ln();
        Ok(ln.exp())
    }
}

impl MgfFactorTerms {
    pub fn new(p: &ModelParams, s: f64) -> Result<Self> {
        check_s(s)?;
        if !(p.alpha > 0.0) {
            return Err(Error::domain("the factored MGF needs alpha > 0"));
        }
        let (alpha, beta, m) = (p.alpha, p.beta, p.m);
        let sg = s * p.mean_snr;
        let fluct = beta * (m - 1.0) / m;
        Ok(MgfFactorTerms {
            a_of_s: (sg * (1.0 - beta - alpha) - 1.0) / (sg * alpha),
            b_of_s: (sg * (1.0 - fluct - alpha) - 1.0) / (sg * alpha),
            c_const: (1.0 - beta) / alpha - 1.0,
            d_const: (1.0 - fluct) / alpha - 1.0,
        })
    }
}

/// `F1(s; x) = -(s mean (1 - beta - alpha (1 - x)) - 1)^{m-1}`.
pub fn mgf_factor_f1(p: &ModelParams, x: f64, s: f64) -> Result<f64> {
    let m = integer_shape(p.m)?;
    let base = s * p.mean_snr * (1.0 - p.beta - p.alpha * (1.0 - x)) - 1.0;
    Ok(-base.powi(m as i32 - 1))
}

/// `F2(s; x) = (s mean (1 - beta (m-1)/m - alpha (1 - x)) - 1)^{-m}`.
pub fn mgf_factor_f2(p: &ModelParams, x: f64, s: f64) -> Result<f64> {
    let m = integer_shape(p.m)?;
    let base = s * p.mean_snr * (1.0 - p.beta * (p.m - 1.0) / p.m - p.alpha * (1.0 - x)) - 1.0;
    Ok(base.powi(-(m as i32)))
}

/// `∂ⁿ/∂sⁿ E[e^{s g} | x]` via the Leibniz rule over the two MGF factors.
pub fn rs_gmgf_derivative(p: &ModelParams, x: f64, n: u32, s: f64) -> Result<f64> {
    let m = integer_shape(p.m)?;
    if n > MAX_DERIVATIVE_ORDER {
        return Err(Error::domain(format!(
            "derivative order {n} exceeds the supported maximum {MAX_DERIVATIVE_ORDER}"
        )));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("conditioning value x must be >= 0, got {x}")));
    }
    let t = MgfFactorTerms::new(p, s)?;
    let scale = p.mean_snr * p.alpha;
    let mi = m as i32;
    let mut acc = 0.0;
    for q in 0..=n {
        let k = n - q;
        // F1^{(k)} = -(m-k)_k s^{m-1-k} (mean alpha)^{m-1} (x+a)^{m-1-k} (x+c)^k
        let poch1 = pochhammer(p.m - k as f64, k);
        if poch1 == 0.0 {
            continue;
        }
        let e1 = mi - 1 - k as i32;
        let f1 = -poch1
            * s.powi(e1)
            * scale.powi(mi - 1)
            * (x + t.a_of_s).powi(e1)
            * (x + t.c_const).powi(k as i32);
        // F2^{(q)} = (-1)^q (m)_q s^{-m-q} (mean alpha)^{-m} (x+b)^{-m-q} (x+d)^q
        let e2 = -mi - q as i32;
        let f2 = sign(q)
            * pochhammer(p.m, q)
            * s.powi(e2)
            * scale.powi(-mi)
            * (x + t.b_of_s).powi(e2)
            * (x + t.d_const).powi(q as i32);
        acc += binomial(n, q) * f1 * f2;
    }
    Ok(acc)
}

/// Rician density (the `m -> inf` limit) with factor `k` and mean `mean`:
/// `(1+K)/mean e^{-K - (1+K)g/mean} I₀(2 √(K(1+K) g / mean))`.
pub fn rician_pdf(k: f64, mean: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let rate = (1.0 + k) / mean;
    Ok((rate.ln() - k - rate * gamma + ln_hyp0f1_1(k * rate * gamma)?).exp())
}

/// `(-1)^k`.
pub(crate) fn sign(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Regularized lower incomplete gamma `P(k, y)` for integer `k >= 1`.
pub(crate) fn gamma_p_integer(k: u32, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let kf = k as f64;
    if y < kf {
        // e^{-y} y^k / k! Σ_{n>=0} y^n / ((k+1)...(k+n))
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut n = 0.0;
        while term > 1e-17 * sum {
            n += 1.0;
            term *= y / (kf + n);
            sum += term;
        }
        (kf * y.ln() - y - ln_gamma(kf + 1.0)).exp() * sum
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for r in 1..k {
            term *= y / r as f64;
            sum += term;
        }
        1.0 - (-y).exp() * sum
    }
}

pub(crate) fn is_integer(m: f64) -> bool {
    m >= 1.0 && m.fract() == 0.0 && m <= u32::MAX as f64
}

pub(crate) fn integer_shape(m: f64) -> Result<u32> {
    if is_integer(m) {
        Ok(m as u32)
    } else {
        Err(Error::NonIntegerShape(m))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("SNR argument must be finite and >= 0, got {gamma}")))
    }
}

pub(crate) fn check_s(s: f64) -> Result<()> {
    if s < 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("MGF argument s must be negative, got {s}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn fig1(m: f64) -> ModelParams {
        ModelParams::new(0.1, 0.7, m, 2.0).unwrap()
    }

    #[test]
    fn condition_examples() {
        // K_x = beta / (1 - beta - alpha (1 - x)): 0.7 / 0.3 at x = 1, 0.7 / 0.2 at x = 0.
        let c = ConditionalRs::condition(&fig1(4.0), 1.0).unwrap();
        assert!((c.k_factor - 7.0 / 3.0).abs() < 1e-14);
        assert!((c.mean_snr_x - 2.0).abs() < 1e-15);
        let c = ConditionalRs::condition(&fig1(4.0), 0.0).unwrap();
        assert!((c.k_factor - 3.5).abs() < 1e-13);
        assert!((c.mean_snr_x - 1.8).abs() < 1e-15);
        let p = ModelParams::new(0.0, 0.5, 2.0, 1.0).unwrap();
        let c = ConditionalRs::condition(&p, 3.7).unwrap();
        assert_eq!((c.k_factor, c.mean_snr_x), (1.0, 1.0));
    }

    #[test]
    fn condition_rejects_vanishing_diffuse_power() {
        let p = ModelParams::new(0.3, 0.7, 2.0, 1.0).unwrap();
        assert!(ConditionalRs::condition(&p, 0.0).is_err());
        assert!(ConditionalRs::condition(&p, 1e-3).is_ok());
        assert!(ConditionalRs::condition(&fig1(2.0), -1.0).is_err());
    }

    #[test]
    fn pdf_examples() {
        for m in [1.0, 3.0, 2.5] {
            let c = ConditionalRs::new(0.0, 1.0, m).unwrap();
            assert!((c.pdf(0.5).unwrap() - (-0.5f64).exp()).abs() < 1e-14);
        }
        // m = 1: a single exponential term with scale theta = mean.
        let c = ConditionalRs::new(3.5, 2.0, 1.0).unwrap();
        assert!((c.pdf(1.0).unwrap() - 0.5 * (-0.5f64).exp()).abs() < 1e-15);

        let c = ConditionalRs::new(7.0, 1.8, 4.0).unwrap();
        let mixture = c.pdf(2.0).unwrap();
        let kummer = c.pdf_kummer(2.0).unwrap();
        assert!((mixture - kummer).abs() < 1e-10 * kummer);
        assert!(c.pdf(-1.0).is_err());
    }

    #[test]
    fn mixture_equals_kummer_form_on_a_grid() {
        for k in [0.0, 0.3, 3.5, 12.0] {
            for m in 1..=12 {
                let c = ConditionalRs::new(k, 1.7, m as f64).unwrap();
                for g in [0.0, 0.05, 0.9, 4.0, 15.0] {
                    let a = c.pdf(g).unwrap();
                    let b = c.pdf_kummer(g).unwrap();
                    assert!((a - b).abs() <= 1e-11 * b.max(1e-300), "k={k} m={m} g={g}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn pdf_normalizes() {
        for (k, m, mean) in [(0.5, 1.0, 1.0), (3.5, 2.0, 2.0), (7.0, 4.0, 1.8), (2.0, 2.5, 0.7)] {
            let c = ConditionalRs::new(k, mean, m).unwrap();
            let total = oracle::exp_sinh(|g| c.pdf(g).unwrap(), 0.0, mean, 1e-13);
            assert!((total - 1.0).abs() < 1e-10, "k={k} m={m}: {total}");
        }
    }

    #[test]
    fn cdf_examples() {
        let c = ConditionalRs::new(3.5, 2.0, 2.0).unwrap();
        assert_eq!(c.cdf(0.0).unwrap(), 0.0);
        let e = ConditionalRs::new(0.0, 1.0, 1.0).unwrap();
        assert!((e.cdf(1.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        let integral = oracle::tanh_sinh(|g| c.pdf(g).unwrap(), 0.0, 1.5, 1e-14);
        assert!((c.cdf(1.5).unwrap() - integral).abs() < 1e-12);
        assert!(ConditionalRs::new(3.5, 2.0, 2.5).unwrap().cdf(1.0).is_err());
    }

    #[test]
    fn cdf_derivative_is_pdf() {
        let c = ConditionalRs::new(3.5, 2.0, 3.0).unwrap();
        for i in 1..=20 {
            let g = 0.35 * i as f64;
            let h = 1e-5;
            let fd = (c.cdf(g + h).unwrap() - c.cdf(g - h).unwrap()) / (2.0 * h);
            assert!((fd - c.pdf(g).unwrap()).abs() < 1e-6, "g={g}");
        }
    }

    #[test]
    fn mgf_examples() {
        let e = ConditionalRs::new(0.0, 1.0, 1.0).unwrap();
        assert!((e.mgf(-1.0).unwrap() - 0.5).abs() < 1e-15);
        let c = ConditionalRs::new(3.5, 2.0, 2.0).unwrap();
        assert!((c.mgf(-1e-10).unwrap() - 1.0).abs() < 1e-9);
        assert!(c.mgf(0.0).is_err());
        assert!(c.mgf(0.5).is_err());
    }

    #[test]
    fn mgf_is_laplace_transform_of_pdf() {
        for (k, m) in [(3.5, 2.0), (7.0, 4.0), (1.0, 1.5)] {
            let c = ConditionalRs::new(k, 2.0, m).unwrap();
            for s in [-0.1, -1.0, -5.0] {
                let lt = oracle::exp_sinh(|g| (s * g).exp() * c.pdf(g).unwrap(), 0.0, 0.5, 1e-14);
                let v = c.mgf(s).unwrap();
                assert!((v - lt).abs() < 1e-9 * lt, "k={k} m={m} s={s}: {v} vs {lt}");
            }
        }
    }

    #[test]
    fn factor_terms_invariants() {
        let p = fig1(4.0);
        for s in [-0.01, -1.0, -40.0] {
            let t = MgfFactorTerms::new(&p, s).unwrap();
            assert!(t.a_of_s > 0.0 && t.b_of_s > 0.0);
            assert!(t.c_const >= 0.0 && t.d_const >= t.c_const);
        }
        assert!(MgfFactorTerms::new(&ModelParams::new(0.0, 0.7, 4.0, 2.0).unwrap(), -1.0).is_err());
    }

    /// Richardson-extrapolated central differences of the conditional MGF.
    fn fd_derivative(c: &ConditionalRs, n: u32, s: f64) -> f64 {
        let stencil = |h: f64| -> f64 {
            // n-th central difference
            (0..=n)
                .map(|i| {
                    let coeff = binomial(n, i) * sign(i);
                    coeff * c.mgf(s + (n as f64 / 2.0 - i as f64) * h).unwrap()
                })
                .sum::<f64>()
                / h.powi(n as i32)
        };
        // Step sized against the distance to the nearest MGF singularity.
        let reach = 1.0 / c.mixture_scale() - s;
        let h = 0.05 * reach;
        let (d1, d2, d3) = (stencil(h), stencil(h / 2.0), stencil(h / 4.0));
        // Two Richardson steps for an O(h^2) error expansion.
        let r1 = (4.0 * d2 - d1) / 3.0;
        let r2 = (4.0 * d3 - d2) / 3.0;
        (16.0 * r2 - r1) / 15.0
    }

    #[test]
    fn derivative_examples() {
        let p = fig1(2.0);
        let c = ConditionalRs::condition(&p, 1.0).unwrap();
        let zeroth = rs_gmgf_derivative(&p, 1.0, 0, -1.0).unwrap();
        assert!((zeroth - c.mgf(-1.0).unwrap()).abs() < 1e-14);
        for n in 1..=4 {
            let exact = rs_gmgf_derivative(&p, 1.0, n, -1.0).unwrap();
            let fd = fd_derivative(&c, n, -1.0);
            assert!((exact - fd).abs() < 1e-6 * exact.abs(), "n={n}: {exact} vs {fd}");
        }
        assert!(rs_gmgf_derivative(&p, 1.0, 9, -1.0).is_err());
        assert!(rs_gmgf_derivative(&p, 1.0, 1, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn factorization_matches_mgf(x in 0.0f64..20.0, s in -10.0f64..-1e-3, m in 1u32..8) {
            let p = ModelParams::new(0.1, 0.7, m as f64, 2.0).unwrap();
            let c = ConditionalRs::condition(&p, x).unwrap();
            let product = mgf_factor_f1(&p, x, s).unwrap() * mgf_factor_f2(&p, x, s).unwrap();
            let direct = c.mgf(s).unwrap();
            prop_assert!((product - direct).abs() <= 1e-12 * direct);
        }

        #[test]
        fn derivative_matches_finite_differences(
            x in 0.0f64..10.0,
            s in -3.0f64..-0.2,
            m in 1u32..6,
            n in 1u32..=4,
        ) {
            let p = ModelParams::new(0.2, 0.5, m as f64, 1.5).unwrap();
            let c = ConditionalRs::condition(&p, x).unwrap();
            let exact = rs_gmgf_derivative(&p, x, n, s).unwrap();
            let fd = fd_derivative(&c, n, s);
            prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs(), "{} vs {}", exact, fd);
        }
    }
}
