//! Monte-Carlo simulation of the physical channel
//! `S = w0 √ξ e^{jφ} + w1 G1 + w2 G2 G3`, `gamma = mean_snr |S|^2`.
//!
//! Samples are produced in fixed-length blocks. Block `k` of seed `s` is drawn
//! from its own ChaCha stream, so every sample depends only on `(s, k, offset)`
//! and estimates do not change with the number of worker threads.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ComponentWeights, ModelParams};

/// Samples per independent sub-stream.
pub const BLOCK_LEN: usize = 1 << 16;

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Fraction `hits / n` with binomial standard error `√(p̂(1-p̂)/n)`.
    pub fn proportion(hits: u64, n: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("estimate from an empty sample"));
        }
        let p = hits as f64 / n as f64;
        Ok(McEstimate {
            value: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            n_samples: n,
            seed,
        })
    }

    /// Whether `reference` lies within `k` standard errors.
    pub fn within(&self, reference: f64, k: f64) -> bool {
        (self.value - reference).abs() <= k * self.std_error
    }
}

/// Law of the line-of-sight power `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Shadowing {
    /// `ξ ~ Gamma(m, 1/m)`, unit mean.
    #[default]
    Gamma,
    /// `ξ = 1`: the unshadowed second-order scattering model.
    Pinned,
}

/// Single-owner generator of SNR samples.
#[derive(Debug, Clone)]
pub struct SnrSampler {
    weights: ComponentWeights,
    mean_snr: f64,
    xi: Option<Gamma<f64>>,
    rng: ChaCha8Rng,
}

impl SnrSampler {
    /// Generator for sub-stream `block` of `seed`.
    pub fn new(p: &ModelParams, seed: u64, block: u64, shadowing: Shadowing) -> Result<Self> {
        p.validate()?;
        let xi = match shadowing {
            Shadowing::Gamma => Some(
                Gamma::new(p.m, 1.0 / p.m)
                    .map_err(|e| Error::domain(format!("Gamma({}, 1/{}) sampler: {e}", p.m, p.m)))?,
            ),
            Shadowing::Pinned => None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        Ok(SnrSampler {
            weights: p.to_weights(),
            mean_snr: p.mean_snr,
            xi,
            rng,
        })
    }

    fn complex_normal(&mut self) -> (f64, f64) {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        (re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
    }

    pub fn sample(&mut self) -> f64 {
        let ComponentWeights { w0, w1, w2 } = self.weights;
        let xi = match &self.xi {
            Some(law) => law.sample(&mut self.rng),
            None => 1.0,
        };
        let (sin, cos) = (self.rng.random::<f64>() * TAU).sin_cos();
        let los = w0 * xi.sqrt();
        let g1 = self.complex_normal();
        let g2 = self.complex_normal();
        let g3 = self.complex_normal();
        let re = los * cos + w1 * g1.0 + w2 * (g2.0 * g3.0 - g2.1 * g3.1);
        let im = los * sin + w1 * g1.1 + w2 * (g2.0 * g3.1 + g2.1 * g3.0);
        self.mean_snr * (re * re + im * im)
    }
}

impl Iterator for SnrSampler {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.sample())
    }
}

fn check_count(count: u64) -> Result<()> {
    if count == 0 {
        Err(Error::domain("sample count must be positive"))
    } else {
        Ok(())
    }
}

/// Applies `f` to each block of `count` samples and returns the results in
/// block order. Blocks are evaluated in parallel with the `parallel` feature.
pub fn map_blocks<T, F>(
    p: &ModelParams,
    count: u64,
    seed: u64,
    shadowing: Shadowing,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync + Send,
{
    check_count(count)?;
    SnrSampler::new(p, seed, 0, shadowing)?;
    let blocks = count.div_ceil(BLOCK_LEN as u64);
    let run = |k: u64| -> T {
        let len = (count - k * BLOCK_LEN as u64).min(BLOCK_LEN as u64) as usize;
        let sampler = SnrSampler::new(p, seed, k, shadowing).expect("validated above");
        let buf: Vec<f64> = sampler.take(len).collect();
        f(&buf)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((0..blocks).into_par_iter().map(run).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok((0..blocks).map(run).collect())
    }
}

/// `count` samples of `gamma` with `ξ ~ Gamma(m, 1/m)`.
pub fn sample_snr(p: &ModelParams, count: u64, seed: u64) -> Result<Vec<f64>> {
    sample_snr_with(p, count, seed, Shadowing::Gamma)
}

pub fn sample_snr_with(
    p: &ModelParams,
    count: u64,
    seed: u64,
    shadowing: Shadowing,
) -> Result<Vec<f64>> {
    Ok(map_blocks(p, count, seed, shadowing, |b| b.to_vec())?.concat())
}

/// Density-normalized histogram on `[lo, hi)` with equal-width bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Total samples seen, including those outside the range.
    pub total: u64,
}

impl Histogram {
    pub fn new(bins: usize, range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        if bins == 0 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!(
                "histogram needs bins > 0 and a finite interval lo < hi, got {bins} on [{lo}, {hi})"
            )));
        }
        Ok(Histogram {
            lo,
            hi,
            counts: vec![0; bins],
            total: 0,
        })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn edges(&self, k: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + k as f64 * w, self.lo + (k + 1) as f64 * w)
    }

    pub fn add(&mut self, v: f64) {
        self.total += 1;
        if v >= self.lo && v < self.hi {
            let last = self.counts.len() - 1;
            let k = ((v - self.lo) / self.width()) as usize;
            self.counts[k.min(last)] += 1;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.total += other.total;
    }

    /// Bin mass over bin width over total count.
    pub fn density(&self) -> Vec<f64> {
        let scale = 1.0 / (self.width() * self.total.max(1) as f64);
        self.counts.iter().map(|&c| c as f64 * scale).collect()
    }

    /// Binomial standard error of each bin density.
    pub fn std_error(&self) -> Vec<f64> {
        let n = self.total.max(1) as f64;
        self.counts
            .iter()
            .map(|&c| {
                let q = c as f64 / n;
                (q * (1.0 - q) / n).sqrt() / self.width()
            })
            .collect()
    }
}

/// Histogram density of `samples` over `bins` equal bins on `range`.
pub fn empirical_pdf(samples: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::domain("histogram of an empty sample"));
    }
    let mut h = Histogram::new(bins, range)?;
    samples.iter().for_each(|&v| h.add(v));
    Ok(h)
}

/// Fraction of samples strictly below `gamma_th`.
pub fn empirical_op(samples: &[f64], gamma_th: f64) -> Result<McEstimate> {
    if !(gamma_th > 0.0) {
        return Err(Error::domain(format!("threshold must be positive, got {gamma_th}")));
    }
    let hits = samples.iter().filter(|&&v| v < gamma_th).count() as u64;
    McEstimate::proportion(hits, samples.len() as u64, 0)
}

/// Running sums of `gamma^k` for `k = 1..=2 n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSums {
    n_max: usize,
    sums: Vec<f64>,
    count: u64,
}

impl MomentSums {
    pub fn new(n_max: usize) -> Self {
        MomentSums {
            n_max,
            sums: vec![0.0; 2 * n_max],
            count: 0,
        }
    }

    pub fn add(&mut self, v: f64) {
        let mut pow = 1.0;
        for s in &mut self.sums {
            pow *= v;
            *s += pow;
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: &MomentSums) {
        for (s, o) in self.sums.iter_mut().zip(&other.sums) {
            *s += o;
        }
        self.count += other.count;
    }

    /// Estimates of `E[gamma^k]` for `k = 1..=n_max`.
    pub fn estimates(&self, seed: u64) -> Result<Vec<McEstimate>> {
        if self.count == 0 {
            return Err(Error::domain("moments of an empty sample"));
        }
        let n = self.count as f64;
        Ok((0..self.n_max)
            .map(|k| {
                let mean = self.sums[k] / n;
                let second = self.sums[2 * k + 1] / n;
                McEstimate {
                    value: mean,
                    std_error: ((second - mean * mean).max(0.0) / n).sqrt(),
                    n_samples: self.count,
                    seed,
                }
            })
            .collect())
    }
}

/// Monte-Carlo raw moments `E[gamma^k]`, `k = 1..=n_max`, without storing samples.
pub fn mc_moments(
    p: &ModelParams,
    n_max: usize,
    count: u64,
    seed: u64,
    shadowing: Shadowing,
) -> Result<Vec<McEstimate>> {
    let parts = map_blocks(p, count, seed, shadowing, |b| {
        let mut acc = MomentSums::new(n_max);
        b.iter().for_each(|&v| acc.add(v));
        acc
    })?;
    let mut total = MomentSums::new(n_max);
    parts.iter().for_each(|s| total.merge(s));
    total.estimates(seed)
}

/// Monte-Carlo histogram density without storing samples.
pub fn mc_histogram(
    p: &ModelParams,
    bins: usize,
    range: (f64, f64),
    count: u64,
    seed: u64,
    shadowing: Shadowing,
) -> Result<Histogram> {
    let empty = Histogram::new(bins, range)?;
    let parts = map_blocks(p, count, seed, shadowing, |b| {
        let mut h = empty.clone();
        b.iter().for_each(|&v| h.add(v));
        h
    })?;
    let mut total = empty;
    parts.iter().for_each(|h| total.merge(h));
    Ok(total)
}

/// Monte-Carlo outage probability at each threshold, sharing one sample stream.
pub fn mc_outage(
    p: &ModelParams,
    thresholds: &[f64],
    count: u64,
    seed: u64,
    shadowing: Shadowing,
) -> Result<Vec<McEstimate>> {
    if let Some(t) = thresholds.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::domain(format!("threshold must be positive, got {t}")));
    }
    let parts = map_blocks(p, count, seed, shadowing, |b| {
        thresholds
            .iter()
            .map(|&t| b.iter().filter(|&&v| v < t).count() as u64)
            .collect::<Vec<u64>>()
    })?;
    (0..thresholds.len())
        .map(|i| McEstimate::proportion(parts.iter().map(|h| h[i]).sum(), count, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, beta: f64, m: f64, mean: f64) -> ModelParams {
        ModelParams::new(alpha, beta, m, mean).unwrap()
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = params(0.1, 0.7, 2.5, 2.0);
        let a = sample_snr(&p, 200_000, 7).unwrap();
        let b = sample_snr(&p, 200_000, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_snr(&p, 200_000, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn prefix_stable_across_counts() {
        let p = params(0.2, 0.3, 1.5, 1.0);
        let long = sample_snr(&p, 3 * BLOCK_LEN as u64 + 17, 3).unwrap();
        let short = sample_snr(&p, BLOCK_LEN as u64 + 5, 3).unwrap();
        assert_eq!(&long[..short.len()], &short[..]);
    }

    #[test]
    fn partition_invariant_estimates() {
        let p = params(0.1, 0.7, 4.0, 2.0);
        let n = 5 * BLOCK_LEN as u64 + 123;
        let samples = sample_snr(&p, n, 11).unwrap();
        let direct = empirical_op(&samples, 1.0).unwrap();
        let streamed = mc_outage(&p, &[1.0], n, 11, Shadowing::Gamma).unwrap()[0];
        assert_eq!(direct.value, streamed.value);
        let h1 = empirical_pdf(&samples, 10, (0.0, 5.0)).unwrap();
        let h2 = mc_histogram(&p, 10, (0.0, 5.0), n, 11, Shadowing::Gamma).unwrap();
        assert_eq!(h1, h2);
    }

    #[test]
    fn deterministic_los_corner() {
        let p = params(0.0, 1.0, 1e8, 1.0);
        let s = sample_snr(&p, 100_000, 1).unwrap();
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        let var = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / s.len() as f64;
        assert!(var < 1e-6 && (mean - 1.0).abs() < 1e-3, "{mean} {var}");
    }

    #[test]
    fn rayleigh_corner_ks() {
        let p = params(0.0, 0.0, 1.0, 1.0);
        let n = 1_000_000;
        let mut s = sample_snr(&p, n, 5).unwrap();
        s.sort_by(f64::total_cmp);
        let ks = s
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let f = -(-v).exp_m1();
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 1.63 / (n as f64).sqrt(), "KS = {ks}");
    }

    #[test]
    fn mean_matches_average_snr() {
        let p = params(0.1, 0.7, 4.0, 2.0);
        let est = mc_moments(&p, 1, 2_000_000, 9, Shadowing::Gamma).unwrap()[0];
        assert!(est.within(2.0, 3.0), "{est:?}");
    }

    #[test]
    fn xi_has_unit_mean_and_variance_one_over_m() {
        for m in [1.0, 2.0, 4.0, 20.0, 0.4] {
            let law = Gamma::new(m, 1.0 / m).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            let mut acc = MomentSums::new(2);
            (0..400_000).for_each(|_| acc.add(law.sample(&mut rng)));
            let est = acc.estimates(2).unwrap();
            assert!(est[0].within(1.0, 3.0), "m={m}: {:?}", est[0]);
            let var = est[1].value - est[0].value.powi(2);
            // Var = E[ξ²] - 1; the error of E[ξ²] dominates.
            assert!((var - 1.0 / m).abs() <= 3.0 * est[1].std_error + 2e-3, "m={m}: {var}");
        }
    }

    #[test]
    fn std_error_halves_at_four_times_the_samples() {
        let p = params(0.1, 0.7, 4.0, 1.0);
        let a = mc_outage(&p, &[0.5], 250_000, 4, Shadowing::Gamma).unwrap()[0];
        let b = mc_outage(&p, &[0.5], 1_000_000, 4, Shadowing::Gamma).unwrap()[0];
        let ratio = a.std_error / b.std_error;
        assert!((1.6..=2.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn histogram_examples() {
        let h = empirical_pdf(&[2.5; 100], 10, (0.0, 10.0)).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.counts[2], 100);
        let mass: f64 = h.density().iter().sum::<f64>() * h.width();
        assert!((mass - 1.0).abs() < 1e-14);

        let p = params(0.0, 0.0, 1.0, 1.0);
        let h = mc_histogram(&p, 100, (0.0, 10.0), 1_000_000, 6, Shadowing::Gamma).unwrap();
        let (dens, err) = (h.density(), h.std_error());
        let mut misses = 0;
        for k in 0..100 {
            let (a, b) = h.edges(k);
            let expected = ((-a).exp() - (-b).exp()) / h.width();
            if (dens[k] - expected).abs() > 3.0 * err[k].max(1e-12) {
                misses += 1;
            }
        }
        // Per-bin 3σ gates fail with probability ~0.3% each.
        assert!(misses <= 2, "{misses} bins outside 3σ");
    }

    #[test]
    fn outage_examples() {
        let est = empirical_op(&[2.0, 3.0, 4.0], 1.0).unwrap();
        assert_eq!((est.value, est.std_error), (0.0, 0.0));
        let p = params(0.0, 0.0, 1.0, 1.0);
        let est = mc_outage(&p, &[1.0], 1_000_000, 12, Shadowing::Gamma).unwrap()[0];
        assert!(est.within(1.0 - (-1.0f64).exp(), 3.0), "{est:?}");
    }

    #[test]
    fn rejects_bad_input() {
        let p = params(0.1, 0.7, 4.0, 1.0);
        assert!(sample_snr(&p, 0, 1).unwrap_err().is_domain());
        assert!(empirical_pdf(&[], 10, (0.0, 1.0)).unwrap_err().is_domain());
        assert!(empirical_pdf(&[1.0], 10, (1.0, 1.0)).unwrap_err().is_domain());
        assert!(empirical_op(&[], 1.0).unwrap_err().is_domain());
    }
}
