//! Model parameters and their two equivalent parameterizations.
//!
//! The power-share form `(alpha, beta)` is the working representation:
//! `alpha` is the double-Rayleigh share `w2^2` and `beta` the line-of-sight
//! share `w0^2` of a unit-power channel, so the diffuse Rayleigh share is
//! `1 - alpha - beta`. The shape `m` controls how strongly the
//! line-of-sight power fluctuates (`m -> inf` removes the fluctuation).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold used to route near-boundary parameters to a limiting model.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Parameter tuple `(alpha, beta, m, mean_snr)` with `mean_snr` in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub mean_snr: f64,
}

/// Amplitude weights of the line-of-sight, Rayleigh and double-Rayleigh terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentWeights {
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
}

/// Special-case classification used for routing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelClass {
    Fsosf,
    SosfLimit,
    RicianShadowed,
    Rayleigh,
    Rician,
}

impl ModelParams {
    /// Builds and validates a parameter set.
    pub fn new(alpha: f64, beta: f64, m: f64, mean_snr: f64) -> Result<Self> {
        ModelParams {
            alpha,
            beta,
            m,
            mean_snr,
        }
        .validate()
    }

    /// Same as [`ModelParams::new`] with the mean SNR given in dB.
    pub fn with_snr_db(alpha: f64, beta: f64, m: f64, mean_snr_db: f64) -> Result<Self> {
        Self::new(alpha, beta, m, db_to_linear(mean_snr_db))
    }

    /// Returns `self` unchanged if every invariant holds.
    pub fn validate(self) -> Result<Self> {
        if !(self.alpha >= 0.0) {
            return Err(Error::NegativeShare {
                name: "alpha",
                value: self.alpha,
            });
        }
        if !(self.beta >= 0.0) {
            return Err(Error::NegativeShare {
                name: "beta",
                value: self.beta,
            });
        }
        // A few ulps of slack so that shares computed as 1 - x still pass.
        if self.alpha + self.beta > 1.0 + 4.0 * f64::EPSILON {
            return Err(Error::Triangle(self.alpha + self.beta));
        }
        if !(self.m > 0.0) || self.m.is_nan() {
            return Err(Error::NonPositiveShape(self.m));
        }
        if !(self.mean_snr > 0.0 && self.mean_snr.is_finite()) {
            return Err(Error::NonPositiveMeanSnr(self.mean_snr));
        }
        Ok(self)
    }

    /// Diffuse Rayleigh power share `1 - alpha - beta`; values within a few
    /// ulps of zero (the triangle edge) are returned as exactly zero.
    pub fn rayleigh_share(&self) -> f64 {
        let share = 1.0 - self.alpha - self.beta;
        if share <= 4.0 * f64::EPSILON {
            0.0
        } else {
            share
        }
    }

    pub fn to_weights(&self) -> ComponentWeights {
        ComponentWeights {
            w0: self.beta.sqrt(),
            w1: self.rayleigh_share().sqrt(),
            w2: self.alpha.sqrt(),
        }
    }

    /// Integer value of `m`, if `m` is a positive integer small enough to be exact.
    pub fn integer_m(&self) -> Option<u32> {
        if self.m >= 1.0 && self.m <= u32::MAX as f64 && self.m.fract() == 0.0 {
            Some(self.m as u32)
        } else {
            None
        }
    }

    pub fn classify(&self, eps: f64) -> ModelClass {
        let no_dr = self.alpha < eps;
        let no_fluctuation = self.m >= 1.0 / eps;
        if no_dr && self.beta < eps {
            ModelClass::Rayleigh
        } else if no_dr && no_fluctuation {
            ModelClass::Rician
        } else if no_dr {
            ModelClass::RicianShadowed
        } else if no_fluctuation {
            ModelClass::SosfLimit
        } else {
            ModelClass::Fsosf
        }
    }

    pub fn with_mean_snr(self, mean_snr: f64) -> Result<Self> {
        ModelParams { mean_snr, ..self }.validate()
    }
}

impl ComponentWeights {
    /// Builds normalized weights; fails unless `w0^2 + w1^2 + w2^2 = 1` within 1e-12.
    pub fn new(w0: f64, w1: f64, w2: f64) -> Result<Self> {
        if w0 < 0.0 || w1 < 0.0 || w2 < 0.0 {
            return Err(Error::domain("component weights must be nonnegative"));
        }
        let power = w0 * w0 + w1 * w1 + w2 * w2;
        if (power - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "component weights carry total power {power}, expected 1"
            )));
        }
        Ok(ComponentWeights { w0, w1, w2 })
    }

    /// Recovers the power-share parameters for the given `m` and mean SNR.
    pub fn to_params(&self, m: f64, mean_snr: f64) -> Result<ModelParams> {
        let total = self.w0 * self.w0 + self.w1 * self.w1 + self.w2 * self.w2;
        ModelParams::new(
            self.w2 * self.w2 / total,
            self.w0 * self.w0 / total,
            m,
            mean_snr,
        )
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
