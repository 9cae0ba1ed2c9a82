//! Sweep specifications and their validation.

use std::collections::BTreeMap;
use std::fmt;

use fsosf::{db_to_linear, ModelParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("parameter `{0}` given more than once")]
    Duplicate(String),
    #[error("parameter `{0}` is both swept and fixed")]
    SweptAndFixed(String),
    #[error("quantity `{quantity}` needs parameter `{name}`")]
    Missing { quantity: Quantity, name: String },
    #[error("parameter `{name}` is not used by quantity `{quantity}`")]
    Unused { quantity: Quantity, name: String },
    #[error("invalid sweep range: {0}")]
    Range(String),
    #[error("quantity `{0}` needs Monte-Carlo settings (--mc-samples)")]
    NeedsMc(Quantity),
    #[error("invalid model parameters: {0}")]
    Model(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    Pdf,
    Cdf,
    Op,
    OpAsymptotic,
    Moment,
    Gmgf,
    McPdf,
    McOp,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Pdf => "pdf",
            Quantity::Cdf => "cdf",
            Quantity::Op => "op",
            Quantity::OpAsymptotic => "op_asymptotic",
            Quantity::Moment => "moment",
            Quantity::Gmgf => "gmgf",
            Quantity::McPdf => "mc_pdf",
            Quantity::McOp => "mc_op",
        }
    }

    /// Parameters this quantity needs, beyond the model parameters.
    pub fn extras(self) -> &'static [Param] {
        match self {
            Quantity::Pdf | Quantity::Cdf | Quantity::McPdf => &[Param::Gamma],
            Quantity::Op | Quantity::OpAsymptotic | Quantity::McOp => &[Param::GammaThDb],
            Quantity::Moment => &[Param::N],
            Quantity::Gmgf => &[Param::N, Param::S],
        }
    }

    pub fn needs_mc(self) -> bool {
        matches!(self, Quantity::McPdf | Quantity::McOp)
    }

    pub fn required(self) -> Vec<Param> {
        let mut r = vec![Param::Alpha, Param::Beta, Param::M, Param::MeanSnrDb];
        r.extend_from_slice(self.extras());
        r
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every scalar a spec can fix or sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Alpha,
    Beta,
    M,
    MeanSnrDb,
    Gamma,
    GammaThDb,
    N,
    S,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::M => "m",
            Param::MeanSnrDb => "mean_snr_db",
            Param::Gamma => "gamma",
            Param::GammaThDb => "gamma_th_db",
            Param::N => "n",
            Param::S => "s",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Variables that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SweepVar {
    Gamma,
    MeanSnrDb,
    M,
    Alpha,
    Beta,
    N,
    S,
}

impl SweepVar {
    pub fn param(self) -> Param {
        match self {
            SweepVar::Gamma => Param::Gamma,
            SweepVar::MeanSnrDb => Param::MeanSnrDb,
            SweepVar::M => Param::M,
            SweepVar::Alpha => Param::Alpha,
            SweepVar::Beta => Param::Beta,
            SweepVar::N => Param::N,
            SweepVar::S => Param::S,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepRange {
    pub fn values(&self) -> Result<Vec<f64>, SpecError> {
        if self.points == 0 {
            return Err(SpecError::Range("points must be positive".into()));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(SpecError::Range("endpoints must be finite".into()));
        }
        if self.scale == Scale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(SpecError::Range("log scale needs positive endpoints".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                // Endpoints are reproduced exactly, not through exp(ln(.)).
                if i == 0 {
                    return self.start;
                }
                if i == self.points - 1 {
                    return self.stop;
                }
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSpec {
    pub samples: u64,
    pub seed: u64,
}

/// A validated sweep: one quantity over one variable, everything else fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub sweep_var: SweepVar,
    pub sweep_range: SweepRange,
    pub fixed: BTreeMap<Param, f64>,
    pub mc: Option<McSpec>,
}

/// Collects fixed parameters, rejecting duplicates.
#[derive(Debug, Default, Clone)]
pub struct FixedParams {
    values: BTreeMap<Param, f64>,
}

impl FixedParams {
    pub fn set(&mut self, p: Param, v: f64) -> Result<(), SpecError> {
        if self.values.insert(p, v).is_some() {
            return Err(SpecError::Duplicate(p.name().into()));
        }
        Ok(())
    }

    /// Sets `p` from a repeatable flag's values.
    pub fn set_all(&mut self, p: Param, values: &[f64]) -> Result<(), SpecError> {
        values.iter().try_for_each(|&v| self.set(p, v))
    }

    pub fn into_map(self) -> BTreeMap<Param, f64> {
        self.values
    }
}

/// Checks that `fixed` plus the optional swept parameter cover exactly the
/// parameters `quantity` needs.
pub fn check_coverage(
    quantity: Quantity,
    swept: Option<Param>,
    fixed: &BTreeMap<Param, f64>,
    mc: Option<McSpec>,
) -> Result<(), SpecError> {
    let required = quantity.required();
    if let Some(v) = swept {
        if fixed.contains_key(&v) {
            return Err(SpecError::SweptAndFixed(v.name().into()));
        }
        if !required.contains(&v) {
            return Err(SpecError::Unused { quantity, name: v.name().into() });
        }
    }
    for r in &required {
        if Some(*r) != swept && !fixed.contains_key(r) {
            return Err(SpecError::Missing { quantity, name: r.name().into() });
        }
    }
    if let Some(extra) = fixed.keys().find(|k| !required.contains(k)) {
        return Err(SpecError::Unused { quantity, name: extra.name().into() });
    }
    if quantity.needs_mc() && mc.is_none() {
        return Err(SpecError::NeedsMc(quantity));
    }
    if let Some(m) = mc {
        if m.samples == 0 {
            return Err(SpecError::Range("--mc-samples must be positive".into()));
        }
    }
    Ok(())
}

impl SweepSpec {
    pub fn new(
        quantity: Quantity,
        sweep_var: SweepVar,
        sweep_range: SweepRange,
        fixed: FixedParams,
        mc: Option<McSpec>,
    ) -> Result<Self, SpecError> {
        let fixed = fixed.into_map();
        check_coverage(quantity, Some(sweep_var.param()), &fixed, mc)?;
        sweep_range.values()?;
        Ok(SweepSpec {
            quantity,
            sweep_var,
            sweep_range,
            fixed,
            mc,
        })
    }

    /// Fully resolved point for sweep value `x`.
    pub fn point(&self, x: f64) -> Point {
        let mut values = self.fixed.clone();
        values.insert(self.sweep_var.param(), x);
        Point { values }
    }
}

/// All parameter values at one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub values: BTreeMap<Param, f64>,
}

impl Point {
    pub fn get(&self, p: Param) -> f64 {
        self.values.get(&p).copied().unwrap_or(f64::NAN)
    }

    pub fn model(&self) -> Result<ModelParams, SpecError> {
        ModelParams::with_snr_db(
            self.get(Param::Alpha),
            self.get(Param::Beta),
            self.get(Param::M),
            self.get(Param::MeanSnrDb),
        )
        .map_err(|e| SpecError::Model(e.to_string()))
    }

    pub fn gamma_th(&self) -> f64 {
        db_to_linear(self.get(Param::GammaThDb))
    }

    /// Derivative or moment order; must be a nonnegative integer.
    pub fn order(&self) -> Result<u32, SpecError> {
        let n = self.get(Param::N);
        if n >= 0.0 && n.fract() == 0.0 && n <= u32::MAX as f64 {
            Ok(n as u32)
        } else {
            Err(SpecError::Model(format!("order n must be a nonnegative integer, got {n}")))
        }
    }
}
