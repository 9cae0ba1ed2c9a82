//! Evaluation of sweep points.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};

use fsosf::montecarlo::{map_blocks, mc_histogram, mc_moments, mc_outage, McEstimate, Shadowing};
use fsosf::stats;
use rayon::prelude::*;
use serde::Serialize;

use crate::spec::{McSpec, Param, Point, Quantity, SweepSpec};

/// Half-width of the histogram bin used for Monte-Carlo density estimates.
pub const MC_PDF_HALF_WIDTH: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub index: usize,
    /// Sweep value, absent for single-point evaluation.
    pub x: Option<f64>,
    pub value: Option<f64>,
    pub mc: Option<McEstimate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Column name of the sweep value, if any.
    pub sweep: Option<&'static str>,
    pub quantity: Quantity,
    pub with_mc: bool,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn columns(&self) -> Vec<&'static str> {
        let mut c = Vec::new();
        c.extend(self.sweep);
        c.push(self.quantity.name());
        if self.with_mc {
            c.extend(["mc_value", "mc_std_error"]);
        }
        c
    }

    pub fn errors(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.error.is_some())
    }
}

/// Analytic value of the quantity at a point. The Monte-Carlo quantities
/// report their analytic counterpart here.
pub fn analytic(q: Quantity, pt: &Point) -> Result<f64, String> {
    let p = pt.model().map_err(|e| e.to_string())?;
    let r = match q {
        Quantity::Pdf | Quantity::McPdf => stats::pdf(&p, pt.get(Param::Gamma)),
        Quantity::Cdf => stats::cdf(&p, pt.get(Param::Gamma)),
        Quantity::Op | Quantity::McOp => {
            let th = pt.gamma_th();
            if th > 0.0 {
                stats::cdf(&p, th)
            } else {
                return Err(format!("threshold must be positive, got {th}"));
            }
        }
        Quantity::OpAsymptotic => stats::outage_asymptotic(&p, pt.gamma_th()),
        Quantity::Moment => stats::moment(&p, pt.order().map_err(|e| e.to_string())?),
        Quantity::Gmgf => stats::gmgf(&p, pt.order().map_err(|e| e.to_string())?, pt.get(Param::S)),
    };
    r.map_err(|e| e.to_string())
}

/// Monte-Carlo estimate of the quantity at a point.
pub fn monte_carlo(q: Quantity, pt: &Point, mc: McSpec) -> Result<McEstimate, String> {
    let p = pt.model().map_err(|e| e.to_string())?;
    let (n, seed) = (mc.samples, mc.seed);
    let s = Shadowing::Gamma;
    let r = match q {
        Quantity::Pdf | Quantity::McPdf => {
            let g = pt.get(Param::Gamma);
            let lo = (g - MC_PDF_HALF_WIDTH).max(0.0);
            let h = mc_histogram(&p, 1, (lo, g + MC_PDF_HALF_WIDTH), n, seed, s);
            h.map(|h| McEstimate {
                value: h.density()[0],
                std_error: h.std_error()[0],
                n_samples: n,
                seed,
            })
        }
        Quantity::Cdf => mc_outage(&p, &[pt.get(Param::Gamma)], n, seed, s).map(|v| v[0]),
        Quantity::Op | Quantity::OpAsymptotic | Quantity::McOp => {
            mc_outage(&p, &[pt.gamma_th()], n, seed, s).map(|v| v[0])
        }
        Quantity::Moment => {
            let order = pt.order().map_err(|e| e.to_string())?;
            if order == 0 {
                return Ok(McEstimate { value: 1.0, std_error: 0.0, n_samples: n, seed });
            }
            mc_moments(&p, order as usize, n, seed, s).map(|v| v[order as usize - 1])
        }
        Quantity::Gmgf => {
            let order = pt.order().map_err(|e| e.to_string())? as i32;
            let sv = pt.get(Param::S);
            map_blocks(&p, n, seed, s, |b| {
                b.iter().fold((0.0, 0.0), |(a, a2), &g| {
                    let v = g.powi(order) * (sv * g).exp();
                    (a + v, a2 + v * v)
                })
            })
            .map(|parts| {
                let (sum, sum2) = parts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
                let mean = sum / n as f64;
                let var = (sum2 / n as f64 - mean * mean).max(0.0);
                McEstimate { value: mean, std_error: (var / n as f64).sqrt(), n_samples: n, seed }
            })
        }
    };
    r.map_err(|e| e.to_string())
}

fn evaluate(q: Quantity, index: usize, x: Option<f64>, pt: &Point, mc: Option<McSpec>) -> Row {
    let mut row = Row { index, x, value: None, mc: None, error: None };
    match analytic(q, pt) {
        Ok(v) => row.value = Some(v),
        Err(e) => row.error = Some(e),
    }
    if let (Some(mc), None) = (mc, &row.error) {
        match monte_carlo(q, pt, mc) {
            Ok(est) => row.mc = Some(est),
            Err(e) => row.error = Some(e),
        }
    }
    row
}

/// Evaluates every sweep point concurrently; rows come back in sweep order.
/// With Monte-Carlo enabled and `progress` set, a counter is written to stderr.
pub fn run_sweep(spec: &SweepSpec, progress: bool) -> Table {
    let xs = spec.sweep_range.values().unwrap_or_default();
    let done = AtomicUsize::new(0);
    let total = xs.len();
    let show = progress && spec.mc.is_some();
    let rows = xs
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let row = evaluate(spec.quantity, i, Some(x), &spec.point(x), spec.mc);
            if show {
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                let _ = write!(std::io::stderr(), "\rsweep: {k}/{total} points");
                if k == total {
                    let _ = writeln!(std::io::stderr());
                }
            }
            row
        })
        .collect();
    Table {
        sweep: Some(spec.sweep_var.param().name()),
        quantity: spec.quantity,
        with_mc: spec.mc.is_some(),
        rows,
    }
}

/// Single-point evaluation.
pub fn run_point(q: Quantity, pt: &Point, mc: Option<McSpec>) -> Table {
    Table {
        sweep: None,
        quantity: q,
        with_mc: mc.is_some(),
        rows: vec![evaluate(q, 0, None, pt, mc)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{FixedParams, Scale, SweepRange, SweepVar};

    fn fixed(pairs: &[(Param, f64)]) -> FixedParams {
        let mut f = FixedParams::default();
        pairs.iter().for_each(|&(p, v)| f.set(p, v).unwrap());
        f
    }

    #[test]
    fn outage_sweep_decreases() {
        let spec = SweepSpec::new(
            Quantity::Op,
            SweepVar::MeanSnrDb,
            SweepRange { start: 0.0, stop: 40.0, points: 17, scale: Scale::Linear },
            fixed(&[(Param::Alpha, 0.1), (Param::Beta, 0.7), (Param::M, 4.0), (Param::GammaThDb, 3.0)]),
            None,
        )
        .unwrap();
        let t = run_sweep(&spec, false);
        let v: Vec<f64> = t.rows.iter().map(|r| r.value.unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
        assert_eq!(t.columns(), ["mean_snr_db", "op"]);
    }

    #[test]
    fn row_errors_are_isolated() {
        // Sweeping m over non-integers routes through quadrature; moment needs integer m.
        let spec = SweepSpec::new(
            Quantity::Moment,
            SweepVar::M,
            SweepRange { start: 1.0, stop: 2.0, points: 3, scale: Scale::Linear },
            fixed(&[(Param::Alpha, 0.1), (Param::Beta, 0.7), (Param::MeanSnrDb, 0.0), (Param::N, 2.0)]),
            None,
        )
        .unwrap();
        let t = run_sweep(&spec, false);
        assert!(t.rows[0].error.is_none() && t.rows[2].error.is_none());
        assert!(t.rows[1].error.is_some());
        assert_eq!(t.errors().count(), 1);
    }

    #[test]
    fn mc_columns_track_analytic_values() {
        let mut values = std::collections::BTreeMap::new();
        for (p, v) in [(Param::Alpha, 0.1), (Param::Beta, 0.7), (Param::M, 1.0), (Param::MeanSnrDb, 0.0), (Param::GammaThDb, 0.0)] {
            values.insert(p, v);
        }
        let t = run_point(Quantity::McOp, &Point { values }, Some(McSpec { samples: 400_000, seed: 3 }));
        let row = &t.rows[0];
        assert!(row.mc.unwrap().within(row.value.unwrap(), 3.0), "{row:?}");
    }
}
