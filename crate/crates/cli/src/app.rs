//! Argument parsing and subcommand dispatch.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fsosf::montecarlo::sample_snr;
use serde::Serialize;

use crate::emit::{emit, emit_samples, error_summary, Destination, Format};
use crate::spec::{check_coverage, FixedParams, McSpec, Param, Point, Quantity, Scale, SpecError, SweepRange, SweepSpec, SweepVar};
use crate::sweep::{run_point, run_sweep};

/// Exit status when at least one row failed to evaluate.
pub const EXIT_ROW_ERRORS: i32 = 1;
/// Exit status for an invalid specification.
pub const EXIT_SPEC: i32 = 2;
/// Exit status when output could not be written.
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fsosf", version, about = "Statistics of the fluctuating second-order scattering fading model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a quantity over a range of one variable.
    Sweep(SweepArgs),
    /// Evaluate a quantity at a single point.
    Eval(EvalArgs),
    /// Dump raw Monte-Carlo SNR samples.
    Simulate(SimulateArgs),
}

/// Model and quantity parameters. Each may be given at most once.
#[derive(Debug, Args, Default)]
pub struct ParamArgs {
    /// Double-scattering power share.
    #[arg(long, action = clap::ArgAction::Append, allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    /// Line-of-sight power share.
    #[arg(long, action = clap::ArgAction::Append, allow_negative_numbers = true)]
    pub beta: Vec<f64>,
    /// Line-of-sight shadowing shape.
    #[arg(long, action = clap::ArgAction::Append, allow_negative_numbers = true)]
    pub m: Vec<f64>,
    /// Average SNR in dB.
    #[arg(long = "snr-db", action = clap::ArgAction::Append, allow_negative_numbers = true)]
    pub snr_db: Vec<f64>,
    /// SNR value (linear) at which pdf and cdf are evaluated.
    #[arg(long, action = clap::ArgAction::Append, allow_negative_numbers = true)]
    pub gamma: Vec<f64>,
    /// Outage threshold in dB.
    #[arg(long = "gamma-th-db", action = clap::ArgAction::Append, allow_negative_numbers = true)]
    pub gamma_th_db: Vec<f64>,
    /// Moment or MGF derivative order.
    #[arg(long, action = clap::ArgAction::Append)]
    pub order: Vec<f64>,
    /// MGF argument (s < 0).
    #[arg(long, action = clap::ArgAction::Append, allow_negative_numbers = true)]
    pub s: Vec<f64>,
}

impl ParamArgs {
    pub fn fixed(&self) -> Result<FixedParams, SpecError> {
        let mut f = FixedParams::default();
        f.set_all(Param::Alpha, &self.alpha)?;
        f.set_all(Param::Beta, &self.beta)?;
        f.set_all(Param::M, &self.m)?;
        f.set_all(Param::MeanSnrDb, &self.snr_db)?;
        f.set_all(Param::Gamma, &self.gamma)?;
        f.set_all(Param::GammaThDb, &self.gamma_th_db)?;
        f.set_all(Param::N, &self.order)?;
        f.set_all(Param::S, &self.s)?;
        Ok(f)
    }
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Monte-Carlo sample count; enables the mc_value and mc_std_error columns.
    #[arg(long = "mc-samples")]
    pub mc_samples: Option<u64>,
    /// Monte-Carlo seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl McArgs {
    pub fn spec(&self) -> Option<McSpec> {
        self.mc_samples.map(|samples| McSpec { samples, seed: self.seed })
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent or `-`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    fn destination(&self) -> Destination {
        Destination::from(self.out.as_deref())
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Variable to sweep.
    #[arg(long = "var", value_enum)]
    pub var: SweepVar,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Scale::Linear)]
    pub scale: Scale,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long)]
    pub m: f64,
    #[arg(long = "snr-db", allow_negative_numbers = true)]
    pub snr_db: f64,
    #[arg(long = "mc-samples")]
    pub mc_samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Serialize)]
struct EvalEcho {
    quantity: Quantity,
    point: BTreeMap<Param, f64>,
    mc: Option<McSpec>,
}

#[derive(Debug, Serialize)]
struct SimulateEcho {
    alpha: f64,
    beta: f64,
    m: f64,
    mean_snr_db: f64,
    samples: u64,
    seed: u64,
}

fn spec_failure(e: impl std::fmt::Display) -> i32 {
    let _ = writeln!(std::io::stderr(), "{}", serde_json::json!({ "spec_error": e.to_string() }));
    EXIT_SPEC
}

fn io_failure(e: impl std::fmt::Display) -> i32 {
    let _ = writeln!(std::io::stderr(), "error: {e}");
    EXIT_IO
}

fn finish(table: &crate::sweep::Table) -> i32 {
    if table.errors().next().is_none() {
        return 0;
    }
    let _ = writeln!(std::io::stderr(), "{}", error_summary(table));
    EXIT_ROW_ERRORS
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Sweep(a) => {
            let range = SweepRange { start: a.from, stop: a.to, points: a.points, scale: a.scale };
            let spec = match a.params.fixed().and_then(|f| SweepSpec::new(a.quantity, a.var, range, f, a.mc.spec())) {
                Ok(s) => s,
                Err(e) => return spec_failure(e),
            };
            let table = run_sweep(&spec, true);
            if let Err(e) = emit(&table, &spec, a.output.format, &a.output.destination()) {
                return io_failure(e);
            }
            finish(&table)
        }
        Command::Eval(a) => {
            let mc = a.mc.spec();
            let fixed = match a.params.fixed() {
                Ok(f) => f.into_map(),
                Err(e) => return spec_failure(e),
            };
            if let Err(e) = check_coverage(a.quantity, None, &fixed, mc) {
                return spec_failure(e);
            }
            let point = Point { values: fixed };
            let table = run_point(a.quantity, &point, mc);
            let echo = EvalEcho { quantity: a.quantity, point: point.values.clone(), mc };
            if let Err(e) = emit(&table, &echo, a.output.format, &a.output.destination()) {
                return io_failure(e);
            }
            finish(&table)
        }
        Command::Simulate(a) => {
            let p = match fsosf::ModelParams::with_snr_db(a.alpha, a.beta, a.m, a.snr_db) {
                Ok(p) => p,
                Err(e) => return spec_failure(e),
            };
            let samples = match sample_snr(&p, a.mc_samples, a.seed) {
                Ok(s) => s,
                Err(e) => return spec_failure(e),
            };
            let echo = SimulateEcho {
                alpha: a.alpha,
                beta: a.beta,
                m: a.m,
                mean_snr_db: a.snr_db,
                samples: a.mc_samples,
                seed: a.seed,
            };
            match emit_samples(&samples, &echo, a.output.format, &a.output.destination()) {
                Ok(()) => 0,
                Err(e) => io_failure(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn repeated_flag_is_a_spec_error() {
        let cli = Cli::try_parse_from([
            "fsosf", "eval", "--quantity", "pdf", "--alpha", "0.1", "--beta", "0.7", "--beta", "0.5",
            "--m", "4", "--snr-db", "3", "--gamma", "1",
        ])
        .unwrap();
        let Command::Eval(a) = cli.command else { panic!() };
        assert_eq!(a.params.fixed().unwrap_err(), SpecError::Duplicate("beta".into()));
    }

    #[test]
    fn negative_s_parses() {
        let cli = Cli::try_parse_from([
            "fsosf", "eval", "--quantity", "gmgf", "--alpha", "0.1", "--beta", "0.7", "--m", "4",
            "--snr-db", "0", "--order", "1", "--s", "-0.5",
        ])
        .unwrap();
        let Command::Eval(a) = cli.command else { panic!() };
        assert_eq!(a.params.s, [-0.5]);
    }
}
