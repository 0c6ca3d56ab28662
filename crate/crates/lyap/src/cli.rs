//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::{self, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lyap_core::model::{Family, Sign};
use lyap_core::Complex64;

use crate::compute::{evaluate, Evaluation, Method, Quantity, Settings};
use crate::model::{parse_ell, Dist, Model};
use crate::row::{Format, RowWriter};
use crate::sweep::{grid, sweep, Axis, Spacing};
use crate::{selftest, Failure};

#[derive(Debug, Parser)]
#[command(name = "lyap", version, about = "Lyapunov exponents of products of random SL(2,R) matrices")]
pub struct Cli {
    /// Worker threads for sweeps and Monte Carlo replicas (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Growth rate gamma.
    Gamma(EvalArgs),
    /// Variance sigma2 of the log-norm per step.
    Sigma2(EvalArgs),
    /// Generalised Lyapunov exponent Lambda(2l).
    Gle(EvalArgs),
    /// gamma and sigma2 along a grid of one parameter.
    Sweep(SweepArgs),
    /// Monte Carlo estimates only.
    Mc(McArgs),
    /// Runs the acceptance battery and prints a pass/fail table.
    Selftest(SelftestArgs),
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::ALL
        .into_iter()
        .find(|f| f.name() == s)
        .ok_or_else(|| format!("unknown family `{s}`; expected one of k-nplus, nminus-k, nminus-nplus, nminus-a1"))
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "+" | "plus" => Ok(Sign::Plus),
        "-" | "minus" => Ok(Sign::Minus),
        _ => Err(format!("sign must be + or -, got `{s}`")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// k-nplus, nminus-k, nminus-nplus or nminus-a1.
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    /// Law of t: exp:<p>, gamma:<k>,<theta> or dirac:<t0>.
    #[arg(long, value_parser = clap::value_parser!(Dist))]
    pub dist: Dist,
    /// Rate of the exponential law of tau.
    #[arg(long)]
    pub rho: f64,
    /// Sign of the diagonal parameter for nminus-a1.
    #[arg(long, value_parser = parse_sign, default_value = "+", allow_hyphen_values = true)]
    pub sign: Sign,
}

impl ModelArgs {
    pub fn model(&self) -> Model {
        Model { family: self.family, dist: self.dist, rho: self.rho, sign: self.sign }
    }
}

#[derive(Debug, Clone, Args)]
pub struct McSettings {
    /// Steps per Monte Carlo product.
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    /// Independent products, or walkers for the generalised exponent.
    #[arg(long, default_value_t = 400)]
    pub replicas: usize,
    #[arg(long, env = "LYAP_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// l as re or re,im.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub ell: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: Method,
    /// Accuracy target of the perturbative solvers.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub mc: McSettings,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "inv-rho")]
    pub axis: Axis,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "lin")]
    pub spacing: Spacing,
    /// Adds Monte Carlo columns at this many evenly spaced points.
    #[arg(long, default_value_t = 0)]
    pub mc_check: usize,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub mc: McSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McStat {
    Gamma,
    Sigma2,
    Gle,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub stat: McStat,
    /// l for the generalised exponent.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub ell: String,
    #[command(flatten)]
    pub mc: McSettings,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Runs only criteria whose number, title or keywords match.
    #[arg(long)]
    pub filter: Option<String>,
}

fn settings(tol: Option<f64>, mc: &McSettings) -> Result<Settings, Failure> {
    if let Some(t) = tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(Failure::invalid("--tol must lie in (0, 1)"));
        }
    }
    Ok(Settings { tol, steps: mc.steps, replicas: mc.replicas, seed: mc.seed })
}

fn ell(text: &str) -> Result<Complex64, Failure> {
    parse_ell(text).map_err(Failure::Invalid)
}

/// What a subcommand produced: an exit code, or an I/O error on output.
type Exit = io::Result<i32>;

fn report(failure: &Failure) -> i32 {
    eprintln!("lyap: {failure}");
    failure.exit_code()
}

fn emit(format: Format, evaluations: &[Evaluation], out: &mut dyn Write) -> Exit {
    let mut w = RowWriter::new(out, format, false)?;
    for e in evaluations {
        w.write(&e.row, None)?;
    }
    w.finish()?;
    Ok(evaluations.iter().find_map(|e| e.failure.as_ref()).map(report).unwrap_or(0))
}

fn single(quantity: Quantity, args: &EvalArgs, format: Format, out: &mut dyn Write) -> Exit {
    let prepared = (|| {
        let model = args.model.model();
        model.validate()?;
        Ok::<_, Failure>((model, ell(&args.ell)?, settings(args.tol, &args.mc)?))
    })();
    let (model, l, s) = match prepared {
        Ok(v) => v,
        Err(f) => return Ok(report(&f)),
    };
    let e = evaluate(quantity, &model, l, args.method, &s);
    emit(format, &[e], out)
}

fn run_sweep(args: &SweepArgs, format: Format, out: &mut dyn Write) -> Exit {
    let prepared = (|| {
        let model = args.model.model();
        model.validate()?;
        let xs = grid(args.from, args.to, args.points, args.spacing)?;
        let s = settings(args.tol, &args.mc)?;
        if args.mc_check > 0 {
            lyap_core::montecarlo::validate_sizes(lyap_core::montecarlo::Statistic::Sigma2, s.steps, s.replicas)?;
        }
        Ok::<_, Failure>((model, xs, s))
    })();
    let (model, xs, s) = match prepared {
        Ok(v) => v,
        Err(f) => return Ok(report(&f)),
    };
    let points = sweep(&model, args.axis, &xs, Complex64::new(1.0, 0.0), args.mc_check, &s);
    let mut w = RowWriter::new(out, format, args.mc_check > 0)?;
    for (i, pt) in points.iter().enumerate() {
        if let Some(f) = &pt.failure {
            eprintln!("lyap: point {i}: {f}");
        }
        w.write(&pt.row, pt.mc.as_ref())?;
    }
    w.finish()?;
    Ok(0)
}

fn run_mc(args: &McArgs, format: Format, out: &mut dyn Write) -> Exit {
    let prepared = (|| {
        let model = args.model.model();
        model.validate()?;
        Ok::<_, Failure>((model, ell(&args.ell)?, settings(None, &args.mc)?))
    })();
    let (model, l, s) = match prepared {
        Ok(v) => v,
        Err(f) => return Ok(report(&f)),
    };
    let quantities: &[Quantity] = match args.stat {
        McStat::Gamma => &[Quantity::Gamma],
        McStat::Sigma2 => &[Quantity::Sigma2],
        McStat::Gle => &[Quantity::Gle],
        McStat::All => &[Quantity::Gamma, Quantity::Sigma2, Quantity::Gle],
    };
    let rows: Vec<Evaluation> = quantities.iter().map(|&q| evaluate(q, &model, l, Method::Mc, &s)).collect();
    emit(format, &rows, out)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Exit {
    match &cli.command {
        Command::Gamma(a) => single(Quantity::Gamma, a, cli.format, out),
        Command::Sigma2(a) => single(Quantity::Sigma2, a, cli.format, out),
        Command::Gle(a) => single(Quantity::Gle, a, cli.format, out),
        Command::Sweep(a) => run_sweep(a, cli.format, out),
        Command::Mc(a) => run_mc(a, cli.format, out),
        Command::Selftest(a) => Ok(if selftest::run(a.filter.as_deref(), out)? { 0 } else { 1 }),
    }
}

/// Parses `args` (including the program name), runs the command with rows
/// on `out`, and returns the process exit code.
pub fn run_from<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return report(&Failure::invalid("--threads must be positive"));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("lyap: output error: {e}");
            1
        }
    }
}
