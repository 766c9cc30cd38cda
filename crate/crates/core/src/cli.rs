//! Command-line front end.
//!
//! Every subcommand reads its input from `--input` (or stdin), writes to
//! `--output` (or stdout), and is a pure function of input bytes, flags and
//! seed. Domain failures exit with status 1 and print
//! `ERROR <code>: <message>` on stderr; usage errors exit with status 2.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::document::{from_document, to_document};
use crate::dose_effect::{check_assumptions, optimal_dose, DoseCriteria, DoseEffectModel};
use crate::error::{Error, Result};
use crate::fitting::{FitOptions, Knowledge, RegressionMode};
use crate::pipeline::{fit_model, PipelineOptions, SkewOffset};
use crate::trial_io::{
    curve_points, emit_curve_points, emit_summary, format_exact, parse_csv, parse_summary_csv, render_svg, summarize,
    SummaryRow,
};

#[derive(Debug, Parser)]
#[command(name = "skewdose", version, about = "Skew-normal dose-effect modelling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input file (stdin when omitted).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-dose mean, standard deviation and skewness of raw `dose,value` data.
    Summarize(SummarizeArgs),
    /// Fit a dose-effect model from raw observations or a summary table.
    Fit(FitArgs),
    /// Draw effects at one dose from a fitted model.
    Simulate(SimulateArgs),
    /// Pick a dose on an interval.
    Optimal(OptimalArgs),
    /// Tabulate or draw one model curve.
    Plot(PlotArgs),
    /// Check that the dispersion curve decreases and vanishes.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub io: Io,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeFlag {
    Both,
    L1,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OffsetFlag {
    Zero,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegressionFlag {
    Standard,
    Legacy,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, value_enum, default_value_t = RegimeFlag::None)]
    pub regime: RegimeFlag,
    #[arg(long, allow_negative_numbers = true)]
    pub l1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub l2: Option<f64>,
    #[arg(long, value_enum, default_value_t = OffsetFlag::Grid)]
    pub offset: OffsetFlag,
    #[arg(long, value_enum, default_value_t = RegressionFlag::Standard)]
    pub regression: RegressionFlag,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long)]
    pub dose: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct OptimalArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub interval: Vec<f64>,
    #[arg(long, num_args = 3, value_names = ["WM", "WS", "WG"], allow_negative_numbers = true, conflicts_with = "thresholds")]
    pub weights: Option<Vec<f64>>,
    #[arg(long, num_args = 3, value_names = ["MMIN", "SMAX", "GMIN"], allow_negative_numbers = true)]
    pub thresholds: Option<Vec<f64>>,
    /// Observed summary table reported alongside the model extremes.
    #[arg(long)]
    pub empirical: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveFlag {
    Mean,
    Sd,
    Skewness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatFlag {
    Csv,
    Svg,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, value_enum, default_value_t = CurveFlag::Mean)]
    pub curve: CurveFlag,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 4.0], allow_negative_numbers = true)]
    pub interval: Vec<f64>,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = FormatFlag::Csv)]
    pub format: FormatFlag,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, default_value_t = 20.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command, stdin) {
        Ok((bytes, path)) => match write_output(&bytes, path.as_ref(), stdout) {
            Ok(()) => 0,
            Err(e) => report(stderr, &e),
        },
        Err(e) => report(stderr, &e),
    }
}

fn report(stderr: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(stderr, "ERROR {}: {}", e.code(), e);
    1
}

fn write_output(bytes: &[u8], path: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn read_input(io: &Io, stdin: &mut dyn Read) -> Result<Vec<u8>> {
    match &io.input {
        Some(p) => fs::read(p).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut buf = Vec::new();
            stdin.read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn read_model(io: &Io, stdin: &mut dyn Read) -> Result<DoseEffectModel> {
    let bytes = read_input(io, stdin)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Document { line: 0, reason: e.to_string() })?;
    from_document(text)
}

/// Reads raw `dose,value` data or a summary table, deciding by the header.
pub fn read_rows(bytes: &[u8]) -> Result<Vec<SummaryRow>> {
    let first = bytes.split(|&b| b == b'\n').find(|l| !l.iter().all(u8::is_ascii_whitespace)).unwrap_or(&[]);
    let header = String::from_utf8_lossy(first).to_ascii_lowercase();
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols == ["dose", "value"] {
        summarize(&parse_csv(bytes)?)
    } else {
        parse_summary_csv(bytes)
    }
}

fn execute(cmd: &Command, stdin: &mut dyn Read) -> Result<(Vec<u8>, Option<PathBuf>)> {
    let mut out = Vec::new();
    let path = match cmd {
        Command::Summarize(a) => {
            let rows = summarize(&parse_csv(read_input(&a.io, stdin)?.as_slice())?)?;
            emit_summary(&rows, &mut out)?;
            a.io.output.clone()
        }
        Command::Fit(a) => {
            let rows = read_rows(&read_input(&a.io, stdin)?)?;
            let knowledge = match a.regime {
                RegimeFlag::Both => Knowledge::BothKnown {
                    l1: a.l1.ok_or_else(|| Error::InvalidParameter("--regime both needs --l1 and --l2".into()))?,
                    l2: a.l2.ok_or_else(|| Error::InvalidParameter("--regime both needs --l1 and --l2".into()))?,
                },
                RegimeFlag::L1 => Knowledge::L1Known {
                    l1: a.l1.ok_or_else(|| Error::InvalidParameter("--regime l1 needs --l1".into()))?,
                },
                RegimeFlag::None => Knowledge::NoneKnown,
            };
            let opts = PipelineOptions {
                knowledge,
                fit: FitOptions {
                    regression: match a.regression {
                        RegressionFlag::Standard => RegressionMode::Standard,
                        RegressionFlag::Legacy => RegressionMode::Legacy,
                    },
                    bracket_lo: None,
                },
                skew_offset: match a.offset {
                    OffsetFlag::Zero => SkewOffset::Zero,
                    OffsetFlag::Grid => SkewOffset::default(),
                },
                ..Default::default()
            };
            let fitted = fit_model(&rows, &opts)?;
            out.extend_from_slice(to_document(&fitted.model, &fitted.info()).as_bytes());
            a.io.output.clone()
        }
        Command::Simulate(a) => {
            let model = read_model(&a.io, stdin)?;
            let xs = model.simulate(a.dose, a.n, a.io.seed)?;
            writeln!(out, "dose,value")?;
            for x in xs {
                writeln!(out, "{},{}", format_exact(a.dose), format_exact(x))?;
            }
            a.io.output.clone()
        }
        Command::Optimal(a) => {
            let model = read_model(&a.io, stdin)?;
            let criteria = match (&a.weights, &a.thresholds) {
                (Some(w), _) => DoseCriteria::Scalarized { w_mean: w[0], w_sd: w[1], w_skew: w[2] },
                (None, Some(t)) => DoseCriteria::Admissible { mean_min: t[0], sd_max: t[1], skew_min: t[2] },
                (None, None) => return Err(Error::InvalidParameter("give --weights or --thresholds".into())),
            };
            let interval = match a.interval.as_slice() {
                [lo, hi] => (*lo, *hi),
                _ => return Err(Error::InvalidParameter("--interval LO HI is required".into())),
            };
            let empirical = match &a.empirical {
                Some(p) => Some(read_rows(&fs::read(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)?),
                None => None,
            };
            let r = optimal_dose(&model, interval, criteria, empirical.as_deref())?;
            write_optimal(&mut out, &r, &criteria)?;
            a.io.output.clone()
        }
        Command::Plot(a) => {
            let model = read_model(&a.io, stdin)?;
            let (lo, hi) = (a.interval[0], a.interval[1]);
            if !(lo < hi) || a.steps == 0 {
                return Err(Error::InvalidParameter("need LO < HI and --steps >= 1".into()));
            }
            let (curve, title): (Box<dyn Fn(f64) -> f64>, &str) = match a.curve {
                CurveFlag::Mean => (Box::new(move |d| model.mu_curve.eval(d)), "Mean"),
                CurveFlag::Sd => (Box::new(move |d| model.sigma_curve.eval(d)), "Standard deviation"),
                CurveFlag::Skewness => (Box::new(move |d| model.gamma_curve.eval(d)), "Skewness"),
            };
            let pts = curve_points(curve, lo, hi, a.steps);
            match a.format {
                FormatFlag::Csv => emit_curve_points(&pts, &mut out)?,
                FormatFlag::Svg => out.extend_from_slice(render_svg(&pts, title, "dose", title).as_bytes()),
            }
            a.io.output.clone()
        }
        Command::Check(a) => {
            let model = read_model(&a.io, stdin)?;
            let r = check_assumptions(&model, a.horizon, a.eps)?;
            let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), format_exact);
            writeln!(out, "decreasing_from={}", format_exact(r.decreasing_from))?;
            writeln!(out, "decreasing.passed={}", r.decreasing.passed)?;
            writeln!(out, "decreasing.first_violation={}", opt(r.decreasing.first_violation))?;
            writeln!(out, "sigma_at_horizon={}", format_exact(r.sigma_at_horizon))?;
            writeln!(out, "limit_at_infinity={}", format_exact(r.limit_at_infinity))?;
            writeln!(out, "vanishing.passed={}", r.vanishing.passed)?;
            writeln!(out, "passed={}", r.passed())?;
            a.io.output.clone()
        }
    };
    Ok((out, path))
}

fn write_optimal(out: &mut Vec<u8>, r: &crate::dose_effect::OptimalDose, criteria: &DoseCriteria) -> Result<()> {
    let e = format_exact;
    let rep = &r.report;
    let rat = &r.rationale;
    let mode = match criteria {
        DoseCriteria::Admissible { .. } => "admissible",
        DoseCriteria::Scalarized { .. } => "scalarized",
    };
    writeln!(out, "mode={mode}")?;
    writeln!(out, "dose={}", e(r.dose))?;
    writeln!(out, "mean={}", e(rep.mean))?;
    writeln!(out, "sd={}", e(rep.sd))?;
    writeln!(out, "skewness={}", e(rep.skewness))?;
    writeln!(out, "xi={}", e(rep.skew_params.xi))?;
    writeln!(out, "omega={}", e(rep.skew_params.omega))?;
    writeln!(out, "alpha={}", e(rep.skew_params.alpha))?;
    writeln!(out, "clamped={}", rep.clamped)?;
    if let Some(s) = rat.score {
        writeln!(out, "score={}", e(s))?;
    }
    writeln!(out, "grid_points={}", rat.grid_points)?;
    writeln!(out, "model.sd_min={} at {}", e(rat.sd_min.value), e(rat.sd_min.dose))?;
    writeln!(out, "model.sd_max={} at {}", e(rat.sd_max.value), e(rat.sd_max.dose))?;
    writeln!(out, "model.mean_max={} at {}", e(rat.mean_max.value), e(rat.mean_max.dose))?;
    writeln!(out, "model.skew_max={} at {}", e(rat.skew_max.value), e(rat.skew_max.dose))?;
    if let Some(x) = rat.empirical_sd_min {
        writeln!(out, "empirical.sd_min={} at {}", e(x.value), e(x.dose))?;
    }
    if let Some(x) = rat.empirical_sd_max {
        writeln!(out, "empirical.sd_max={} at {}", e(x.value), e(x.dose))?;
    }
    if let Some(row) = &rat.empirical_at_dose {
        writeln!(out, "empirical.mean={}", e(row.mean_hat))?;
        writeln!(out, "empirical.sd={}", e(row.sd_hat))?;
        writeln!(out, "empirical.skewness={}", e(row.skew_hat))?;
    }
    Ok(())
}

/// Entry point used by the binary.
pub fn main_with_std() -> i32 {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}
