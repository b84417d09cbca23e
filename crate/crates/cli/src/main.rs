//! `deltakit` command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a bound or tolerance
//! fails, 2 on invalid configuration.

mod certify;
mod figures;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deltakit::pairing::{
    extrapolate_limit, pair_delta_r, pair_lorentz, ExtrapolationMode, PairingResult,
};
use deltakit::{Interval, TestFunction};
use serde_json::{json, Value};

use crate::certify::Certificate;

#[derive(Parser, Debug)]
#[command(
    name = "deltakit",
    version,
    about = "Numerical toolkit for nascent Dirac delta families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pair a regularized delta with a bump and extrapolate the limit.
    Pair(PairArgs),
    /// Run a named numerical certificate.
    Certify(CertifyArgs),
    /// Emit the dataset behind one of the figures.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Fourier,
    Lorentz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    InverseParam,
    LogCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Comma-separated list of reals.
#[derive(Debug, Clone)]
pub struct NumList(pub Vec<f64>);

fn parse_list(s: &str) -> Result<NumList, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("invalid number {t:?}: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(NumList(v))
            } else {
                Err("values must be finite".to_string())
            }
        })
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Interval as `lo,hi`.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    interval: Option<NumList>,
    /// Grid points per interval.
    #[arg(long, default_value_t = 2001)]
    grid: usize,
    /// Verdict tolerance (each command has its own default).
    #[arg(long)]
    tol: Option<f64>,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long, value_enum, default_value_t = Family::Fourier)]
    family: Family,
    /// `R` values (fourier) or `ε` values (lorentz).
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    params: Option<NumList>,
    /// Bump knots `α,β,γ,δ`.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "-2,-1,1,2")]
    bump: NumList,
    /// Translate the test function by `x0`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    shift: f64,
    /// Extrapolation model. `inverse-param` fits `L + c/R` for the sinc
    /// kernel and `L + c·ε` for the Lorentzian; `log-corrected` fits
    /// `L + c·ε·ln(1/ε)` (Lorentzian only).
    #[arg(long, value_enum, default_value_t = Mode::InverseParam)]
    mode: Mode,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(value_enum)]
    name: Certificate,
    /// Certificate parameters; their meaning depends on the certificate.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    params: Option<NumList>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9))]
    fig: u8,
    #[command(flatten)]
    common: Common,
}

/// Failure modes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(std::io::Error),
}

impl From<deltakit::Error> for CliError {
    fn from(e: deltakit::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Resolved settings shared by every command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub interval: Option<Interval>,
    pub grid: usize,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Settings {
    fn from_common(c: &Common) -> Result<Self, CliError> {
        if c.grid < 2 {
            return Err(CliError::Config(format!(
                "--grid must be at least 2, got {}",
                c.grid
            )));
        }
        if let Some(t) = c.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("--tol must be positive, got {t}")));
            }
        }
        let interval = match &c.interval {
            None => None,
            Some(NumList(v)) if v.len() == 2 => Some(Interval::new(v[0], v[1])?),
            Some(NumList(v)) => {
                return Err(CliError::Config(format!(
                    "--interval needs two values, got {}",
                    v.len()
                )))
            }
        };
        Ok(Self {
            interval,
            grid: c.grid,
            tol: c.tol,
            out: c.out.clone(),
            format: c.format,
        })
    }

    pub fn interval_or(&self, lo: f64, hi: f64) -> Interval {
        self.interval
            .unwrap_or_else(|| Interval::new(lo, hi).expect("valid default interval"))
    }

    pub fn echo(&self) -> Value {
        json!({
            "interval": self.interval.map(|i| [i.lo(), i.hi()]),
            "grid": self.grid,
            "tolerance": self.tol,
        })
    }
}

/// A finished command: its report and whether every check passed.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub results: Vec<Value>,
    pub passed: bool,
}

impl Report {
    fn to_json(&self) -> String {
        let body = json!({
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "verdict": if self.passed { "pass" } else { "fail" },
        });
        serde_json::to_string_pretty(&body).expect("report serializes") + "\n"
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_rows<'a>(rows: impl IntoIterator<Item = (f64, f64, &'a str)>) -> String {
    let mut s = String::from("x,value,series\n");
    for (x, v, series) in rows {
        writeln!(s, "{},{},{}", fmt_float(x), fmt_float(v), series).expect("write to string");
    }
    s
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(CliError::Io),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
            {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e)),
                _ => Ok(()),
            }
        }
    }
}

fn zip_params(params: &[f64], pairings: &[PairingResult]) -> Vec<(f64, f64)> {
    params
        .iter()
        .zip(pairings)
        .map(|(&p, r)| (p, r.value))
        .collect()
}

fn run_pair(args: &PairArgs, settings: &Settings) -> Result<(Report, Option<String>), CliError> {
    let knots = &args.bump.0;
    if knots.len() != 4 {
        return Err(CliError::Config(format!(
            "--bump needs four knots, got {}",
            knots.len()
        )));
    }
    let f = TestFunction::bump(knots[0], knots[1], knots[2], knots[3])?.shifted(args.shift)?;
    let params = match (&args.params, args.family) {
        (Some(NumList(p)), _) => p.clone(),
        (None, Family::Fourier) => vec![100.0, 200.0, 400.0, 800.0],
        (None, Family::Lorentz) => vec![1e-1, 1e-2, 1e-3, 1e-4],
    };
    if params.len() < 3 {
        return Err(CliError::Config(
            "--params needs at least three values to extrapolate".into(),
        ));
    }
    let tol = settings.tol.unwrap_or(1e-3);
    let f0 = f.eval(0.0);
    let mut pairings = Vec::with_capacity(params.len());
    for &p in &params {
        let r = match args.family {
            Family::Fourier => pair_delta_r(p, &f)?,
            Family::Lorentz => pair_lorentz(p, &f)?,
        };
        pairings.push(r);
    }
    // Lorentz samples are fitted in n = 1/ε under the inverse model.
    let (mode, samples): (ExtrapolationMode, Vec<(f64, f64)>) = match (args.family, args.mode) {
        (Family::Fourier, Mode::InverseParam) => (
            ExtrapolationMode::InverseParam,
            zip_params(&params, &pairings),
        ),
        (Family::Lorentz, Mode::InverseParam) => {
            let inverted: Vec<f64> = params.iter().map(|e| 1.0 / e).collect();
            (
                ExtrapolationMode::InverseParam,
                zip_params(&inverted, &pairings),
            )
        }
        (Family::Lorentz, Mode::LogCorrected) => (
            ExtrapolationMode::LogCorrected,
            zip_params(&params, &pairings),
        ),
        (Family::Fourier, Mode::LogCorrected) => {
            return Err(CliError::Config(
                "--mode log-corrected applies to the lorentz family only".into(),
            ))
        }
    };
    let limit = extrapolate_limit(&samples, mode)?;
    let error = (limit - f0).abs();
    let passed = error <= tol;

    let mut results: Vec<Value> = pairings
        .iter()
        .map(|r| serde_json::to_value(r).expect("pairing serializes"))
        .collect();
    results.push(json!({
        "extrapolated_limit": limit,
        "f_at_origin": f0,
        "abs_error": error,
        "mode": mode,
    }));
    let family = match args.family {
        Family::Fourier => "fourier",
        Family::Lorentz => "lorentz",
    };
    let mut config = settings.echo();
    config["family"] = json!(family);
    config["params"] = json!(params);
    config["bump"] = json!(knots);
    config["shift"] = json!(args.shift);
    config["tolerance"] = json!(tol);

    let csv = (settings.format == Some(Format::Csv)).then(|| {
        let label = format!("pair_{family}");
        let mut rows: Vec<(f64, f64, &str)> = zip_params(&params, &pairings)
            .into_iter()
            .map(|(p, v)| (p, v, label.as_str()))
            .collect();
        rows.push((0.0, limit, "limit"));
        csv_rows(rows)
    });
    Ok((
        Report {
            command: "pair",
            config,
            results,
            passed,
        },
        csv,
    ))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("DELTAKIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "DELTAKIT_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Pair(args) => {
            let settings = Settings::from_common(&args.common)?;
            let (report, csv) = run_pair(args, &settings)?;
            let text = csv.unwrap_or_else(|| report.to_json());
            emit(&text, settings.out.as_ref())?;
            Ok(report.passed)
        }
        Command::Certify(args) => {
            let settings = Settings::from_common(&args.common)?;
            if settings.format == Some(Format::Csv) {
                return Err(CliError::Config("certify reports are JSON only".into()));
            }
            let params = args.params.as_ref().map(|p| p.0.as_slice()).unwrap_or(&[]);
            let report = certify::run(args.name, params, &settings)?;
            emit(&report.to_json(), settings.out.as_ref())?;
            Ok(report.passed)
        }
        Command::Figure(args) => {
            let settings = Settings::from_common(&args.common)?;
            let rows = figures::dataset(args.fig, &settings)?;
            let text = match settings.format.unwrap_or(Format::Csv) {
                Format::Csv => csv_rows(rows.iter().map(|r| (r.x, r.value, r.series.as_str()))),
                Format::Json => {
                    let results: Vec<Value> = rows
                        .iter()
                        .map(|r| json!({"x": r.x, "value": r.value, "series": r.series}))
                        .collect();
                    let mut config = settings.echo();
                    config["fig"] = json!(args.fig);
                    Report {
                        command: "figure",
                        config,
                        results,
                        passed: true,
                    }
                    .to_json()
                }
            };
            emit(&text, settings.out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Config(msg)) => {
            eprintln!("deltakit: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("deltakit: cannot write output: {e}");
            ExitCode::from(2)
        }
    }
}
