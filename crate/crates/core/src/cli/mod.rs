//! Command-line front end: `eval`, `table` and `verify`.
//!
//! Exit codes: 0 when everything passed, 1 when a verification check
//! failed, 2 for usage and domain errors, 3 when a series, product or lattice
//! sum did not converge or a value overflowed.
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod report;
pub mod suites;
pub mod table;

pub use report::{CheckRecord, RunReport};
pub use suites::{explicit_polynomial, run_suite, Suite, SuiteParams};
pub use table::{Format, Table, TableKind};

use crate::config::{Precision, QParameter, TruncationConfig};
use crate::dd::DoubleDouble;
use crate::error::{QError, Result};
use crate::hermite::{hermite_eval, EvalMethod};
use crate::oscillator::Parity;
use crate::real::{lit, Real};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Exit code for an error raised by the numerical routines.
pub fn exit_code(e: &QError) -> i32 {
    match e {
        QError::Domain(_) => EXIT_USAGE,
        QError::Convergence { .. } | QError::Overflow { .. } => EXIT_NUMERIC,
    }
}

/// A number given on the command line, kept as text so that double-double
/// runs can read it at full accuracy.
#[derive(Clone, Debug, PartialEq)]
pub struct Decimal {
    text: String,
    value: f64,
}

impl Decimal {
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn get<S: Real>(&self) -> S {
        S::parse_decimal(&self.text).unwrap_or_else(|| lit(self.value))
    }
}

impl std::str::FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let value: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
        Ok(Self {
            text: s.trim().to_string(),
            value,
        })
    }
}

impl From<f64> for Decimal {
    fn from(value: f64) -> Self {
        Self {
            text: value.to_string(),
            value,
        }
    }
}

impl std::fmt::Display for Decimal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Parser)]
#[command(name = "qhermite", version, about = "Discrete q-Hermite polynomials and the q-oscillator lattice")]
pub struct Cli {
    /// Significant decimal digits: up to 16 runs in double precision, up
    /// to 31 in double-double.
    #[arg(long, global = true, env = "QHERMITE_PRECISION", default_value_t = 16)]
    pub precision: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate H_n(xi) by both methods.
    Eval(EvalArgs),
    /// Emit a measure, polynomial or moment table.
    Table(TableArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Recursion,
    ClosedForm,
}

impl From<Method> for EvalMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Recursion => EvalMethod::Recursion,
            Method::ClosedForm => EvalMethod::ClosedForm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalFormat {
    /// The value alone.
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub q: Decimal,
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Decimal,
    #[arg(long, value_enum, default_value_t = Method::Recursion)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = EvalFormat::Text)]
    pub format: EvalFormat,
}

#[derive(Debug, Args)]
pub struct TruncationArgs {
    #[arg(long, default_value = "1.3")]
    pub q: Decimal,
    #[arg(long, default_value_t = 60)]
    pub cutoff: i64,
    #[arg(long, default_value_t = 1e-12)]
    pub series_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_terms: usize,
    /// Highest polynomial degree; moment tables and suites run to twice it.
    #[arg(long, default_value_t = 6)]
    pub nmax: u32,
}

impl TruncationArgs {
    fn config(&self, precision: u32) -> Result<TruncationConfig> {
        TruncationConfig::new(self.series_tol, self.max_terms, self.cutoff)?
            .with_precision_digits(precision)
    }

    fn echo(&self) -> String {
        format!(
            "--q {} --cutoff {} --series-tol {:e} --max-terms {} --nmax {}",
            self.q, self.cutoff, self.series_tol, self.max_terms, self.nmax
        )
    }
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub what: TableKind,
    /// Ground-state label for measure tables.
    #[arg(long, default_value_t = 0)]
    pub r: u8,
    #[command(flatten)]
    pub trunc: TruncationArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[command(flatten)]
    pub trunc: TruncationArgs,
    /// Threshold applied to every check instead of the built-in ones.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = Precision::from_digits(cli.precision).and_then(|precision| match &cli.command {
        Command::Eval(a) => match precision {
            Precision::Double => cmd_eval::<f64>(a, out),
            Precision::DoubleDouble => cmd_eval::<DoubleDouble>(a, out),
        },
        Command::Table(a) => match precision {
            Precision::Double => cmd_table::<f64>(a, cli.precision, out),
            Precision::DoubleDouble => cmd_table::<DoubleDouble>(a, cli.precision, out),
        },
        Command::Verify(a) => match precision {
            Precision::Double => cmd_verify::<f64>(a, cli.precision, out),
            Precision::DoubleDouble => cmd_verify::<DoubleDouble>(a, cli.precision, out),
        },
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[derive(Serialize)]
struct EvalRecord {
    n: u32,
    q: table::Cell,
    xi: table::Cell,
    method: &'static str,
    value: table::Cell,
    recursion: table::Cell,
    closed_form: table::Cell,
    /// `|recursion - closed form| / max(1, |value|)`.
    discrepancy: table::Cell,
}

fn cmd_eval<S: Real>(a: &EvalArgs, out: &mut dyn Write) -> Result<i32> {
    let qp = QParameter::<S>::new(a.q.get())?;
    let xi: S = a.xi.get();
    if !xi.is_finite() {
        return Err(QError::domain(format!("xi must be finite (got {})", a.xi)));
    }
    let rec = hermite_eval(a.n, xi, &qp, EvalMethod::Recursion)?;
    let closed = hermite_eval(a.n, xi, &qp, EvalMethod::ClosedForm)?;
    let value = match a.method {
        Method::Recursion => rec,
        Method::ClosedForm => closed,
    };
    let io = |e: std::io::Error| QError::domain(format!("cannot write output: {e}"));
    match a.format {
        EvalFormat::Text => writeln!(out, "{}", value.to_sci()).map_err(io)?,
        EvalFormat::Json => {
            let rec_out = EvalRecord {
                n: a.n,
                q: table::Cell::num(qp.q()),
                xi: table::Cell::num(xi),
                method: match a.method {
                    Method::Recursion => "recursion",
                    Method::ClosedForm => "closed-form",
                },
                value: table::Cell::num(value),
                recursion: table::Cell::num(rec),
                closed_form: table::Cell::num(closed),
                discrepancy: table::Cell::num((rec - closed).abs() / value.abs().max(S::one())),
            };
            let text = serde_json::to_string_pretty(&rec_out).expect("record serializes");
            writeln!(out, "{text}").map_err(io)?;
        }
    }
    Ok(EXIT_PASS)
}

fn cmd_table<S: Real>(a: &TableArgs, precision: u32, out: &mut dyn Write) -> Result<i32> {
    let cfg = a.trunc.config(precision)?;
    let qp = QParameter::<S>::new(a.trunc.q.get())?;
    let table = match a.what {
        TableKind::Measure => table::measure_table(Parity::from_r(a.r)?, qp, cfg),
        TableKind::Polynomial => table::polynomial_table(a.trunc.nmax, qp),
        TableKind::Moments => table::moments_table(a.trunc.nmax, qp, cfg),
    };
    let io = |e: std::io::Error| QError::domain(format!("cannot write table: {e}"));
    match &a.output {
        Some(path) => {
            let mut f = std::fs::File::create(path).map_err(io)?;
            table.write(a.format, &mut f).map_err(io)?;
        }
        None => table.write(a.format, out).map_err(io)?,
    }
    Ok(match &table.error {
        None => EXIT_PASS,
        Some(e) => exit_code(e),
    })
}

fn cmd_verify<S: Real>(a: &VerifyArgs, precision: u32, out: &mut dyn Write) -> Result<i32> {
    let start = Instant::now();
    let cfg = a.trunc.config(precision)?;
    if let Some(t) = a.tol {
        if t.is_nan() || t < 0.0 {
            return Err(QError::domain(format!("--tol must be non-negative (got {t})")));
        }
    }
    let params = SuiteParams {
        q: a.trunc.q.clone(),
        cfg,
        nmax: a.trunc.nmax,
        tol: a.tol,
    };
    let checks = run_suite::<S>(a.suite, &params)?;
    let suite = a.suite.to_possible_value().expect("named suite");
    let mut command = format!("verify --suite {} {}", suite.get_name(), a.trunc.echo());
    if let Some(t) = a.tol {
        command.push_str(&format!(" --tol {t:e}"));
    }
    let report = RunReport::new(
        command,
        a.trunc.q.value(),
        cfg,
        checks,
        start.elapsed().as_secs_f64(),
    );
    writeln!(out, "{}", report.to_json())
        .map_err(|e| QError::domain(format!("cannot write report: {e}")))?;
    Ok(if report.checks.iter().any(|c| c.error.is_some()) {
        EXIT_NUMERIC
    } else if report.pass {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    })
}
