//! `fieldkernel` command-line front end: argument grammar, table output and
//! the per-module self-tests.

pub mod commands;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fieldkernel_core::FieldError;
use serde_json::{json, Map, Value};

pub use table::{emit_table, Cell, Format, Table};

#[derive(Debug, Parser)]
#[command(name = "fieldkernel", version, about = "Green's functions, spectra, diffusion, waves, geometry and asymptotics")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of stdout; metadata goes to `<path>.meta.json`.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Numerical tolerance passed to quadratures and convergence checks.
    #[arg(long, global = true, default_value_t = 1e-8, allow_hyphen_values = true)]
    pub tol: f64,
    /// Run the module's invariant suite instead of a computation.
    #[arg(long, global = true)]
    pub self_test: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Laplacian eigenmodes of boxes, the circle and the sphere.
    Modes(commands::modes::ModesArgs),
    /// Fourier partial sums of a periodic wave.
    Fourier(commands::fourier::FourierArgs),
    /// Static Green's functions.
    Poisson(commands::poisson::PoissonArgs),
    /// Heat kernels, normalization and the proper-time bridge.
    Heat(commands::heat::HeatArgs),
    /// Causal wave kernels in Minkowski spacetime.
    Wave(commands::wave::WaveArgs),
    /// Damped driven oscillator trajectories.
    Sho(commands::sho::ShoArgs),
    /// Christoffel symbols and curvature of built-in metrics.
    Geom(commands::geom::GeomArgs),
    /// Asymptotic series, Laplace's method and JWKB.
    Asympt(commands::asympt::AsymptArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Modes(_) => "modes",
            Command::Fourier(_) => "fourier",
            Command::Poisson(_) => "poisson",
            Command::Heat(_) => "heat",
            Command::Wave(_) => "wave",
            Command::Sho(_) => "sho",
            Command::Geom(_) => "geom",
            Command::Asympt(_) => "asympt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Io(String),
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl CliError {
    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numerical(_) => "numerical",
            CliError::Schema(_) => "schema",
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON error record.
    pub fn record(&self) -> String {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// A computed table plus metadata; `passed` is false when a self-test failed.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub meta: Map<String, Value>,
    pub passed: bool,
}

impl Report {
    pub fn new(table: Table) -> Self {
        Self { table, meta: Map::new(), passed: true }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }
}

/// One self-test comparison; passes when `error <= tol`.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
    pub tol: f64,
}

impl Check {
    pub fn abs(name: &str, value: f64, reference: f64, tol: f64) -> Self {
        Self { name: name.into(), value, reference, error: (value - reference).abs(), tol }
    }

    pub fn rel(name: &str, value: f64, reference: f64, tol: f64) -> Self {
        Self { name: name.into(), value, reference, error: ((value - reference) / reference).abs(), tol }
    }

    /// A check whose `value` must lie in `[lo, hi]`; the error is the distance outside.
    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        let error = if value.is_nan() { f64::NAN } else { (lo - value).max(value - hi).max(0.0) };
        Self { name: name.into(), value, reference: 0.5 * (lo + hi), error, tol: 0.0 }
    }

    /// `value <= bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self { reference: bound, ..Self::within(name, value, f64::NEG_INFINITY, bound) }
    }

    /// `value >= bound`.
    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self { reference: bound, ..Self::within(name, value, bound, f64::INFINITY) }
    }

    pub fn passed(&self) -> bool {
        self.error <= self.tol
    }
}

/// Self-test report: one row per check, failing if any check fails.
pub fn checks_report(checks: Vec<Check>) -> CliResult<Report> {
    let mut table = Table::new(["check", "value", "reference", "error", "tolerance", "pass"]);
    let mut all = true;
    for c in &checks {
        all &= c.passed();
        table.push(vec![c.name.clone().into(), c.value.into(), c.reference.into(), c.error.into(), c.tol.into(), c.passed().into()])?;
    }
    let mut report = Report::new(table).with_meta("self_test", true);
    report.passed = all;
    Ok(report)
}

/// Run the parsed command and return its report.
pub fn execute(cli: &Cli) -> CliResult<Report> {
    let common = &cli.common;
    if !common.tol.is_finite() || common.tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", common.tol)));
    }
    use commands::*;
    let report = match (&cli.command, common.self_test) {
        (Command::Modes(_), true) => modes::self_test()?,
        (Command::Modes(a), false) => modes::run(a, common)?,
        (Command::Fourier(_), true) => fourier::self_test()?,
        (Command::Fourier(a), false) => fourier::run(a, common)?,
        (Command::Poisson(_), true) => poisson::self_test()?,
        (Command::Poisson(a), false) => poisson::run(a, common)?,
        (Command::Heat(_), true) => heat::self_test()?,
        (Command::Heat(a), false) => heat::run(a, common)?,
        (Command::Wave(_), true) => wave::self_test()?,
        (Command::Wave(a), false) => wave::run(a, common)?,
        (Command::Sho(_), true) => sho::self_test()?,
        (Command::Sho(a), false) => sho::run(a, common)?,
        (Command::Geom(_), true) => geom::self_test()?,
        (Command::Geom(a), false) => geom::run(a, common)?,
        (Command::Asympt(_), true) => asympt::self_test()?,
        (Command::Asympt(a), false) => asympt::run(a, common)?,
    };
    Ok(report.with_meta("subcommand", cli.command.name()).with_meta("tol", common.tol))
}

/// Write the table to `--output` (with a metadata sidecar) or to stdout
/// (with metadata as one JSON line on stderr).
pub fn write_report(report: &Report, common: &CommonArgs) -> CliResult<()> {
    use std::io::Write;
    let bytes = emit_table(&report.table, common.format)?;
    let meta = Value::Object(report.meta.clone());
    match &common.output {
        Some(path) => {
            std::fs::write(path, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut side = path.clone().into_os_string();
            side.push(".meta.json");
            let mut m = serde_json::to_vec_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?;
            m.push(b'\n');
            std::fs::write(&side, m).map_err(|e| CliError::Io(e.to_string()))?;
        }
        None => {
            std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string()))?;
            eprintln!("{}", json!({ "meta": meta }));
        }
    }
    Ok(())
}
