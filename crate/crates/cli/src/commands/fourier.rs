use std::f64::consts::PI;

use clap::{Args, ValueEnum};
use fieldkernel_core::spectra::{fourier_coeffs, FourierSeries};
use fieldkernel_core::Complex64;

use super::{linspace, require};
use crate::{checks_report, Check, CliResult, CommonArgs, Report, Table};

/// Wilbraham-Gibbs limit `(2/pi) Si(pi)` of the square-wave overshoot.
const GIBBS_PEAK: f64 = 1.178_979_744_472_167_3;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Wave {
    /// +1 on the first half period, -1 on the second.
    Square,
    /// `x/L - 1/2` on one period.
    Sawtooth,
}

#[derive(Debug, Clone, Args)]
pub struct FourierArgs {
    #[arg(long, value_enum, default_value_t = Wave::Square)]
    pub wave: Wave,
    /// Period.
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    /// Truncation orders N of the partial sums, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "20,50")]
    pub terms: Vec<usize>,
    /// Number of sample points on one period.
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

fn profile(wave: Wave, length: f64) -> (impl Fn(f64) -> Complex64 + Sync, Vec<f64>) {
    let f = move |x: f64| {
        let v = match wave {
            Wave::Square => {
                if x < length / 2.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Wave::Sawtooth => x / length - 0.5,
        };
        Complex64::new(v, 0.0)
    };
    let breaks = match wave {
        Wave::Square => vec![length / 2.0],
        Wave::Sawtooth => vec![],
    };
    (f, breaks)
}

fn series(wave: Wave, length: f64, nmax: usize, tol: f64) -> CliResult<FourierSeries> {
    let (f, breaks) = profile(wave, length);
    Ok(fourier_coeffs(f, length, nmax, &breaks, tol)?)
}

pub fn run(a: &FourierArgs, common: &CommonArgs) -> CliResult<Report> {
    require(a.length > 0.0, "--length must be positive")?;
    require(!a.terms.is_empty(), "--terms needs at least one order")?;
    let nmax = *a.terms.iter().max().unwrap_or(&0);
    let s = series(a.wave, a.length, nmax, common.tol)?;
    let (f, _) = profile(a.wave, a.length);
    let mut cols = vec!["x".to_string(), "f".to_string()];
    cols.extend(a.terms.iter().map(|n| format!("partial_{n}")));
    let mut table = Table::new(cols);
    for x in linspace(0.0, a.length, a.points) {
        // sample the periodic extension at the right end
        let mut row = vec![x.into(), f(x % a.length).re.into()];
        row.extend(a.terms.iter().map(|&n| s.partial_sum(x, n).re.into()));
        table.push(row)?;
    }
    Ok(Report::new(table).with_meta("suspected_discontinuity", s.suspected_discontinuity))
}

/// Largest `f_N(x)` just right of the square-wave jump at 0.
fn gibbs_peak(s: &FourierSeries, n: usize) -> f64 {
    let width = 2.0 * s.length / n as f64;
    linspace(0.0, width, 4001).into_iter().map(|x| s.partial_sum(x, n).re).fold(f64::NEG_INFINITY, f64::max)
}

pub fn self_test() -> CliResult<Report> {
    let mut checks = Vec::new();
    let s = series(Wave::Square, 1.0, 200, 1e-12)?;
    let mut worst = 0.0f64;
    for n in [1i64, 3, 5, 7, 9, 11, 51] {
        let want = Complex64::new(0.0, -2.0 / (PI * n as f64));
        worst = worst.max((s.coeff(n) - want).norm()).max(s.coeff(n + 1).norm());
    }
    checks.push(Check::abs("square C_n = 2/(i pi n), odd n only", worst, 0.0, 1e-10));
    checks.push(Check::abs("square C_0", s.coeff(0).norm(), 0.0, 1e-12));
    checks.push(Check::abs("Gibbs peak N=200", gibbs_peak(&s, 200), GIBBS_PEAK, 1e-3));
    let saw = series(Wave::Sawtooth, 2.0, 20, 1e-12)?;
    checks.push(Check::abs("sawtooth C_7 = i/(2 pi 7)", (saw.coeff(7) - Complex64::new(0.0, 1.0 / (14.0 * PI))).norm(), 0.0, 1e-10));
    checks.push(Check::abs("partial sum at a jump is the midpoint", s.partial_sum(0.5, 50).re, 0.0, 1e-10));
    checks_report(checks)
}
