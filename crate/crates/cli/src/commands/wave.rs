use clap::Args;
use fieldkernel_core::wave::{causal_green, freq_green_4d, freq_green_modesum, kirchhoff_evolve_4d, reduce_dimension, Orientation, PeriodicWave2d};
use fieldkernel_core::Complex64;

use super::require;
use crate::{checks_report, Cell, Check, CliResult, CommonArgs, Report, Table};

#[derive(Debug, Clone, Args)]
pub struct WaveArgs {
    /// Spacetime dimension.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Time lag t - t'.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub dt: f64,
    /// Spatial distances (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0.0,0.25,0.5,0.75,1.5")]
    pub r: Vec<f64>,
    /// Advanced instead of retarded kernel.
    #[arg(long)]
    pub advanced: bool,
    /// Integrate the kernel along a transverse line and compare with dim - 1.
    #[arg(long, conflicts_with = "omega")]
    pub reduce: bool,
    /// Frequency-space kernel in 3+1 dimensions at this angular frequency.
    #[arg(long)]
    pub omega: Option<f64>,
}

pub fn run(a: &WaveArgs, _: &CommonArgs) -> CliResult<Report> {
    require(a.r.iter().all(|&r| r >= 0.0), "--r must be non-negative")?;
    let orientation = if a.advanced { Orientation::Advanced } else { Orientation::Retarded };
    if let Some(omega) = a.omega {
        let mut table = Table::new(["omega", "r", "re", "im", "modesum_re", "modesum_im"]);
        for &r in &a.r {
            let g = freq_green_4d(omega, r)?;
            // x on the z-axis at r/3, x' on the opposite side at 2r/3
            let m = if omega > 0.0 { freq_green_modesum(omega, [0.0, 0.0, r / 3.0], [0.0, 0.0, -2.0 * r / 3.0], 40)? } else { g };
            table.push(vec![omega.into(), r.into(), g.re.into(), g.im.into(), m.re.into(), m.im.into()])?;
        }
        return Ok(Report::new(table));
    }
    let kernel = causal_green(a.dim, orientation)?;
    if a.reduce {
        require(a.dim >= 3, "--reduce needs --dim >= 3")?;
        let lower = causal_green(a.dim - 1, orientation)?;
        let mut table = Table::new(["dim", "dt", "rho", "reduced", "lower_dim"]);
        for &r in &a.r {
            let red = reduce_dimension(&kernel, a.dt, r)?;
            let direct = lower.eval(a.dt, r).map(Cell::from).unwrap_or(Cell::Null);
            table.push(vec![a.dim.into(), a.dt.into(), r.into(), red.into(), direct])?;
        }
        return Ok(Report::new(table));
    }
    let mut table = Table::new(["dim", "dt", "r", "sigma", "value"]);
    for &r in &a.r {
        let sigma = 0.5 * (a.dt * a.dt - r * r);
        // light-cone singularities are reported as null rather than aborting the table
        let value = kernel.eval(a.dt, r).map(Cell::from).unwrap_or(Cell::Null);
        table.push(vec![a.dim.into(), a.dt.into(), r.into(), sigma.into(), value])?;
    }
    Ok(Report::new(table).with_meta("lightcone_coefficient", kernel.lightcone_coefficient()))
}

pub fn self_test() -> CliResult<Report> {
    let mut checks = Vec::new();
    let g2 = causal_green(2, Orientation::Retarded)?;
    checks.push(Check::abs("d=2 interior value", g2.eval(1.0, 0.3)?, 0.5, 0.0));
    checks.push(Check::abs("d=2 outside the cone", g2.eval(0.3, 1.0)?, 0.0, 0.0));
    checks.push(Check::abs("d=2 retarded vanishes in the past", g2.eval(-1.0, 0.3)?, 0.0, 0.0));
    let g3 = causal_green(3, Orientation::Retarded)?;
    checks.push(Check::abs("line reduction of d=3 inside", reduce_dimension(&g3, 1.0, 0.4)?, 0.5, 1e-6));
    checks.push(Check::abs("line reduction of d=3 outside", reduce_dimension(&g3, 0.4, 1.0)?, 0.0, 0.0));
    let k = [1.0, 0.5, -0.3];
    let kk: f64 = k.iter().map(|v| v * v).sum::<f64>().sqrt();
    let phase = move |x: &[f64; 3]| k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
    let psi0 = move |x: &[f64; 3]| Complex64::from_polar(1.0, phase(x));
    let dpsi0 = move |x: &[f64; 3]| Complex64::new(0.0, -kk) * Complex64::from_polar(1.0, phase(x));
    let x = [0.2, -0.4, 0.9];
    let got = kirchhoff_evolve_4d(&psi0, &dpsi0, 0.0, 1.3, x)?;
    let want = Complex64::from_polar(1.0, phase(&x) - kk * 1.3);
    checks.push(Check::abs("Kirchhoff plane wave", (got - want).norm(), 0.0, 1e-6));
    let omega = 1.7;
    let (x, xp): ([f64; 3], [f64; 3]) = ([0.6 / omega, 0.0, 0.8 / omega], [-1.44 / omega, 1.92 / omega, 1.8 / omega]);
    let d = ((x[0] - xp[0]).powi(2) + (x[1] - xp[1]).powi(2) + (x[2] - xp[2]).powi(2)).sqrt();
    let err = (freq_green_modesum(omega, x, xp, 40)? - freq_green_4d(omega, d)?).norm();
    checks.push(Check::abs("frequency mode sum l<=40", err, 0.0, 1e-8));
    checks.push(Check::abs("static limit omega=0", (freq_green_4d(0.0, 2.0)? - Complex64::new(1.0 / (8.0 * std::f64::consts::PI), 0.0)).norm(), 0.0, 1e-17));
    let w = PeriodicWave2d::new(2.0 * std::f64::consts::PI, 16, |x, y| x.sin() * (2.0 * y).cos() + 0.3 * (3.0 * x + y).cos(), |x, y| 0.5 * (x + y).sin())?;
    let e0 = w.energy(0.0);
    let drift = (1..=1000).map(|s| (w.energy(0.01 * s as f64) - e0).abs() / e0).fold(0.0, f64::max);
    checks.push(Check::abs("periodic energy over 1000 steps", drift, 0.0, 1e-10));
    checks_report(checks)
}
