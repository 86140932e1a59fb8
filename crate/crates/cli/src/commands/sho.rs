use clap::{Args, ValueEnum};
use fieldkernel_core::fd::{self, Side};
use fieldkernel_core::odegreen::{sho_retarded_green, sho_solve, DampedOscillator};

use super::{linspace, require};
use crate::{checks_report, Check, CliResult, CommonArgs, Report, Table};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Drive {
    /// Free oscillation.
    None,
    /// `exp(-(t/3)^2) sin(2 t)`.
    Windowed,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct ShoArgs {
    /// Damping rate.
    #[arg(long, default_value_t = 0.25)]
    pub gamma: f64,
    /// Natural angular frequency.
    #[arg(long, default_value_t = 1.5)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v0: f64,
    #[arg(long, default_value_t = -10.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t1: f64,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Drive::Windowed)]
    pub drive: Drive,
}

fn windowed(t: f64) -> f64 {
    (-(t / 3.0).powi(2)).exp() * (2.0 * t).sin()
}

fn force(drive: Drive) -> Option<&'static (dyn Fn(f64) -> f64 + Sync)> {
    match drive {
        Drive::None => None,
        Drive::Windowed => Some(&windowed),
    }
}

pub fn run(a: &ShoArgs, _: &CommonArgs) -> CliResult<Report> {
    require(a.t1 >= a.t0, "--t1 must not precede --t0")?;
    require(a.samples >= 1, "--samples must be at least 1")?;
    let osc = DampedOscillator::new(a.gamma, a.omega)?;
    let mut table = Table::new(["t", "x"]);
    for t in linspace(a.t0, a.t1, a.samples) {
        table.push(vec![t.into(), sho_solve(&osc, a.x0, a.v0, a.t0, force(a.drive), t)?.into()])?;
    }
    Ok(Report::new(table))
}

/// Classical RK4 for `x'' + 2 gamma x' + Omega^2 x = f(t)`, sampled every `every` steps.
fn rk4(gamma: f64, omega: f64, f: &dyn Fn(f64) -> f64, start: (f64, f64, f64), span: f64, steps: usize, every: usize) -> Vec<(f64, f64)> {
    let (t0, mut x, mut v) = start;
    let h = span / steps as f64;
    let rhs = |t: f64, x: f64, v: f64| (v, f(t) - 2.0 * gamma * v - omega * omega * x);
    let mut out = vec![(t0, x)];
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let k1 = rhs(t, x, v);
        let k2 = rhs(t + h / 2.0, x + h / 2.0 * k1.0, v + h / 2.0 * k1.1);
        let k3 = rhs(t + h / 2.0, x + h / 2.0 * k2.0, v + h / 2.0 * k2.1);
        let k4 = rhs(t + h, x + h * k3.0, v + h * k3.1);
        x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if (n + 1) % every == 0 {
            out.push((t0 + (n + 1) as f64 * h, x));
        }
    }
    out
}

pub fn self_test() -> CliResult<Report> {
    let mut checks = Vec::new();
    let osc = DampedOscillator::new(0.3, 1.7)?;
    let g = |t: f64| sho_retarded_green(&osc, t);
    let residual = (1..60)
        .map(|k| {
            let tau = 0.2 * k as f64;
            (fd::d2(g, tau, 1e-3) + 0.6 * fd::d1(g, tau, 1e-3) + 1.7 * 1.7 * g(tau)).abs()
        })
        .fold(0.0, f64::max);
    checks.push(Check::abs("Green's function residual off the diagonal", residual, 0.0, 1e-8));
    let jump = fd::derivative(g, 0.0, 1, 1e-4, Side::Right) - fd::derivative(g, 0.0, 1, 1e-4, Side::Left);
    checks.push(Check::abs("derivative jump at tau=0", jump, 1.0, 1e-6));
    let (x0, v0) = (0.4, -0.2);
    let free = sho_solve(&osc, x0, v0, 1.0, None, 1.0)?;
    checks.push(Check::abs("initial position reproduced", free, x0, 1e-15));
    let mut worst = 0.0f64;
    for &(gamma, omega) in &[(0.25, 1.5), (0.0, 2.0), (1.0, 1.0)] {
        let osc = DampedOscillator::new(gamma, omega)?;
        for (t, want) in rk4(gamma, omega, &windowed, (-10.0, 0.0, 0.0), 20.0, 20_000, 500) {
            worst = worst.max((sho_solve(&osc, 0.0, 0.0, -10.0, Some(&windowed), t)? - want).abs());
        }
    }
    checks.push(Check::abs("windowed drive against RK4", worst, 0.0, 1e-5));
    let crit = DampedOscillator::new(0.7, 0.7)?;
    let near = DampedOscillator::new(0.7, 0.7 + 1e-9)?;
    let gap = (0..=100).map(|k| (sho_retarded_green(&crit, 0.1 * k as f64) - sho_retarded_green(&near, 0.1 * k as f64)).abs()).fold(0.0, f64::max);
    checks.push(Check::abs("critical damping continuity", gap, 0.0, 1e-8));
    checks_report(checks)
}
