use std::f64::consts::PI;

use clap::Args;
use fieldkernel_core::heat::{green_from_heat_kernel, heat_evolve, heat_kernel_flat, HeatKernelSpec};
use fieldkernel_core::poisson::coulomb_green;
use fieldkernel_core::quad::composite_gl;
use fieldkernel_core::specialfn::{lm_index, sph_harm_all};
use fieldkernel_core::spectra::sphere_modes;

use super::require;
use crate::{checks_report, Check, CliResult, CommonArgs, Report, Table};

#[derive(Debug, Clone, Args)]
pub struct HeatArgs {
    /// Flat-space kernel (the default computation).
    #[arg(long, conflicts_with_all = ["proper_time", "sphere_ell"])]
    pub flat: bool,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Diffusion time.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Diffusion constant.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Separation |x - x'| (comma separated for several).
    #[arg(long, value_delimiter = ',', default_value = "0.0,0.5,1.0,2.0")]
    pub sep: Vec<f64>,
    /// Integrate the flat kernel over space instead of sampling it (dim <= 3).
    #[arg(long)]
    pub norm_check: bool,
    /// Integrate the kernel over proper time and compare with the static Green's function.
    #[arg(long, conflicts_with = "sphere_ell")]
    pub proper_time: bool,
    /// Evolve a real harmonic of this degree on the unit sphere.
    #[arg(long)]
    pub sphere_ell: Option<usize>,
}

/// `int K(x, 0; tau) d^D x` by composite Gauss-Legendre over 12 kernel widths.
fn flat_normalization(spec: &HeatKernelSpec, tau: f64) -> CliResult<f64> {
    let d = spec.dimension();
    require(d <= 3, "--norm-check supports dim <= 3")?;
    let half = 12.0 * (spec.sigma() * tau).sqrt().max(1e-300);
    let xp = vec![0.0; d];
    let k = |p: &[f64]| heat_kernel_flat(spec, p, &xp, tau).unwrap_or(f64::NAN);
    let panels = [24, 24, 12][d - 1];
    let line = |f: &dyn Fn(f64) -> f64| composite_gl(f, -half, half, 16, panels);
    Ok(match d {
        1 => line(&|x| k(&[x])),
        2 => line(&|x| line(&|y| k(&[x, y]))),
        _ => line(&|x| line(&|y| line(&|z| k(&[x, y, z])))),
    })
}

/// Ratio of the evolved to the initial `Re Y_l^1` at one point, and the predicted decay.
fn sphere_decay(ell: usize, sigma: f64, tau: f64) -> CliResult<(f64, f64)> {
    let spec = HeatKernelSpec::on_modes(sphere_modes(ell + 1), sigma)?;
    let m = ell.min(1) as i64;
    let y = move |p: &[f64]| sph_harm_all(ell, p[0], p[1])[lm_index(ell, m)].re;
    let at = [0.9, 0.4];
    let got = heat_evolve(&spec, y, 0.0, tau, &at)? / y(&at);
    Ok((got, (-sigma * (ell * (ell + 1)) as f64 * tau).exp()))
}

pub fn run(a: &HeatArgs, _: &CommonArgs) -> CliResult<Report> {
    require(a.dim >= 1, "--dim must be at least 1")?;
    require(a.tau > 0.0 && a.sigma > 0.0, "--tau and --sigma must be positive")?;
    require(a.sep.iter().all(|&r| r >= 0.0), "--sep must be non-negative")?;
    if let Some(ell) = a.sphere_ell {
        let (got, want) = sphere_decay(ell, a.sigma, a.tau)?;
        let mut table = Table::new(["ell", "tau", "evolved_ratio", "predicted"]);
        table.push(vec![ell.into(), a.tau.into(), got.into(), want.into()])?;
        return Ok(Report::new(table));
    }
    if a.proper_time {
        let mut table = Table::new(["dim", "separation", "proper_time", "static"]);
        for &r in &a.sep {
            let mut x = vec![0.0; a.dim];
            x[0] = r;
            let xp = vec![0.0; a.dim];
            let g = green_from_heat_kernel(a.dim, &x, &xp, None)?;
            table.push(vec![a.dim.into(), r.into(), g.into(), coulomb_green(a.dim, &x, &xp)?.into()])?;
        }
        return Ok(Report::new(table));
    }
    let spec = HeatKernelSpec::flat(a.dim, a.sigma)?;
    if a.norm_check {
        let mut table = Table::new(["dim", "tau", "normalization"]);
        table.push(vec![a.dim.into(), a.tau.into(), flat_normalization(&spec, a.tau)?.into()])?;
        return Ok(Report::new(table));
    }
    let mut table = Table::new(["dim", "tau", "separation", "kernel"]);
    for &r in &a.sep {
        let mut x = vec![0.0; a.dim];
        x[0] = r;
        table.push(vec![a.dim.into(), a.tau.into(), r.into(), heat_kernel_flat(&spec, &x, &vec![0.0; a.dim], a.tau)?.into()])?;
    }
    Ok(Report::new(table))
}

pub fn self_test() -> CliResult<Report> {
    let mut checks = Vec::new();
    for d in 1..=3 {
        let spec = HeatKernelSpec::flat(d, 0.7)?;
        checks.push(Check::abs(&format!("flat normalization D={d}"), flat_normalization(&spec, 0.8)?, 1.0, 1e-8));
    }
    let s1 = HeatKernelSpec::flat(1, 1.0)?;
    let (t1, t2, x, xp) = (0.3, 0.55, 0.4, -0.9);
    let conv = composite_gl(
        |y| heat_kernel_flat(&s1, &[x], &[y], t1).unwrap_or(f64::NAN) * heat_kernel_flat(&s1, &[y], &[xp], t2).unwrap_or(f64::NAN),
        -12.0,
        12.0,
        16,
        24,
    );
    checks.push(Check::abs("semigroup K(t1) * K(t2) = K(t1 + t2)", conv, heat_kernel_flat(&s1, &[x], &[xp], t1 + t2)?, 1e-6));
    let (got, want) = sphere_decay(3, 0.5, 0.2)?;
    checks.push(Check::abs("sphere l=3 decay", got, want, 1e-10));
    for (p, q) in [([0.3, -1.0, 0.2], [1.0, 0.5, -0.7]), ([2.0, 0.0, 0.0], [0.0, 0.0, 0.1])] {
        let g = green_from_heat_kernel(3, &p, &q, None)?;
        checks.push(Check::abs("proper-time bridge D=3", g, coulomb_green(3, &p, &q)?, 1e-6));
    }
    let s0: f64 = 0.3;
    let init = move |p: &[f64]| (-p[0] * p[0] / (2.0 * s0 * s0)).exp();
    let var = s0 * s0 + 2.0 * 0.7;
    let want = s0 / var.sqrt() * (-0.25 / (2.0 * var)).exp();
    checks.push(Check::abs("Gaussian initial data", heat_evolve(&s1, init, 0.0, 0.7, &[0.5])?, want, 1e-8));
    let peak = heat_kernel_flat(&HeatKernelSpec::flat(3, 0.5)?, &[0.0; 3], &[0.0; 3], 2.0)?;
    checks.push(Check::abs("coincident value (4 pi sigma tau)^(-3/2)", peak, (4.0 * PI).powf(-1.5), 1e-16));
    checks_report(checks)
}
