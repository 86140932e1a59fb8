use std::f64::consts::PI;

use clap::Args;
use fieldkernel_core::poisson::{
    box_green_modesum, coulomb_flux, coulomb_green, image_green_halfspace, legendre_green_expansion, log_green_2d_series,
    sphere_poisson_solve, DirichletSolver, MultipoleSet,
};
use fieldkernel_core::spectra::box_modes;
use fieldkernel_core::Complex64;

use super::require;
use crate::{checks_report, Check, CliResult, CommonArgs, Report, Table};

#[derive(Debug, Clone, Args)]
pub struct PoissonArgs {
    /// Space dimension; 2 selects the logarithmic kernel.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Separation |x - x'| (comma separated for several).
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    pub sep: Vec<f64>,
    /// Terms kept in the 2D multipole series.
    #[arg(long, default_value_t = 64)]
    pub lmax: usize,
}

pub fn run(a: &PoissonArgs, _: &CommonArgs) -> CliResult<Report> {
    require(a.dim >= 2, "--dim must be at least 2")?;
    require(a.sep.iter().all(|&r| r > 0.0), "--sep must be positive")?;
    let mut table = Table::new(["dim", "separation", "kernel", "value"]);
    for &r in &a.sep {
        if a.dim == 2 {
            // source at the origin: the series collapses to ln r
            let v = log_green_2d_series(r, 0.0, 0.0, 0.0, a.lmax)?;
            table.push(vec![2usize.into(), r.into(), "ln|x-x'|".into(), v.into()])?;
        } else {
            let mut x = vec![0.0; a.dim];
            x[0] = r;
            let v = coulomb_green(a.dim, &x, &vec![0.0; a.dim])?;
            table.push(vec![a.dim.into(), r.into(), "coulomb".into(), v.into()])?;
        }
    }
    Ok(Report::new(table))
}

pub fn self_test() -> CliResult<Report> {
    let mut checks = Vec::new();
    let g = coulomb_green(3, &[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0])?;
    checks.push(Check::abs("coulomb at unit separation", g, 1.0 / (4.0 * PI), 1e-16));
    for radius in [0.5, 2.0, 7.0] {
        let flux = coulomb_flux([0.1, -0.2, 0.15], [0.0; 3], radius)?;
        checks.push(Check::abs(&format!("Gauss flux radius {radius}"), flux, 1.0, 1e-8));
    }
    checks.push(Check::abs("flux from an exterior source", coulomb_flux([3.0, 0.0, 0.0], [0.0; 3], 1.0)?, 0.0, 1e-8));
    let (x, xp) = ([0.3, -0.2, 0.8], [1.1, 0.4, 0.25]);
    let reciprocity = image_green_halfspace(3, &x, &xp)? - image_green_halfspace(3, &xp, &x)?;
    checks.push(Check::abs("image kernel reciprocity", reciprocity, 0.0, 1e-16));
    let (r, rp, mu): (f64, f64, f64) = (0.6, 1.4, 0.3);
    let direct = 1.0 / (4.0 * PI * (r * r + rp * rp - 2.0 * r * rp * mu).sqrt());
    checks.push(Check::rel("Legendre expansion l<=80", legendre_green_expansion(r, rp, mu, 80)?, direct, 1e-12));
    let basis = box_modes(&[1.0], 100_000)?;
    let solver = DirichletSolver::new(basis.clone(), None, |p: &[f64]| if p[0] == 0.0 { 1.0 } else { 3.0 })?;
    let line = (1..=9).map(|k| (solver.eval(&[k as f64 / 10.0]) - (1.0 + 2.0 * k as f64 / 10.0)).abs()).fold(0.0, f64::max);
    checks.push(Check::abs("straight line from boundary values", line, 0.0, 1e-4));
    let gm = box_green_modesum(&basis, &[0.3], &[0.7], 1e-9)?;
    checks.push(Check::abs("interval mode sum x<(L-x>)/L", gm, 0.3 * 0.3, 1e-6));
    let mut b = MultipoleSet::zeros(3);
    b.set(2, 1, Complex64::new(0.6, -0.2));
    let a = sphere_poisson_solve(&b)?;
    checks.push(Check::abs("sphere solve divides by l(l+1)", (a.get(2, 1) * 6.0 - b.get(2, 1)).norm(), 0.0, 1e-15));
    checks_report(checks)
}
