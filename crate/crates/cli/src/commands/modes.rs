use clap::{Args, ValueEnum};
use fieldkernel_core::quad::{QuadratureRule, SphereRule};
use fieldkernel_core::spectra::{box_modes, circle_modes, periodic_modes, rayleigh_quotient, sphere_modes, DomainSpec, ModeBasis};
use fieldkernel_core::specialfn::{lm_index, sph_harm_all};
use fieldkernel_core::Complex64;
use std::f64::consts::PI;

use super::require;
use crate::{checks_report, Check, CliResult, CommonArgs, Report, Table};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Domain {
    /// Dirichlet box with one edge length per axis.
    Box,
    /// Periodic box with one edge length per axis.
    Periodic,
    /// Unit circle.
    Circle,
    /// Unit 2-sphere.
    Sphere,
}

#[derive(Debug, Clone, Args)]
pub struct ModesArgs {
    #[arg(long, value_enum, default_value_t = Domain::Box)]
    pub domain: Domain,
    /// Edge lengths for box domains, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    pub lengths: Vec<f64>,
    /// Largest label per axis (box), |m| (circle) or l (sphere).
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    /// Number of lowest modes to list.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
}

fn basis(a: &ModesArgs) -> CliResult<ModeBasis> {
    Ok(match a.domain {
        Domain::Box => box_modes(&a.lengths, a.nmax)?,
        Domain::Periodic => periodic_modes(&a.lengths, a.nmax)?,
        Domain::Circle => circle_modes(a.nmax),
        Domain::Sphere => sphere_modes(a.nmax),
    })
}

pub fn run(a: &ModesArgs, _: &CommonArgs) -> CliResult<Report> {
    require(a.nmax >= 1, "--nmax must be at least 1")?;
    let b = basis(a)?;
    let mut table = Table::new(["index", "label", "eigenvalue"]);
    for (i, m) in b.modes().iter().take(a.count).enumerate() {
        let label = m.label.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(";");
        table.push(vec![i.into(), label.into(), m.eigenvalue.into()])?;
    }
    Ok(Report::new(table).with_meta("modes_available", b.len()))
}

/// Largest deviation of the Gram matrix of the first `n` modes of a 2D box from the identity.
fn box_gram_error(lengths: [f64; 2], n: usize) -> CliResult<f64> {
    let b = box_modes(&lengths, 6)?;
    let rule = QuadratureRule::gauss_legendre(24);
    let (xs, wx) = rule.mapped(0.0, lengths[0]);
    let (ys, wy) = rule.mapped(0.0, lengths[1]);
    let modes = &b.modes()[..n];
    let mut worst = 0.0f64;
    for (i, mi) in modes.iter().enumerate() {
        for (j, mj) in modes.iter().enumerate().skip(i) {
            let mut acc = 0.0;
            for (x, wxv) in xs.iter().zip(&wx) {
                for (y, wyv) in ys.iter().zip(&wy) {
                    acc += wxv * wyv * b.eval_real(mi, &[*x, *y]) * b.eval_real(mj, &[*x, *y]);
                }
            }
            worst = worst.max((acc - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(worst)
}

fn sphere_gram_error(lmax: usize) -> f64 {
    let rule = SphereRule::new(2 * lmax + 4, 4 * lmax + 8);
    let n = (lmax + 1) * (lmax + 1);
    let pts: Vec<(Vec<Complex64>, f64)> = rule.points().into_iter().map(|(t, p, w)| (sph_harm_all(lmax, t, p), w)).collect();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let g: Complex64 = pts.iter().map(|(y, w)| y[i].conj() * y[j] * *w).sum();
            worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).norm());
        }
    }
    worst
}

pub fn self_test() -> CliResult<Report> {
    let mut checks = Vec::new();
    let len = 1.7;
    let b = box_modes(&[len], 8)?;
    checks.push(Check::rel("box ground eigenvalue (pi/L)^2", b.modes()[0].eigenvalue, (PI / len).powi(2), 1e-14));
    let s = sphere_modes(5);
    let l5 = s.modes().iter().filter(|m| m.label[0] == 5).count();
    checks.push(Check::abs("sphere l=5 degeneracy", l5 as f64, 11.0, 0.0));
    checks.push(Check::abs("sphere top eigenvalue l(l+1)", s.modes().last().map_or(f64::NAN, |m| m.eigenvalue), 30.0, 1e-12));
    let c = circle_modes(3);
    checks.push(Check::abs("circle eigenvalue m^2", c.modes().last().map_or(f64::NAN, |m| m.eigenvalue), 9.0, 1e-12));
    checks.push(Check::abs("box 2D Gram matrix", box_gram_error([1.0, 1.5], 12)?, 0.0, 1e-12));
    checks.push(Check::abs("sphere harmonics Gram matrix l<=6", sphere_gram_error(6), 0.0, 1e-10));
    let idx = lm_index(2, -1);
    checks.push(Check::abs("flat index of (2,-1)", idx as f64, 5.0, 0.0));
    let domain = DomainSpec::dirichlet_box(&[len])?;
    let trial = move |p: &[f64]| p[0] * (len - p[0]);
    checks.push(Check::at_least("Rayleigh quotient of a trial function", rayleigh_quotient(trial, &domain)?, (PI / len).powi(2)));
    checks_report(checks)
}
