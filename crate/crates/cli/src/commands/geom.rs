use std::f64::consts::PI;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use fieldkernel_core::geometry::{christoffel, curvature, geodesic, surface_area, EmbeddedSurface, Metric, DEFAULT_STEP};
use fieldkernel_core::quad::{tanh_sinh, QuadratureRule};
use nalgebra::DMatrix;

use super::require;
use crate::{checks_report, Cell, Check, CliResult, CommonArgs, Report, Table};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricChoice {
    /// Flat plane in Cartesian coordinates.
    Euclidean2,
    /// Flat space in Cartesian coordinates.
    Euclidean3,
    /// Flat plane in (r, phi).
    Polar,
    /// Flat space in (r, theta, phi).
    Spherical,
    /// Round 2-sphere of `--radius` in (theta, phi).
    Sphere,
}

#[derive(Debug, Clone, Args)]
pub struct GeomArgs {
    #[arg(long, value_enum, default_value_t = MetricChoice::Spherical)]
    pub metric: MetricChoice,
    /// Coordinates of the evaluation point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1.3,0.7,0.4")]
    pub at: Vec<f64>,
    /// Sphere radius.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
}

fn metric(choice: MetricChoice, radius: f64) -> Metric {
    match choice {
        MetricChoice::Euclidean2 => Metric::euclidean(2),
        MetricChoice::Euclidean3 => Metric::euclidean(3),
        MetricChoice::Polar => Metric::polar(),
        MetricChoice::Spherical => Metric::spherical(),
        MetricChoice::Sphere => Metric::sphere(radius),
    }
}

pub fn run(a: &GeomArgs, _: &CommonArgs) -> CliResult<Report> {
    require(a.radius > 0.0, "--radius must be positive")?;
    let m = metric(a.metric, a.radius);
    let d = m.dimension();
    require(a.at.len() == d, format!("--at needs {d} coordinates for this metric"))?;
    let gam = christoffel(&m, &a.at, DEFAULT_STEP)?;
    let curv = curvature(&m, &a.at, DEFAULT_STEP)?;
    let mut table = Table::new(["quantity", "i", "j", "k", "value"]);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                table.push(vec!["christoffel".into(), i.into(), j.into(), k.into(), gam.get(i, j, k).into()])?;
            }
        }
    }
    for j in 0..d {
        for l in 0..d {
            table.push(vec!["ricci".into(), j.into(), l.into(), Cell::Null, curv.ricci[(j, l)].into()])?;
        }
    }
    table.push(vec!["ricci_scalar".into(), Cell::Null, Cell::Null, Cell::Null, curv.scalar.into()])?;
    Ok(Report::new(table).with_meta("fd_step", DEFAULT_STEP))
}

/// Largest deviation from the closed-form Christoffel table of flat space in spherical coordinates.
fn spherical_table_error() -> CliResult<f64> {
    let m = Metric::spherical();
    let mut worst = 0.0f64;
    for &(r, t, p) in &[(1.3, 0.7, 0.4), (0.6, 2.1, 3.0)] {
        let g = christoffel(&m, &[r, t, p], DEFAULT_STEP)?;
        let (s, c) = t.sin_cos();
        let mut want = [[[0.0; 3]; 3]; 3];
        want[0][1][1] = -r;
        want[0][2][2] = -r * s * s;
        want[1][0][1] = 1.0 / r;
        want[1][1][0] = 1.0 / r;
        want[1][2][2] = -c * s;
        want[2][0][2] = 1.0 / r;
        want[2][2][0] = 1.0 / r;
        want[2][1][2] = c / s;
        want[2][2][1] = c / s;
        for (i, wi) in want.iter().enumerate() {
            for (j, wij) in wi.iter().enumerate() {
                for (k, w) in wij.iter().enumerate() {
                    worst = worst.max((g.get(i, j, k) - w).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Area of the graph `z = sqrt(R^2 - x^2 - y^2)` in polar parameters.
fn hemisphere_area(radius: f64) -> CliResult<f64> {
    let hemi = EmbeddedSurface::new(
        2,
        Arc::new(move |xi: &[f64]| vec![xi[0] * xi[1].cos(), xi[0] * xi[1].sin(), (radius * radius - xi[0] * xi[0]).max(0.0).sqrt()]),
        Metric::euclidean(3),
    )?
    .with_jacobian(Arc::new(move |xi: &[f64]| {
        let (rho, phi) = (xi[0], xi[1]);
        let z = (radius * radius - rho * rho).sqrt();
        DMatrix::from_row_slice(3, 2, &[phi.cos(), -rho * phi.sin(), phi.sin(), rho * phi.cos(), -rho / z, 0.0])
    }));
    // the rim has an inverse square-root singularity in rho
    let (mut rho, mut w) = QuadratureRule::gauss_legendre(32).mapped(0.0, radius / 2.0);
    let (edge, wedge) = tanh_sinh(radius / 2.0, radius, 1.0 / 64.0, 4.0);
    rho.extend(edge);
    w.extend(wedge);
    let axes = vec![(rho, w), QuadratureRule::trapezoid_periodic(8, 2.0 * PI).mapped(0.0, 2.0 * PI)];
    Ok(surface_area(&hemi, &axes, DEFAULT_STEP)?)
}

pub fn self_test() -> CliResult<Report> {
    let mut checks = vec![Check::abs("spherical Christoffel table", spherical_table_error()?, 0.0, 1e-8)];
    let sphere = Metric::sphere(1.0);
    checks.push(Check::abs("unit sphere Ricci scalar", curvature(&sphere, &[1.1, 0.3], DEFAULT_STEP)?.scalar, 2.0, 1e-5));
    let polar = curvature(&Metric::polar(), &[1.7, 0.3], DEFAULT_STEP)?;
    checks.push(Check::abs("polar plane is flat", polar.scalar, 0.0, 1e-5));
    let geo = geodesic(&sphere, &[1.0, 0.2], &[0.3, 0.9], (0.0, 10.0), 1e-3, DEFAULT_STEP)?;
    let norms = geo.norms(&sphere)?;
    let drift = norms.iter().map(|n| (n - norms[0]).abs()).fold(0.0, f64::max);
    checks.push(Check::abs("geodesic norm drift over [0, 10]", drift, 0.0, 1e-8));
    let radius = 1.7;
    checks.push(Check::abs("hemisphere graph area 2 pi R^2", hemisphere_area(radius)?, 2.0 * PI * radius * radius, 1e-6));
    checks_report(checks)
}
