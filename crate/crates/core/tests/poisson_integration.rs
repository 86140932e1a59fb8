use std::f64::consts::PI;
use std::sync::Arc;

use fieldkernel_core::fd;
use fieldkernel_core::poisson::*;
use fieldkernel_core::quad::composite_gl;
use fieldkernel_core::spectra::{box_modes, box_modes_with_counts};
use fieldkernel_core::{Complex64, FieldError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn random_point(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(lo..hi)).collect()
}

fn fd_laplacian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> f64 {
    (0..x.len())
        .map(|i| {
            fd::d2(
                |s| {
                    let mut p = x.to_vec();
                    p[i] = s;
                    f(&p)
                },
                x[i],
                h,
            )
        })
        .sum()
}

#[test]
fn coulomb_unit_separation_and_gauss_flux() {
    let g = coulomb_green(3, &[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
    assert!((g - 1.0 / (4.0 * PI)).abs() <= f64::EPSILON / (4.0 * PI));
    let xp = [0.1, -0.2, 0.15];
    for &radius in &[0.5, 2.0, 7.0] {
        let flux = coulomb_flux(xp, [0.0; 3], radius).unwrap();
        assert!((flux - 1.0).abs() < 1e-8, "radius {radius}: {flux}");
    }
    // a sphere that misses the source carries no net flux
    assert!(coulomb_flux(xp, [3.0, 0.0, 0.0], 1.0).unwrap().abs() < 1e-8);
}

#[test]
fn closed_form_reciprocity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        for d in 3..=5 {
            let x = random_point(&mut rng, d, -2.0, 2.0);
            let xp = random_point(&mut rng, d, -2.0, 2.0);
            assert_eq!(coulomb_green(d, &x, &xp).unwrap(), coulomb_green(d, &xp, &x).unwrap());
            let (mut y, mut yp) = (x.clone(), xp.clone());
            y[d - 1] = y[d - 1].abs();
            yp[d - 1] = yp[d - 1].abs();
            assert_eq!(image_green_halfspace(d, &y, &yp).unwrap(), image_green_halfspace(d, &yp, &y).unwrap());
        }
        let (r, rp): (f64, f64) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
        let (p, pp) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
        if (r - rp).abs() > 0.05 {
            let a = log_green_2d_series(r, p, rp, pp, 400).unwrap();
            let b = log_green_2d_series(rp, pp, r, p, 400).unwrap();
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }
}

#[test]
fn modesum_reciprocity() {
    let basis = box_modes(&[1.0, 1.3], 120).unwrap();
    let tol = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let x = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..1.25)];
        let xp = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..1.25)];
        let a = box_green_modesum(&basis, &x, &xp, tol).unwrap();
        let b = box_green_modesum(&basis, &xp, &x, tol).unwrap();
        assert!((a - b).abs() < tol);
    }
}

#[test]
fn green_functions_are_harmonic_away_from_sources() {
    let h = 1e-3;
    let xp3 = [0.3, -0.1, 0.4];
    let x3 = [1.1, 0.5, 0.9];
    let g = |x: &[f64]| coulomb_green(3, x, &xp3).unwrap();
    assert!(fd_laplacian(&g, &x3, h).abs() < 1e-6);
    let xp4 = [0.3, -0.1, 0.4, 0.2];
    let g4 = |x: &[f64]| coulomb_green(4, x, &xp4).unwrap();
    assert!(fd_laplacian(&g4, &[1.0, 0.4, -0.3, 0.8], h).abs() < 1e-6);
    let img = |x: &[f64]| image_green_halfspace(3, x, &xp3).unwrap();
    assert!(fd_laplacian(&img, &x3, h).abs() < 1e-6);
    let (rp, pp) = (0.5, 1.0);
    let log = |x: &[f64]| log_green_2d_series(x[0].hypot(x[1]), x[1].atan2(x[0]), rp, pp, 300).unwrap();
    assert!(fd_laplacian(&log, &[1.2, 0.9], h).abs() < 1e-6);
}

#[test]
fn straight_line_from_boundary_data() {
    let len = 1.0;
    let (alpha, beta) = (1.0, 3.0);
    let basis = box_modes(&[len], 100_000).unwrap();
    let solver = DirichletSolver::new(basis, None, move |p: &[f64]| if p[0] == 0.0 { alpha } else { beta }).unwrap();
    for k in 1..=9 {
        let x = len * k as f64 / 10.0;
        let want = alpha + (beta - alpha) * x / len;
        assert!((solver.eval(&[x]) - want).abs() < 1e-4, "x={x}");
    }
}

#[test]
fn interval_modesum_closed_form() {
    let len = 2.0;
    let basis = box_modes(&[len], 20_000).unwrap();
    let (x, xp) = (0.3 * len, 0.7 * len);
    let g = box_green_modesum(&basis, &[x], &[xp], 1e-9).unwrap();
    assert!((g - x * (len - xp) / len).abs() < 1e-6);
    assert!(box_green_modesum(&basis, &[0.0], &[xp], 1e-9).unwrap().abs() < 1e-12);
}

fn sor_heated_edge(n: usize, top: &dyn Fn(f64) -> f64) -> Vec<Vec<f64>> {
    let h = 1.0 / n as f64;
    let mut u = vec![vec![0.0; n + 1]; n + 1];
    for (i, row) in u.iter_mut().enumerate() {
        row[n] = top(i as f64 * h);
    }
    let omega = 2.0 / (1.0 + (PI * h).sin());
    for _ in 0..20_000 {
        let mut change = 0.0f64;
        for i in 1..n {
            for j in 1..n {
                let gs = 0.25 * (u[i - 1][j] + u[i + 1][j] + u[i][j - 1] + u[i][j + 1]);
                let delta = omega * (gs - u[i][j]);
                u[i][j] += delta;
                change = change.max(delta.abs());
            }
        }
        if change < 1e-13 {
            break;
        }
    }
    u
}

#[test]
fn heated_edge_matches_relaxation() {
    let n = 64;
    let top = |x: f64| (PI * x).sin() + 0.25 * (3.0 * PI * x).sin();
    let fdsol = sor_heated_edge(n, &top);
    let basis = box_modes_with_counts(&[1.0, 1.0], &[4, 100_000]).unwrap();
    let solver = DirichletSolver::new(basis, None, move |p: &[f64]| if p[1] == 1.0 { top(p[0]) } else { 0.0 }).unwrap();
    let h = 1.0 / n as f64;
    let worst = (1..n)
        .into_par_iter()
        .map(|i| (1..n).map(|j| (solver.eval(&[i as f64 * h, j as f64 * h]) - fdsol[i][j]).abs()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max);
    assert!(worst < 1e-3, "sup-norm difference {worst}");
}

#[test]
fn eigenmode_source_inverts() {
    let len = 1.0;
    let basis = box_modes(&[len], 64).unwrap();
    let src = SourceDensity::new(1, Arc::new(|p: &[f64]| if (0.0..=1.0).contains(&p[0]) { (2.0f64).sqrt() * (PI * p[0]).sin() } else { 0.0 }), 1.0).unwrap();
    let solver = DirichletSolver::new(basis, Some(&src), |_: &[f64]| 0.0).unwrap();
    for &x in &[0.2, 0.5, 0.77] {
        let want = (2.0f64).sqrt() * (PI * x).sin() / (PI * PI);
        assert!((solver.eval(&[x]) - want).abs() < 1e-10);
    }
}

fn shell_density(center: [f64; 3], radius: f64, width: f64, charge: f64) -> impl Fn(&[f64]) -> f64 + Send + Sync {
    let profile = move |r: f64| {
        let s = (r - radius) / width;
        if s.abs() < 1.0 { (1.0 - s * s).powi(3) } else { 0.0 }
    };
    let norm = composite_gl(|r| 4.0 * PI * r * r * profile(r), radius - width, radius + width, 16, 8);
    move |p: &[f64]| {
        let r = ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2) + (p[2] - center[2]).powi(2)).sqrt();
        charge * profile(r) / norm
    }
}

#[test]
fn thin_shell_is_a_monopole() {
    let shell = shell_density([0.0; 3], 0.8, 0.1, 1.0);
    let src = SourceDensity::new(3, Arc::new(shell), 1.0).unwrap();
    let m = multipole_static(&src, 4).unwrap();
    assert!((m.get(0, 0).re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-10);
    for l in 1..=4 {
        for mm in -(l as i64)..=l as i64 {
            assert!(m.get(l, mm).norm() < 1e-10);
        }
    }
    for &r in &[1.5, 4.0] {
        let psi = m.exterior_field(r, 0.7, 2.0).unwrap();
        assert!((psi - 1.0 / (4.0 * PI * r)).abs() < 1e-10);
    }
    assert!(matches!(m.exterior_field(0.5, 0.7, 2.0), Err(FieldError::OutOfRegion(_))));
}

#[test]
fn opposite_shells_give_a_dipole() {
    let sep = 0.2;
    let plus = shell_density([0.0, 0.0, sep / 2.0], 0.3, 0.1, 1.0);
    let minus = shell_density([0.0, 0.0, -sep / 2.0], 0.3, 0.1, -1.0);
    let src = SourceDensity::new(3, Arc::new(move |p: &[f64]| plus(p) + minus(p)), 0.6).unwrap();
    let m = multipole_static_with_grid(&src, 6, 48, 96).unwrap();
    let rho10 = (3.0 / (4.0 * PI)).sqrt() * sep;
    assert!((m.get(1, 0).re - rho10).abs() < 1e-8);
    assert!(m.get(0, 0).norm() < 1e-10 && m.get(1, 1).norm() < 1e-10);
    for l in 0..=6 {
        for mm in 1..=l as i64 {
            let sign = if mm % 2 == 0 { 1.0 } else { -1.0 };
            assert!((m.get(l, -mm) - m.get(l, mm).conj() * sign).norm() < 1e-12);
        }
    }
    // exterior shells act as point charges
    let (r, t) = (2.0f64, 0.6f64);
    let x = [r * t.sin(), 0.0, r * t.cos()];
    let exact = coulomb_green(3, &x, &[0.0, 0.0, sep / 2.0]).unwrap() - coulomb_green(3, &x, &[0.0, 0.0, -sep / 2.0]).unwrap();
    assert!((m.exterior_field(r, t, 0.0).unwrap() - exact).abs() < 1e-9);
    let dipole = sep * t.cos() / (4.0 * PI * r * r);
    assert!((m.exterior_field(r, t, 0.0).unwrap() - dipole).abs() < 0.01 * dipole);
}

#[test]
fn sphere_poisson_residual() {
    let mut b = MultipoleSet::zeros(4);
    b.set(1, 0, Complex64::new(1.0, 0.0));
    b.set(2, 1, Complex64::new(0.5, -0.3));
    b.set(2, -1, Complex64::new(-0.5, -0.3));
    b.set(4, 3, Complex64::new(0.2, 0.1));
    b.set(4, -3, Complex64::new(-0.2, 0.1));
    let a = sphere_poisson_solve(&b).unwrap();
    let h = 1e-3;
    for &(t, p) in &[(0.4, 0.3), (1.2, 2.5), (2.6, 5.0)] {
        let psi = |tt: f64, pp: f64| a.synthesize(tt, pp).re;
        let lap = fd::d2(|s| psi(s, p), t, h) + t.cos() / t.sin() * fd::d1(|s| psi(s, p), t, h) + fd::d2(|s| psi(t, s), p, h) / (t.sin() * t.sin());
        assert!((-lap - b.synthesize(t, p).re).abs() < 1e-8);
        assert!(a.synthesize(t, p).im.abs() < 1e-14);
    }
    let mut bad = MultipoleSet::zeros(2);
    bad.set(0, 0, Complex64::new(1.0, 0.0));
    assert!(matches!(sphere_poisson_solve(&bad), Err(FieldError::InconsistentSource(_))));
}

#[test]
fn legendre_expansion_matches_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let r = rng.gen_range(0.1..1.0);
        let rp = r * rng.gen_range(1.6..4.0);
        let mu: f64 = rng.gen_range(-1.0..1.0);
        let dist = (r * r + rp * rp - 2.0 * r * rp * mu).sqrt();
        let got = legendre_green_expansion(r, rp, mu, 60).unwrap();
        assert!((got - 1.0 / (4.0 * PI * dist)).abs() < 1e-10);
    }
}
