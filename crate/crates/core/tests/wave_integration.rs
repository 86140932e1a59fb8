use std::f64::consts::PI;
use std::sync::Arc;

use fieldkernel_core::wave::*;
use fieldkernel_core::Complex64;

#[test]
fn kirchhoff_plane_wave() {
    let k: [f64; 3] = [1.0, 0.5, -0.3];
    let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let phase = move |x: &[f64; 3]| k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
    let psi0 = move |x: &[f64; 3]| Complex64::from_polar(1.0, phase(x));
    let dpsi0 = move |x: &[f64; 3]| Complex64::new(0.0, -kk) * Complex64::from_polar(1.0, phase(x));
    let x = [0.2, -0.4, 0.9];
    let got = kirchhoff_evolve_4d(&psi0, &dpsi0, 0.0, 1.3, x).unwrap();
    let want = Complex64::from_polar(1.0, phase(&x) - kk * 1.3);
    assert!((got - want).norm() < 1e-6, "{got} {want}");
    let zero = |_: &[f64; 3]| Complex64::new(0.0, 0.0);
    assert_eq!(kirchhoff_evolve_4d(&zero, &zero, 0.0, 1.0, x).unwrap(), Complex64::new(0.0, 0.0));
    assert!(kirchhoff_evolve_4d(&zero, &zero, 1.0, 1.0, x).is_err());
}

#[test]
fn kirchhoff_gaussian_matches_fourier_oracle() {
    let s = 0.5;
    let psi0 = move |x: &[f64; 3]| Complex64::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * s * s)).exp(), 0.0);
    let zero = |_: &[f64; 3]| Complex64::new(0.0, 0.0);
    let hat = move |k: f64| (2.0 * PI).powf(1.5) * s.powi(3) * (-k * k * s * s / 2.0).exp();
    for &(t, r) in &[(0.7, 0.4), (1.5, 1.2), (2.0, 0.3)] {
        let got = kirchhoff_evolve_4d(&psi0, &zero, 0.0, t, [0.0, 0.0, r]).unwrap();
        let want = radial_fourier_evolve(hat, |_| 0.0, t, r, 14.0 / s).unwrap();
        assert!((got.re - want).abs() < 1e-4, "t={t} r={r}: {got} {want}");
        assert!(got.im.abs() < 1e-14);
    }
}

#[test]
fn static_point_monopole_is_coulomb() {
    let w: f64 = 0.05;
    let norm = (2.0 * PI * w * w).powf(-1.5);
    let blob = move |_t: f64, x: &[f64; 3]| norm * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * w * w)).exp();
    let opts = ConvolveOptions { support_radius: 12.0 * w, ..Default::default() };
    let psi = convolve_retarded_4d(&blob, 3.0, [0.0, 1.0, 1.5], &opts).unwrap();
    let r = (1.0f64 + 2.25).sqrt();
    assert!((psi - 1.0 / (4.0 * PI * r)).abs() < 1e-3 * (1.0 / (4.0 * PI * r)));
}

#[test]
fn point_source_retardation() {
    let w: f64 = 0.03;
    let norm = (2.0 * PI * w * w).powf(-1.5);
    let f = |t: f64| (1.3 * t).sin() + 0.2;
    let src = move |t: f64, x: &[f64; 3]| f(t) * norm * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * w * w)).exp();
    let opts = ConvolveOptions { support_radius: 12.0 * w, ..Default::default() };
    let x = [2.0, 0.0, 0.0];
    let psi = convolve_retarded_4d(&src, 1.0, x, &opts).unwrap();
    let want = f(1.0 - 2.0) / (8.0 * PI);
    assert!((psi - want).abs() < 1e-3 * want.abs());
}

#[test]
fn causality_outside_future_cone() {
    let src = |t: f64, x: &[f64; 3]| {
        if t >= 0.0 {
            (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * 10.0).exp()
        } else {
            0.0
        }
    };
    let opts = ConvolveOptions { support_radius: 2.0, ..Default::default() };
    // source switches on at t = 0 with support radius 2: nothing reaches r = 5 before t = 3
    assert_eq!(convolve_retarded_4d(&src, 2.9, [5.0, 0.0, 0.0], &opts).unwrap(), 0.0);
}

#[test]
fn frequency_mode_sum() {
    let omega = 1.7;
    let (r1, r2) = (1.0 / omega, 3.0 / omega);
    let x = [r1 * 0.6, r1 * 0.0, r1 * 0.8];
    let xp = [-r2 * 0.48, r2 * 0.64, r2 * 0.6];
    let got = freq_green_modesum(omega, x, xp, 40).unwrap();
    let d = ((x[0] - xp[0]).powi(2) + (x[1] - xp[1]).powi(2) + (x[2] - xp[2]).powi(2)).sqrt();
    let want = freq_green_4d(omega, d).unwrap();
    assert!((got - want).norm() < 1e-8, "{got} {want}");
}

#[test]
fn multipole_static_limit_and_dipole() {
    let q = 0.8;
    let m0 = MomentTerm { l: 0, m: 0, series: Arc::new(move |_| Complex64::new(q / (4.0 * PI).sqrt(), 0.0)) };
    let v = multipole_radiation(&[m0], 0.5, 3.0, [0.0, 2.0, 0.0]).unwrap();
    assert!((v - q / (4.0 * PI * 2.0)).abs() < 1e-15);
    for &omega in &[1.0, 2.0] {
        let e = dipole_field(|t| [0.0, 0.0, (omega * t).cos()], 0.0, [10.0, 0.0, 0.0]).unwrap();
        let amp = omega * omega / (4.0 * PI * 10.0);
        assert!((e[2] - amp * (omega * -10.0f64).cos()).abs() < 1e-8);
    }
    let h = quadrupole_strain(|t| [[t * t, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]], 1.0, 0.0, [4.0, 0.0, 0.0]).unwrap();
    assert!((h[0][0] + 2.0 / 4.0 * 2.0).abs() < 1e-8);
}

#[test]
fn convolution_satisfies_wave_equation() {
    let src = |t: f64, x: &[f64; 3]| (-t * t).exp() * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
    let opts = ConvolveOptions { support_radius: 6.5, radial_panels: 64, n_theta: 48, n_phi: 96, tol: 1e-6, ..Default::default() };
    let x0 = [0.3, -0.2, 0.4];
    let t0 = 0.5;
    let psi = |t: f64, x: [f64; 3]| convolve_retarded_4d(&src, t, x, &opts).unwrap();
    let h = 0.1;
    let d2 = |f: &dyn Fn(f64) -> f64| (-f(-2.0 * h) + 16.0 * f(-h) - 30.0 * f(0.0) + 16.0 * f(h) - f(2.0 * h)) / (12.0 * h * h);
    let tt = d2(&|s| psi(t0 + s, x0));
    let mut lap = 0.0;
    for axis in 0..3 {
        lap += d2(&|s| {
            let mut x = x0;
            x[axis] += s;
            psi(t0, x)
        });
    }
    let residual = tt - lap - src(t0, &x0);
    assert!(residual.abs() < 1e-3, "{residual}");
}

#[test]
fn time_and_frequency_domains_agree() {
    let omega = 2.0;
    let w = 0.3;
    let amp = move |x: &[f64; 3]| {
        let g = (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * w * w)).exp();
        Complex64::new(g * (1.0 + x[2]), 0.5 * g * x[0])
    };
    let src = move |t: f64, x: &[f64; 3]| (amp(x) * Complex64::from_polar(1.0, -omega * t)).re;
    let opts = ConvolveOptions { support_radius: 10.0 * w, radial_panels: 32, ..Default::default() };
    let x = [3.0, 4.0, 12.0];
    let t = 0.7;
    let time_domain = convolve_retarded_4d(&src, t, x, &opts).unwrap();

    // frequency domain: int G(omega, x - x') J(x') d^3x' with the same product grid
    let rule = fieldkernel_core::SphereRule::new(32, 64).points();
    let gl = fieldkernel_core::QuadratureRule::gauss_legendre(64);
    let (rs, ws) = gl.mapped(0.0, 10.0 * w);
    let mut freq = Complex64::new(0.0, 0.0);
    for (&r, &wr) in rs.iter().zip(&ws) {
        for &(th, ph, wa) in &rule {
            let xp = [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
            let d = ((x[0] - xp[0]).powi(2) + (x[1] - xp[1]).powi(2) + (x[2] - xp[2]).powi(2)).sqrt();
            freq += freq_green_4d(omega, d).unwrap() * amp(&xp) * (wr * wa * r * r);
        }
    }
    let freq_time = (freq * Complex64::from_polar(1.0, -omega * t)).re;
    assert!((time_domain - freq_time).abs() < 1e-4 * freq_time.abs().max(1e-3), "{time_domain} {freq_time}");

    // far-zone multipole field approaches the exact one as 1/(omega r)
    let profile = FrequencyProfile { omega, profile: Arc::new(amp) };
    let moments = frequency_multipoles(&profile, 6, 10.0 * w, &fieldkernel_core::SphereRule::new(32, 64), 32).unwrap();
    let far = [30.0, 40.0, 120.0];
    let approx = far_zone_frequency_field(omega, &moments, far).unwrap();
    let mut exact = Complex64::new(0.0, 0.0);
    for (&r, &wr) in rs.iter().zip(&ws) {
        for &(th, ph, wa) in &rule {
            let xp = [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
            let d = ((far[0] - xp[0]).powi(2) + (far[1] - xp[1]).powi(2) + (far[2] - xp[2]).powi(2)).sqrt();
            exact += freq_green_4d(omega, d).unwrap() * amp(&xp) * (wr * wa * r * r);
        }
    }
    let rel = (approx - exact).norm() / exact.norm();
    assert!(rel < 0.02, "{rel}");
}

fn boost_rotate(e: &SpacetimeEvent, eta: f64, angle: f64, shift: [f64; 4]) -> SpacetimeEvent {
    let (ch, sh) = (eta.cosh(), eta.sinh());
    let t = ch * e.t + sh * e.x[0];
    let x0 = sh * e.t + ch * e.x[0];
    let (s, c) = angle.sin_cos();
    let x1 = c * x0 - s * e.x[1];
    let y1 = s * x0 + c * e.x[1];
    SpacetimeEvent::new(t + shift[0], &[x1 + shift[1], y1 + shift[2], e.x[2] + shift[3]])
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_depends_only_on_world_function(
        t in 0.5f64..4.0,
        x in proptest::array::uniform3(-1.0f64..1.0),
        eta in -1.5f64..1.5,
        angle in 0.0f64..(2.0 * PI),
        shift in proptest::array::uniform4(-3.0f64..3.0),
    ) {
        let src = SpacetimeEvent::new(0.0, &[0.0, 0.0, 0.0]);
        let obs = SpacetimeEvent::new(t, &x);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        proptest::prop_assume!((t - r).abs() > 1e-3);
        let (src2, obs2) = (boost_rotate(&src, eta, angle, shift), boost_rotate(&obs, eta, angle, shift));
        let s1 = synge(&obs, &src).unwrap();
        let s2 = synge(&obs2, &src2).unwrap();
        proptest::prop_assert!((s1 - s2).abs() < 1e-10 * (1.0 + s1.abs()));
        let dt2 = obs2.t - src2.t;
        let r2 = obs2.x.iter().zip(&src2.x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        for d in [2usize, 3, 5, 7] {
            for orient in [Orientation::Retarded, Orientation::Advanced] {
                let k = causal_green(d, orient).unwrap();
                let (a, b) = (k.eval(t, r).unwrap(), k.eval(dt2, r2).unwrap());
                proptest::prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-12), "d={} {} {}", d, a, b);
            }
        }
    }
}
