use std::sync::Arc;

use fieldkernel_core::fd::{self, Side};
use fieldkernel_core::odegreen::*;
use proptest::prelude::*;

fn radial_operator(ell: usize, a: f64, b: f64) -> (LinearOde2, SymmetricGreenSpec) {
    let l = ell as f64;
    let ode = LinearOde2::new(Arc::new(move |r| -l * (l + 1.0) / (r * r)), Arc::new(|r| 2.0 / r), Arc::new(|_| 1.0), a, b).unwrap();
    let spec = SymmetricGreenSpec {
        f1: Arc::new(move |r: f64| -r.powf(-l - 1.0)),
        f2: Arc::new(move |r: f64| r.powf(l)),
        w0: -(2.0 * l + 1.0) / (b * b),
        a1: 0.0,
        a2: 0.0,
        chi: 0.0,
    };
    (ode, spec)
}

fn dirichlet_line(len: f64) -> (LinearOde2, SymmetricGreenSpec) {
    let ode = LinearOde2::new(Arc::new(|_| 0.0), Arc::new(|_| 0.0), Arc::new(|_| -1.0), 0.0, len).unwrap();
    // W = f1 f2' - f1' f2 = -1, so p2 W = 1: a unit delta for -d2/dx2
    let spec = SymmetricGreenSpec {
        f1: Arc::new(move |x: f64| x / len),
        f2: Arc::new(move |x: f64| len - x),
        w0: -1.0,
        a1: 0.0,
        a2: 0.0,
        chi: 1.0,
    };
    (ode, spec)
}

fn jump(g: &SymmetricGreen, zp: f64) -> f64 {
    let h = 1e-4;
    let right = fd::derivative(|z| g.eval(z, zp), zp, 1, h, Side::Right);
    let left = fd::derivative(|z| g.eval(z, zp), zp, 1, h, Side::Left);
    (g.operator().p2)(zp) * (right - left)
}

#[test]
fn radial_green_is_power_law_and_jumps_by_measure() {
    for ell in 0..4 {
        let (ode, spec) = radial_operator(ell, 0.5, 3.0);
        let g = build_symmetric_green(&ode, spec).unwrap();
        for &(r, rp) in &[(0.7f64, 1.9f64), (2.5, 1.1), (1.4, 1.45)] {
            let (lo, hi) = if r < rp { (r, rp) } else { (rp, r) };
            let want = lo.powi(ell as i32) / hi.powi(ell as i32 + 1);
            assert!((g.eval(r, rp) - want).abs() < 1e-14);
            assert_eq!(g.eval(r, rp), g.eval(rp, r));
        }
        for &zp in &[0.8, 1.5, 2.6] {
            let lambda = g.jump_measure(zp).unwrap();
            assert!((jump(&g, zp) - lambda).abs() < 1e-6 * lambda.abs().max(1.0), "ell={ell}");
        }
    }
}

#[test]
fn dirichlet_line_green() {
    let len = 2.0;
    let (ode, spec) = dirichlet_line(len);
    let g = build_symmetric_green(&ode, spec).unwrap();
    for &(x, xp) in &[(0.3f64, 1.2f64), (1.7, 0.4), (1.0, 1.0)] {
        let want = x.min(xp) * (len - x.max(xp)) / len;
        assert!((g.eval(x, xp) - want).abs() < 1e-14);
    }
    // unit delta coefficient for -d2/dx2
    assert!((g.jump_measure(0.9).unwrap() - 1.0).abs() < 1e-12);
    assert!((jump(&g, 0.9) - 1.0).abs() < 1e-6);
    assert!(g.eval(0.0, 0.7).abs() < 1e-15 && g.eval(len, 0.7).abs() < 1e-15);
}

#[test]
fn off_diagonal_residual_vanishes() {
    let (ode, spec) = radial_operator(2, 0.5, 3.0);
    let g = build_symmetric_green(&ode, spec).unwrap();
    let zp = 1.3;
    for k in 0..40 {
        let z = 0.6 + 2.3 * k as f64 / 39.0;
        if (z - zp).abs() > 0.01 {
            let r = ode.apply(|s| g.eval(s, zp), z, 1e-3);
            assert!(r.abs() < 1e-6, "z={z} residual {r}");
        }
    }
}

#[test]
fn mismatched_wronskian_rejected() {
    let (ode, mut spec) = radial_operator(1, 0.5, 3.0);
    spec.w0 *= 1.01;
    assert!(build_symmetric_green(&ode, spec).is_err());
}

#[test]
fn wronskian_profiles() {
    let (ode, _) = radial_operator(1, 0.5, 3.0);
    for &r in &[0.5, 1.0, 2.2] {
        let w = wronskian_profile(&ode, 2.0, r).unwrap();
        assert!((w - 2.0 * 9.0 / (r * r)).abs() < 1e-10);
    }
    let gamma = 0.4;
    let sho = LinearOde2::new(Arc::new(|_| 1.0), Arc::new(move |_| 2.0 * gamma), Arc::new(|_| 1.0), 0.0, 5.0).unwrap();
    let w = wronskian_profile(&sho, 1.5, 1.0).unwrap();
    assert!((w - 1.5 * (-2.0 * gamma * (1.0 - 5.0)).exp()).abs() < 1e-10 * w);
}

#[test]
fn sho_green_off_diagonal_residual_and_jump() {
    for &(gamma, omega) in &[(0.0, 1.0), (0.3, 1.7), (0.8, 0.8)] {
        let osc = DampedOscillator::new(gamma, omega).unwrap();
        for k in 1..60 {
            let tau = 0.2 * k as f64;
            let g = |t: f64| sho_retarded_green(&osc, t);
            let h = 1e-3;
            let res = fd::d2(g, tau, h) + 2.0 * gamma * fd::d1(g, tau, h) + omega * omega * g(tau);
            assert!(res.abs() < 1e-8, "gamma={gamma} tau={tau} {res}");
        }
        assert_eq!(sho_retarded_green(&osc, 0.0), 0.0);
        assert_eq!(sho_retarded_green(&osc, -0.5), 0.0);
        let right = fd::derivative(|t| sho_retarded_green(&osc, t), 0.0, 1, 1e-4, Side::Right);
        let left = fd::derivative(|t| sho_retarded_green(&osc, t), 0.0, 1, 1e-4, Side::Left);
        assert!((right - left - 1.0).abs() < 1e-6);
    }
}

/// Samples of `x` from RK4 on `x'' + 2 gamma x' + omega^2 x = force` over
/// `span` with initial state `(x0, v0)`.
fn rk4_sho(gamma: f64, omega: f64, force: &dyn Fn(f64) -> f64, (x0, v0): (f64, f64), (t0, t1): (f64, f64), steps: usize) -> Vec<(f64, f64)> {
    let h = (t1 - t0) / steps as f64;
    let rhs = |t: f64, x: f64, v: f64| (v, force(t) - 2.0 * gamma * v - omega * omega * x);
    let (mut x, mut v) = (x0, v0);
    let mut out = vec![(t0, x0)];
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = rhs(t, x, v);
        let k2 = rhs(t + h / 2.0, x + h / 2.0 * k1.0, v + h / 2.0 * k1.1);
        let k3 = rhs(t + h / 2.0, x + h / 2.0 * k2.0, v + h / 2.0 * k2.1);
        let k4 = rhs(t + h, x + h * k3.0, v + h * k3.1);
        x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        out.push((t + h, x));
    }
    out
}

#[test]
fn windowed_drive_matches_rk4() {
    let (tau_w, mu) = (3.0, 2.0);
    let force = move |t: f64| (-(t / tau_w).powi(2)).exp() * (mu * t).sin();
    for &(gamma, omega) in &[(0.25, 1.5), (0.0, 2.0), (1.0, 1.0)] {
        let osc = DampedOscillator::new(gamma, omega).unwrap();
        let (x0, v0, t0) = (0.5, -0.2, -10.0);
        let traj = rk4_sho(gamma, omega, &force, (x0, v0), (t0, t0 + 20.0), 20_000);
        let mut worst = 0.0f64;
        for &(t, x) in traj.iter().step_by(250) {
            let got = sho_solve(&osc, x0, v0, t0, Some(&force), t).unwrap();
            worst = worst.max((got - x).abs());
        }
        assert!(worst < 1e-5, "gamma={gamma} sup error {worst}");
    }
}

#[test]
fn initial_data_reproduced() {
    let osc = DampedOscillator::new(0.3, 1.2).unwrap();
    let x = |t: f64| sho_solve(&osc, 0.7, -1.1, 2.0, None, t).unwrap();
    assert!((x(2.0) - 0.7).abs() < 1e-15);
    let v = fd::derivative(x, 2.0, 1, 1e-4, Side::Right);
    assert!((v + 1.1).abs() < 1e-6);
    assert!(sho_solve(&osc, 0.0, 0.0, 2.0, None, 1.0).is_err());
}

#[test]
fn critical_damping_limit_is_continuous() {
    let gamma = 0.7;
    let crit = DampedOscillator::new(gamma, gamma).unwrap();
    for &delta in &[1e-12, 1e-10, 1e-9, 1e-8] {
        let near = DampedOscillator::new(gamma, gamma + delta).unwrap();
        for k in 0..=100 {
            let tau = 0.1 * k as f64;
            let a = sho_retarded_green(&crit, tau);
            let b = sho_retarded_green(&near, tau);
            assert!((a - b).abs() < 1e-8, "delta={delta} tau={tau}");
            assert!((a - tau * (-gamma * tau).exp()).abs() < 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn helmholtz_radial_symmetric(ell in 0usize..12, omega in 0.1f64..5.0, r in 0.05f64..4.0, rp in 0.05f64..4.0) {
        let a = radial_green_helmholtz(ell, omega, r, rp).unwrap();
        let b = radial_green_helmholtz(ell, omega, rp, r).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sho_green_bounded_by_envelope(gamma in 0.0f64..1.0, extra in 0.0f64..2.0, tau in 0.0f64..30.0) {
        let osc = DampedOscillator::new(gamma, gamma + extra).unwrap();
        prop_assert!(sho_retarded_green(&osc, tau).abs() <= tau * (-gamma * tau).exp() + 1e-15);
    }
}
