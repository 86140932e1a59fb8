use std::sync::Arc;

use fieldkernel_core::asympt::*;
use fieldkernel_core::fd::{self, Side};

/// RK4 for `psi'' = U psi / eps^2` from `(psi, psi')` at 0, sampled every `every` steps.
fn rk4(u: &dyn Fn(f64) -> f64, eps: f64, psi0: f64, dpsi0: f64, x_end: f64, steps: usize, every: usize) -> Vec<(f64, f64)> {
    let h = x_end / steps as f64;
    let f = |x: f64, y: [f64; 2]| [y[1], u(x) * y[0] / (eps * eps)];
    let mut y = [psi0, dpsi0];
    let mut out = vec![(0.0, psi0)];
    for n in 0..steps {
        let x = n as f64 * h;
        let k1 = f(x, y);
        let k2 = f(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (n + 1) % every == 0 {
            out.push(((n + 1) as f64 * h, y[0]));
        }
    }
    out
}

/// Sup-norm relative error of the growing JWKB solution against RK4 on `[0, 1]`.
fn jwkb_error(eps: f64, order: usize) -> f64 {
    let u = |x: f64| 1.0 + x * x;
    let problem = JwkbProblem { u: Arc::new(u), epsilon: eps, order };
    let sol = JwkbSolution::new(&problem, 0.0, 1.0, JwkbSign::Minus).unwrap();
    let psi0 = sol.eval(0.0).unwrap();
    let dpsi0 = fd::derivative(|x| sol.eval(x).unwrap(), 0.0, 1, 1e-4, Side::Right);
    rk4(&u, eps, psi0, dpsi0, 1.0, 20_000, 500)
        .into_iter()
        .map(|(x, y)| (sol.eval(x).unwrap() - y).abs() / y.abs())
        .fold(0.0, f64::max)
}

#[test]
fn jwkb_matches_rk4() {
    let e = jwkb_error(0.05, 1);
    assert!(e < 1e-3, "{e}");
}

#[test]
fn jwkb_error_scales_quadratically() {
    let ratio = jwkb_error(0.05, 1) / jwkb_error(0.025, 1);
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn jwkb_corrections_scale_with_derivatives() {
    // larger curvature of U gives larger corrections; each order gains a power of eps
    let p = JwkbProblem { u: Arc::new(|x: f64| 1.0 + x * x), epsilon: 0.05, order: 3 };
    let sol = JwkbSolution::new(&p, 0.0, 1.0, JwkbSign::Plus).unwrap();
    let mags: Vec<f64> = (0..=3).map(|l| 0.05f64.powi(l as i32) * sol.correction(l, 1.0).abs()).collect();
    assert!(mags[1] < mags[0] && mags[2] < mags[1] && mags[3] < mags[2], "{mags:?}");
}

#[test]
fn laplace_error_shrinks_as_x_doubles() {
    use fieldkernel_core::quad::{adaptive_semi_infinite, AdaptiveOptions};
    let mut prev = f64::INFINITY;
    for k in 0..4 {
        let x = 10.0 * 2f64.powi(k);
        let lead = laplace_leading(|t: f64| (-t * t / 2.0).exp(), |t: f64| -t, 0.0, LaplaceKind::EndpointLinear, x).unwrap();
        let exact = adaptive_semi_infinite(|t: f64| (-t * t / 2.0 - x * t).exp(), 0.0, AdaptiveOptions::with_tol(1e-13)).unwrap().value;
        let err = (lead / exact - 1.0).abs();
        assert!(err < prev);
        prev = err;
    }
}
