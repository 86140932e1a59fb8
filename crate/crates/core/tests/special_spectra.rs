use std::f64::consts::PI;

use fieldkernel_core::quad::{composite_gl, SphereRule};
use fieldkernel_core::specialfn::*;
use fieldkernel_core::spectra::*;
use fieldkernel_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn harmonic_gram_matrix_is_identity() {
    let lmax = 8;
    let rule = SphereRule::new(24, 48);
    let n = (lmax + 1) * (lmax + 1);
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for (t, p, w) in rule.points() {
        let y = sph_harm_all(lmax, t, p);
        for a in 0..n {
            for b in 0..n {
                gram[a * n + b] += y[a].conj() * y[b] * w;
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((gram[a * n + b] - want).norm() < 1e-10, "{a} {b}");
        }
    }
}

fn direction(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.gen_range(-1.0f64..1.0).acos(), rng.gen_range(0.0..2.0 * PI))
}

#[test]
fn addition_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let (t1, p1) = direction(&mut rng);
        let (t2, p2) = direction(&mut rng);
        let mu = t1.sin() * t2.sin() * (p1 - p2).cos() + t1.cos() * t2.cos();
        let y1 = sph_harm_all(10, t1, p1);
        let y2 = sph_harm_all(10, t2, p2);
        for l in 0..=10usize {
            let s: Complex64 = (-(l as i64)..=l as i64).map(|m| y1[lm_index(l, m)].conj() * y2[lm_index(l, m)]).sum();
            let lhs = legendre_p(l, mu.clamp(-1.0, 1.0)).unwrap();
            assert!((s * (4.0 * PI / (2 * l + 1) as f64) - lhs).norm() < 1e-10);
        }
    }
}

#[test]
fn bessel_integral_representation() {
    for m in 0..=10 {
        for k in 0..=8 {
            let x = -20.0 + 5.0 * k as f64;
            let q = composite_gl(|p| (x * p.sin() - m as f64 * p).cos(), 0.0, 2.0 * PI, 16, 16) / (2.0 * PI);
            assert!((cyl_bessel_j(m, x) - q).abs() < 1e-10, "m={m} x={x}");
        }
    }
}

#[test]
fn spherical_wronskian() {
    for k in 0..50 {
        let x = 10f64.powf(-2.0 + 5.0 * k as f64 / 49.0);
        let t = spherical_bessel_table(6, x).unwrap();
        for l in 0..=6 {
            let w = t.h[l] * t.dj[l] - t.dh[l] * t.j[l];
            // j h' - j' h = i / x^2
            let w = -w;
            assert!((w - Complex64::new(0.0, 1.0 / (x * x))).norm() < 1e-9 / (x * x), "l={l} x={x}");
        }
    }
}

#[test]
fn mode_bases_are_orthonormal() {
    let bases = vec![
        box_modes(&[1.3], 60).unwrap(),
        box_modes(&[1.0, 2.0], 8).unwrap(),
        box_modes(&[1.0, 1.5, 0.7], 4).unwrap(),
        periodic_modes(&[2.0, 1.0], 4).unwrap(),
        circle_modes(30),
        sphere_modes(7),
    ];
    for b in &bases {
        let count = 50.min(b.len());
        for i in 0..count {
            let mi = b.modes()[i].clone();
            let coeffs = b.project(|p| b.eval(&mi, p), count);
            for (j, c) in coeffs.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((c - want).norm() < 1e-8, "{:?} {i} {j} {c}", b.domain().kind);
            }
        }
    }
}

#[test]
fn modes_are_laplacian_eigenfunctions() {
    let h = 1e-3;
    let b = box_modes(&[1.0, 1.7], 5).unwrap();
    let x = [0.37, 0.81];
    for m in b.modes() {
        let mut lap = 0.0;
        for ax in 0..2 {
            lap += fieldkernel_core::fd::d2(
                |s| {
                    let mut p = x;
                    p[ax] = s;
                    b.eval_real(m, &p)
                },
                x[ax],
                h,
            );
        }
        let v = b.eval_real(m, &x);
        assert!((lap + m.eigenvalue * v).abs() < 1e-4 * (m.eigenvalue * v.abs()).max(1e-3));
    }
    let s = sphere_modes(4);
    let (t, p) = (0.9, 2.1);
    for m in s.modes() {
        let f = |tt: f64, pp: f64| s.eval(m, &[tt, pp]);
        let dtt = (f(t + h, p) - f(t, p) * 2.0 + f(t - h, p)) / (h * h);
        let dt = (f(t + h, p) - f(t - h, p)) / (2.0 * h);
        let dpp = (f(t, p + h) - f(t, p) * 2.0 + f(t, p - h)) / (h * h);
        let lap = dtt + dt * (t.cos() / t.sin()) + dpp / (t.sin() * t.sin());
        assert!((lap + f(t, p) * m.eigenvalue).norm() < 1e-4 * (1.0 + m.eigenvalue));
    }
}

#[test]
fn expansions_converge_monotonically() {
    let f = |x: &[f64]| x[0] * (1.0 - x[0]) * (3.0 * x[0]).exp();
    let exact_norm2 = composite_gl(|x| f(&[x]).powi(2), 0.0, 1.0, 16, 8);
    let mut prev = f64::INFINITY;
    for nmax in [2, 4, 8, 16, 32] {
        let b = box_modes(&[1.0], nmax).unwrap();
        let c = b.project(|p| Complex64::new(f(p), 0.0), nmax);
        let err2 = exact_norm2 - c.iter().map(|v| v.norm_sqr()).sum::<f64>();
        assert!(err2 < prev && err2 >= -1e-12);
        prev = err2;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rayleigh_bounded_by_ground_state(a in -1.0f64..1.0, b in -1.0f64..1.0, c in 0.2f64..1.0) {
        let len = 1.5;
        let psi = move |x: &[f64]| {
            let s = x[0] / len;
            s * (1.0 - s) * (c + a * s + b * s * s)
        };
        if let Ok(q) = rayleigh_quotient(psi, &DomainSpec::dirichlet_box(&[len]).unwrap()) {
            prop_assert!(q >= (PI / len).powi(2) * (1.0 - 1e-9));
        }
    }

    #[test]
    fn legendre_bounded(l in 0usize..40, x in -1.0f64..1.0) {
        prop_assert!(legendre_p(l, x).unwrap().abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn harmonic_conjugation(l in 0usize..10, m in 0i64..10, t in 0.0f64..PI, p in 0.0f64..(2.0 * PI)) {
        prop_assume!(m as usize <= l);
        let y = sph_harm_all(l, t, p);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((y[lm_index(l, -m)] - y[lm_index(l, m)].conj() * sign).norm() < 1e-13);
    }
}
