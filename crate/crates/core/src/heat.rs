//! Diffusion kernels, initial-value evolution and the proper-time bridge to
//! the Coulomb Green's function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, FieldError, Result};
use crate::quad::{self, AdaptiveOptions, QuadratureRule};
use crate::spectra::ModeBasis;

/// Where the diffusion happens.
#[derive(Clone)]
pub enum HeatDomain {
    Flat,
    Modes(ModeBasis),
}

/// Diffusion equation `(d_t - sigma laplacian) psi = 0`.
#[derive(Clone)]
pub struct HeatKernelSpec {
    dimension: usize,
    sigma: f64,
    domain: HeatDomain,
}

impl HeatKernelSpec {
    pub fn flat(dimension: usize, sigma: f64) -> Result<Self> {
        if dimension == 0 || !(sigma > 0.0) {
            return domain("need dimension >= 1 and sigma > 0");
        }
        Ok(Self { dimension, sigma, domain: HeatDomain::Flat })
    }

    pub fn on_modes(basis: ModeBasis, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return domain("sigma must be positive");
        }
        Ok(Self { dimension: basis.domain().dimension(), sigma, domain: HeatDomain::Modes(basis) })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn domain(&self) -> &HeatDomain {
        &self.domain
    }
}

/// `(4 pi sigma tau)^{-D/2} exp(-|x - x'|^2 / (4 sigma tau))`.
pub fn heat_kernel_flat(spec: &HeatKernelSpec, x: &[f64], xp: &[f64], tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return domain("tau must be positive");
    }
    let d = spec.dimension;
    if x.len() != d || xp.len() != d {
        return Err(FieldError::DimensionMismatch { expected: d, found: x.len().min(xp.len()) });
    }
    let r2: f64 = x.iter().zip(xp).map(|(a, b)| (a - b) * (a - b)).sum();
    let st = spec.sigma * tau;
    Ok((4.0 * PI * st).powf(-(d as f64) / 2.0) * (-r2 / (4.0 * st)).exp())
}

/// `sum exp(-s lambda) psi(x) conj(psi(x'))`, truncated once
/// `exp(-s (lambda - lambda_0)) < tol`. Modes are in ascending eigenvalue order.
pub fn heat_kernel_modesum(basis: &ModeBasis, x: &[f64], xp: &[f64], s: f64, tol: f64) -> Result<f64> {
    if !(s > 0.0) {
        return domain("s must be positive");
    }
    let modes = basis.modes();
    let Some(first) = modes.first() else { return Ok(0.0) };
    let lam0 = first.eigenvalue;
    let mut acc = 0.0;
    for m in modes {
        let rel = (-s * (m.eigenvalue - lam0)).exp();
        if rel < tol {
            return Ok(acc);
        }
        acc += (-s * m.eigenvalue).exp() * (basis.eval(m, x) * basis.eval(m, xp).conj()).re;
    }
    Ok(acc)
}

/// Gauss-Hermite orders per axis for flat evolution: primary and cross-check.
fn hermite_orders(d: usize) -> (usize, usize) {
    match d {
        1 => (96, 64),
        2 => (64, 48),
        _ => (32, 24),
    }
}

/// Half-width in `u` beyond which `exp(-u^2)` is below 1e-31.
const GAUSS_WINDOW: f64 = 8.5;

/// `pi^{-D/2} int exp(-|u|^2) psi(x + scale u) du` on the tensor rule.
fn hermite_sum<F: Fn(&[f64]) -> f64>(rule: &QuadratureRule, initial: &F, x: &[f64], scale: f64) -> f64 {
    let n = rule.len();
    let total = n.pow(x.len() as u32);
    let mut acc = 0.0;
    let mut xp = x.to_vec();
    for flat in 0..total {
        let mut rest = flat;
        let mut w = 1.0;
        for (k, xi) in xp.iter_mut().enumerate() {
            let i = rest % n;
            rest /= n;
            *xi = x[k] + scale * rule.nodes[i];
            w *= rule.weights[i];
        }
        acc += w * initial(&xp);
    }
    acc * PI.powf(-(x.len() as f64) / 2.0)
}

/// Same integral by nested adaptive quadrature over the Gaussian window, for
/// initial data too narrow for the Hermite rule.
fn window_integral<F: Fn(&[f64]) -> f64>(initial: &F, x: &[f64], scale: f64, prefix: &[f64]) -> Result<f64> {
    let axis = prefix.len();
    if axis == x.len() {
        return Ok(initial(prefix));
    }
    let failure = std::cell::RefCell::new(None);
    let opts = AdaptiveOptions { rel_tol: 1e-12, abs_tol: 1e-15, initial_panels: 16, ..Default::default() };
    let r = quad::adaptive(
        |u: f64| {
            let mut p = prefix.to_vec();
            p.push(x[axis] + scale * u);
            match window_integral(initial, x, scale, &p) {
                Ok(v) => (-u * u).exp() * v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        -GAUSS_WINDOW,
        GAUSS_WINDOW,
        opts,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(r.value / PI.sqrt()),
    }
}

/// `psi(t, x)` for each of `points`, given `psi(t0, .) = initial`.
///
/// Flat space: tensor Gauss-Hermite in `x' = x + 2 sqrt(sigma (t - t0)) u`,
/// replaced by nested adaptive quadrature where two Hermite orders disagree.
/// Mode basis: projection onto every mode with decay `exp(-sigma lambda (t - t0))`.
pub fn heat_evolve_many<F>(spec: &HeatKernelSpec, initial: F, t0: f64, t: f64, points: &[Vec<f64>]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if t < t0 {
        return domain("evolution requires t >= t0");
    }
    let d = spec.dimension;
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(FieldError::DimensionMismatch { expected: d, found: p.len() });
    }
    if t == t0 {
        return Ok(points.iter().map(|p| initial(p)).collect());
    }
    let dt = t - t0;
    match &spec.domain {
        HeatDomain::Flat => {
            let (primary, check) = hermite_orders(d);
            let (rule, coarse) = (QuadratureRule::gauss_hermite(primary), QuadratureRule::gauss_hermite(check));
            let scale = 2.0 * (spec.sigma * dt).sqrt();
            points
                .par_iter()
                .map(|x| {
                    let fine = hermite_sum(&rule, &initial, x, scale);
                    let rough = hermite_sum(&coarse, &initial, x, scale);
                    if (fine - rough).abs() <= 1e-11 * fine.abs().max(1.0) {
                        Ok(fine)
                    } else {
                        window_integral(&initial, x, scale, &[])
                    }
                })
                .collect()
        }
        HeatDomain::Modes(basis) => {
            let coeffs = basis.project(|p| Complex64::new(initial(p), 0.0), basis.len());
            let decayed: Vec<Complex64> =
                coeffs.iter().zip(basis.modes()).map(|(c, m)| c * (-spec.sigma * m.eigenvalue * dt).exp()).collect();
            Ok(points
                .par_iter()
                .map(|x| decayed.iter().zip(basis.modes()).map(|(c, m)| c * basis.eval(m, x)).sum::<Complex64>().re)
                .collect())
        }
    }
}

/// Single-point form of [`heat_evolve_many`].
pub fn heat_evolve<F>(spec: &HeatKernelSpec, initial: F, t0: f64, t: f64, x: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    Ok(heat_evolve_many(spec, initial, t0, t, &[x.to_vec()])?[0])
}

/// `int_0^inf K(x, x'; t) dt` with `sigma = 1`.
///
/// Split at `t_cut` (default `|x - x'|^2 / 4`); beyond it `t = 1/v^2` maps the
/// slowly decaying tail onto `2 (4 pi)^{-D/2} int_0^{1/sqrt(t_cut)} v^{D-3} exp(-r^2 v^2 / 4) dv`.
pub fn green_from_heat_kernel(d: usize, x: &[f64], xp: &[f64], t_cut: Option<f64>) -> Result<f64> {
    if d <= 2 {
        return Err(FieldError::Divergent(format!("proper-time integral diverges for D = {d}")));
    }
    if x.len() != d || xp.len() != d {
        return Err(FieldError::DimensionMismatch { expected: d, found: x.len().min(xp.len()) });
    }
    let r2: f64 = x.iter().zip(xp).map(|(a, b)| (a - b) * (a - b)).sum();
    if r2 == 0.0 {
        return Err(FieldError::Singular("coincident points".into()));
    }
    let tc = t_cut.unwrap_or(r2 / 4.0);
    if !(tc > 0.0) {
        return domain("t_cut must be positive");
    }
    let df = d as f64;
    let norm = (4.0 * PI).powf(-df / 2.0);
    let opts = AdaptiveOptions::with_tol(1e-12);
    let head = quad::adaptive(|t: f64| if t <= 0.0 { 0.0 } else { norm * t.powf(-df / 2.0) * (-r2 / (4.0 * t)).exp() }, 0.0, tc, opts)?;
    let tail = quad::adaptive(|v: f64| 2.0 * norm * v.powi(d as i32 - 3) * (-r2 * v * v / 4.0).exp(), 0.0, 1.0 / tc.sqrt(), opts)?;
    Ok(head.value + tail.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::coulomb_green;
    use crate::spectra::{box_modes, sphere_modes};

    #[test]
    fn coincident_flat_value() {
        let s = HeatKernelSpec::flat(3, 0.5).unwrap();
        let v = heat_kernel_flat(&s, &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 2.0).unwrap();
        assert!((v - (4.0 * PI).powf(-1.5)).abs() < 1e-16);
        assert!(heat_kernel_flat(&s, &[0.0; 3], &[0.0; 3], 0.0).is_err());
    }

    #[test]
    fn flat_normalization() {
        let s = HeatKernelSpec::flat(1, 1.3).unwrap();
        let v = quad::adaptive_real_line(|x: f64| heat_kernel_flat(&s, &[x], &[0.4], 0.7).unwrap(), 0.4, AdaptiveOptions::with_tol(1e-12))
            .unwrap()
            .value;
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn modesum_boundary_and_short_time() {
        let b = box_modes(&[1.0], 4000).unwrap();
        assert_eq!(heat_kernel_modesum(&b, &[0.0], &[0.3], 0.1, 1e-16).unwrap(), 0.0);
        let s = 1e-3;
        let v = heat_kernel_modesum(&b, &[0.5], &[0.5], s, 1e-16).unwrap();
        let flat = (4.0 * PI * s).powf(-0.5);
        assert!((v / flat - 1.0).abs() < 0.01);
        let late = heat_kernel_modesum(&b, &[0.3], &[0.6], 5.0, 1e-16).unwrap();
        let lead = (-5.0 * PI * PI).exp() * 2.0 * (PI * 0.3).sin() * (PI * 0.6).sin();
        assert!((late / lead - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_gaussian_evolution() {
        let s = HeatKernelSpec::flat(1, 1.0).unwrap();
        let v0 = 0.3;
        let init = |x: &[f64]| (-x[0] * x[0] / (2.0 * v0)).exp() / (2.0 * PI * v0).sqrt();
        for &x in &[0.0, 0.7, -1.9] {
            let got = heat_evolve(&s, init, 0.5, 1.0, &[x]).unwrap();
            let var = v0 + 2.0 * 0.5;
            let want = (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
            assert!((got - want).abs() < 1e-12, "{got} {want}");
        }
        assert_eq!(heat_evolve(&s, init, 1.0, 1.0, &[0.2]).unwrap(), init(&[0.2]));
        assert!(heat_evolve(&s, init, 1.0, 0.5, &[0.2]).is_err());
    }

    #[test]
    fn sphere_multipole_decay() {
        let spec = HeatKernelSpec::on_modes(sphere_modes(4), 0.7).unwrap();
        let init = |p: &[f64]| (3.0 * p[0].cos().powi(2) - 1.0) * 0.5;
        let got = heat_evolve(&spec, init, 0.0, 0.2, &[0.4, 1.1]).unwrap();
        let want = init(&[0.4, 1.1]) * (-0.7 * 6.0 * 0.2f64).exp();
        assert!((got - want).abs() < 1e-12);
        let c = heat_evolve(&spec, |_| 2.5, 0.0, 3.0, &[1.0, 2.0]).unwrap();
        assert!((c - 2.5).abs() < 1e-12);
    }

    #[test]
    fn proper_time_bridge() {
        let g = green_from_heat_kernel(3, &[0.0; 3], &[1.0, 0.0, 0.0], None).unwrap();
        assert!((g - 1.0 / (4.0 * PI)).abs() < 1e-10);
        let x = [0.0; 5];
        let xp = [2.0, 0.0, 0.0, 0.0, 0.0];
        let g5 = green_from_heat_kernel(5, &x, &xp, None).unwrap();
        assert!((g5 - coulomb_green(5, &x, &xp).unwrap()).abs() < 1e-10);
        assert!(matches!(green_from_heat_kernel(2, &[0.0; 2], &[1.0, 0.0], None), Err(FieldError::Divergent(_))));
    }
}
