//! Asymptotic expansions of integrals and the JWKB method.

mod jwkb;

pub use jwkb::{jwkb_solve, JwkbProblem, JwkbSign, JwkbSolution};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, FieldError, Result};
use crate::fd::{self, Side};
use crate::specialfn::{double_factorial, gamma};

/// Partial sum of an asymptotic series, with the first omitted term.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSeries {
    pub terms: Vec<f64>,
    pub truncation_index: usize,
    pub first_omitted_bound: f64,
}

impl AsymptoticSeries {
    pub fn value(&self) -> f64 {
        self.terms.iter().sum()
    }
}

/// Term `l >= 1` of the integration-by-parts series for `int_x^inf exp(-t^2) dt`.
pub fn erf_term(x: f64, l: usize) -> f64 {
    let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
    sign * (-x * x).exp() * double_factorial(2 * l as i64 - 3) / (2f64.powi(l as i32) * x.powi(2 * l as i32 - 1))
}

/// `exp(-x^2) sum_{l=1}^n (-1)^{l-1} (2l-3)!! / (2^l x^{2l-1})`.
pub fn erf_asymptotic(x: f64, n: usize) -> Result<AsymptoticSeries> {
    if !(x > 0.0) || n == 0 {
        return domain("need x > 0 and n >= 1");
    }
    Ok(AsymptoticSeries {
        terms: (1..=n).map(|l| erf_term(x, l)).collect(),
        truncation_index: n,
        first_omitted_bound: erf_term(x, n + 1).abs(),
    })
}

/// Number of terms to keep so that the first omitted term is the smallest one.
pub fn erf_optimal_truncation(x: f64) -> Result<usize> {
    if !(x > 0.0) {
        return domain("x must be positive");
    }
    // |t_{l+1} / t_l| = (2l - 1) / (2 x^2): terms shrink while 2l - 1 < 2 x^2
    let mut l = 1;
    while ((2 * l - 1) as f64) < 2.0 * x * x {
        l += 1;
    }
    Ok((l - 1).max(1))
}

/// `sqrt(2 pi / x) x^x exp(-x)`, the leading form of `Gamma(x)`.
pub fn stirling(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain("x must be positive");
    }
    Ok((2.0 * PI / x).sqrt() * (x * x.ln() - x).exp())
}

/// Shape of the maximum of `phi` at `c`. Endpoint kinds take `c` as the lower
/// limit with the integration running to the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaplaceKind {
    /// `phi'(c) = 0`, `phi''(c) < 0`, `c` interior.
    InteriorQuadratic,
    /// `phi'(c) < 0` at the lower endpoint.
    EndpointLinear,
    /// `f ~ g(t) (t - c)^{alpha - 1}` and `phi - phi(c) ~ phi^(p)(c) (t - c)^p / p!` at the lower endpoint.
    EndpointAlgebraic { alpha: f64, p: usize },
}

const PROBE_STEP: f64 = 1e-3;

fn vanishing(d: f64, scale: f64) -> bool {
    d.abs() <= 1e-5 * scale.abs().max(1.0)
}

/// Regular part `g(c)` of `f = g (t - c)^{alpha - 1}`, extrapolated from the right.
fn regular_part<F: Fn(f64) -> f64>(f: &F, c: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        return f(c);
    }
    let g = |d: f64| f(c + d) * d.powf(1.0 - alpha);
    let d = 1e-5;
    2.0 * g(d) - g(2.0 * d)
}

/// Leading Laplace approximation of `int f(t) exp(x phi(t)) dt`.
///
/// General endpoint form `g(c) e^{x phi(c)} Gamma(alpha/p)/p (p!/(x |phi^(p)(c)|))^{alpha/p}`;
/// an interior quadratic maximum counts both sides. The declared kind is
/// probed with finite differences before use.
pub fn laplace_leading<F, P>(f: F, phi: P, c: f64, kind: LaplaceKind, x: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    if !(x > 0.0) {
        return domain("x must be positive");
    }
    let (alpha, p, side, two_sided) = match kind {
        LaplaceKind::InteriorQuadratic => (1.0, 2, Side::Both, true),
        LaplaceKind::EndpointLinear => (1.0, 1, Side::Right, false),
        LaplaceKind::EndpointAlgebraic { alpha, p } => {
            if !(alpha > 0.0) || p == 0 {
                return domain("need alpha > 0 and p >= 1");
            }
            (alpha, p, Side::Right, false)
        }
    };
    let dp = fd::derivative(&phi, c, p, PROBE_STEP, side);
    for k in 1..p {
        let dk = fd::derivative(&phi, c, k, PROBE_STEP, side);
        if !vanishing(dk, dp) {
            return Err(FieldError::Classification(format!("phi^({k})(c) = {dk} does not vanish")));
        }
    }
    if !(dp < 0.0) {
        return Err(FieldError::Classification(format!("phi^({p})(c) = {dp} is not negative: c is not a maximum")));
    }
    let g = regular_part(&f, c, alpha);
    let pf = (1..=p).product::<usize>() as f64;
    let one = g * (x * phi(c)).exp() * gamma(alpha / p as f64)? / p as f64 * (pf / (x * dp.abs())).powf(alpha / p as f64);
    Ok(if two_sided { 2.0 * one } else { one })
}

/// Where the stationary point of the phase sits relative to the integration range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryPoint {
    /// Lower limit of the range, integration to the right.
    Endpoint,
    /// Interior point; both sides contribute (needs even `p`).
    Interior,
}

/// Leading stationary-phase term of `int f(t) exp(i x phi(t)) dt` from `a`:
/// `f(a) e^{i(x phi(a) +- pi/(2p))} Gamma(1/p)/p (p!/(x |phi^(p)(a)|))^{1/p}`,
/// the sign following `phi^(p)(a)`.
pub fn stationary_phase_leading<F, P>(f: F, phi: P, a: f64, p: usize, at: StationaryPoint, x: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    if !(x > 0.0) || p < 2 {
        return domain("need x > 0 and p >= 2");
    }
    if at == StationaryPoint::Interior && p % 2 == 1 {
        return Err(FieldError::Classification("an interior stationary point of odd order has unequal sides".into()));
    }
    let side = if at == StationaryPoint::Interior { Side::Both } else { Side::Right };
    let dp = fd::derivative(&phi, a, p, PROBE_STEP, side);
    if dp.abs() < 1e-8 {
        return Err(FieldError::Classification(format!("phi^({p})(a) vanishes")));
    }
    for k in 1..p {
        let dk = fd::derivative(&phi, a, k, PROBE_STEP, side);
        if !vanishing(dk, dp) {
            return Err(FieldError::Classification(format!("phi^({k})(a) = {dk} does not vanish")));
        }
    }
    let pf = (1..=p).product::<usize>() as f64;
    let pn = p as f64;
    let mag = gamma(1.0 / pn)? / pn * (pf / (x * dp.abs())).powf(1.0 / pn);
    let phase = x * phi(a) + dp.signum() * PI / (2.0 * pn);
    let one = f(a) * Complex64::from_polar(mag, phase);
    Ok(if at == StationaryPoint::Interior { one * 2.0 } else { one })
}
