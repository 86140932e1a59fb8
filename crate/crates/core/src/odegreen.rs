//! Green's functions of real second-order linear ODEs built from a pair of
//! homogeneous solutions, plus the damped oscillator and the radial
//! Helmholtz kernel.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, FieldError, Result};
use crate::fd;
use crate::heaviside;
use crate::quad::{self, AdaptiveOptions};
use crate::specialfn::spherical_bessel_pair;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Operator `D f = p2 f'' + p1 f' + p0 f` on [a, b].
#[derive(Clone)]
pub struct LinearOde2 {
    pub p0: RealFn,
    pub p1: RealFn,
    pub p2: RealFn,
    pub a: f64,
    pub b: f64,
}

impl LinearOde2 {
    /// Rejects operators whose leading coefficient vanishes at any of 257
    /// evenly spaced sample points.
    pub fn new(p0: RealFn, p1: RealFn, p2: RealFn, a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return domain("need a < b");
        }
        for k in 0..=256 {
            let z = a + (b - a) * k as f64 / 256.0;
            if (p2)(z) == 0.0 || !(p2)(z).is_finite() {
                return Err(FieldError::Singular(format!("p2 vanishes at z = {z}")));
            }
        }
        Ok(Self { p0, p1, p2, a, b })
    }

    /// `D f` at `z` with fourth-order differences of step `h`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F, z: f64, h: f64) -> f64 {
        (self.p2)(z) * fd::d2(&f, z, h) + (self.p1)(z) * fd::d1(&f, z, h) + (self.p0)(z) * f(z)
    }
}

/// `W0 exp(-int_b^z p1/p2)`, the Wronskian normalized to `W0` at `z = b`.
pub fn wronskian_profile(ode: &LinearOde2, w0: f64, z: f64) -> Result<f64> {
    if z < ode.a || z > ode.b {
        return domain(format!("z = {z} outside [{}, {}]", ode.a, ode.b));
    }
    let ratio = |s: f64| (ode.p1)(s) / (ode.p2)(s);
    let r = quad::adaptive(ratio, ode.b, z, AdaptiveOptions::with_tol(1e-13))?;
    if !r.value.is_finite() {
        return Err(FieldError::Singular("p1/p2 not integrable on the path".into()));
    }
    Ok(w0 * (-r.value).exp())
}

/// Homogeneous pair and free constants of the symmetric ansatz
/// `G = A1 f1 f1' + A2 f2 f2' + (chi - 1) f1(z>) f2(z<) + chi f2(z>) f1(z<)`.
#[derive(Clone)]
pub struct SymmetricGreenSpec {
    pub f1: RealFn,
    pub f2: RealFn,
    pub w0: f64,
    pub a1: f64,
    pub a2: f64,
    pub chi: f64,
}

/// A validated symmetric Green's function.
#[derive(Clone)]
pub struct SymmetricGreen {
    spec: SymmetricGreenSpec,
    ode: LinearOde2,
}

fn wronskian_fd(f1: &RealFn, f2: &RealFn, z: f64, h: f64) -> f64 {
    f1(z) * fd::d1(|s| f2(s), z, h) - fd::d1(|s| f1(s), z, h) * f2(z)
}

/// Validate `spec` against `ode` and build the kernel. The Wronskian
/// `f1 f2' - f1' f2` must match the Abel profile to 1e-8 relative at 33
/// interior sample points.
pub fn build_symmetric_green(ode: &LinearOde2, spec: SymmetricGreenSpec) -> Result<SymmetricGreen> {
    let span = ode.b - ode.a;
    let h = 1e-4 * span;
    for k in 1..=33 {
        let z = ode.a + span * k as f64 / 34.0;
        let w = wronskian_fd(&spec.f1, &spec.f2, z, h);
        if w == 0.0 || !w.is_finite() {
            return Err(FieldError::Singular(format!("homogeneous pair is dependent at z = {z}")));
        }
        let expect = wronskian_profile(ode, spec.w0, z)?;
        if ((w - expect) / expect).abs() > 1e-8 {
            return Err(FieldError::Precondition(format!("Wronskian {w} does not match profile {expect} at z = {z}")));
        }
    }
    Ok(SymmetricGreen { spec, ode: ode.clone() })
}

impl SymmetricGreen {
    pub fn eval(&self, z: f64, zp: f64) -> f64 {
        let s = &self.spec;
        let (zg, zl) = if z >= zp { (z, zp) } else { (zp, z) };
        s.a1 * (s.f1)(z) * (s.f1)(zp) + s.a2 * (s.f2)(z) * (s.f2)(zp)
            + (s.chi - 1.0) * (s.f1)(zg) * (s.f2)(zl)
            + s.chi * (s.f2)(zg) * (s.f1)(zl)
    }

    /// Coefficient `lambda(z') = p2(z') W(z')` of the delta function produced
    /// by `D_z G(z, z')`; also `p2` times the jump in `dG/dz` across `z = z'`.
    pub fn jump_measure(&self, zp: f64) -> Result<f64> {
        Ok((self.ode.p2)(zp) * wronskian_profile(&self.ode, self.spec.w0, zp)?)
    }

    pub fn operator(&self) -> &LinearOde2 {
        &self.ode
    }
}

/// Damped oscillator `x'' + 2 gamma x' + Omega^2 x = F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedOscillator {
    gamma: f64,
    omega: f64,
}

impl DampedOscillator {
    pub fn new(gamma: f64, omega: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !(omega >= gamma) || !omega.is_finite() {
            return domain(format!("need Omega >= gamma >= 0, got gamma={gamma}, Omega={omega}"));
        }
        Ok(Self { gamma, omega })
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    fn a2(&self) -> f64 {
        (self.omega - self.gamma) * (self.omega + self.gamma)
    }
}

/// `(sin(a tau)/a, cos(a tau))` with `a^2` given, using the series near `a = 0`.
fn sinc_cos(a2: f64, tau: f64) -> (f64, f64) {
    let x = a2 * tau * tau;
    if x < 1e-8 {
        (tau * (1.0 - x / 6.0 + x * x / 120.0), 1.0 - x / 2.0 + x * x / 24.0)
    } else {
        let a = a2.sqrt();
        ((a * tau).sin() / a, (a * tau).cos())
    }
}

/// Retarded Green's function `theta(tau) e^{-gamma tau} sin(a tau) / a`.
pub fn sho_retarded_green(osc: &DampedOscillator, tau: f64) -> f64 {
    if heaviside(tau) == 0.0 {
        return 0.0;
    }
    let (s, _) = sinc_cos(osc.a2(), tau);
    (-osc.gamma * tau).exp() * s
}

/// `dG/dtau` for `tau >= 0`.
pub fn sho_retarded_green_dtau(osc: &DampedOscillator, tau: f64) -> f64 {
    if heaviside(tau) == 0.0 {
        return 0.0;
    }
    let (s, c) = sinc_cos(osc.a2(), tau);
    (-osc.gamma * tau).exp() * (c - osc.gamma * s)
}

/// Position at time `t` from initial data at `t0` and an optional force.
pub fn sho_solve(
    osc: &DampedOscillator,
    x0: f64,
    v0: f64,
    t0: f64,
    force: Option<&(dyn Fn(f64) -> f64 + Sync)>,
    t: f64,
) -> Result<f64> {
    if t < t0 {
        return domain(format!("t = {t} precedes t0 = {t0}"));
    }
    let tau = t - t0;
    let g = sho_retarded_green(osc, tau);
    let dg = sho_retarded_green_dtau(osc, tau);
    let mut x = g * v0 + (2.0 * osc.gamma * g + dg) * x0;
    if let Some(f) = force {
        if tau > 0.0 {
            let r = quad::adaptive(|s| f(s) * sho_retarded_green(osc, t - s), t0, t, AdaptiveOptions::with_tol(1e-12))?;
            x += r.value;
        }
    }
    Ok(x)
}

/// `i omega j_l(omega r<) h_l^(1)(omega r>)`.
pub fn radial_green_helmholtz(ell: usize, omega: f64, r: f64, rp: f64) -> Result<Complex64> {
    if !(omega > 0.0 && r > 0.0 && rp > 0.0) {
        return domain("radial Helmholtz kernel needs omega, r, r' > 0");
    }
    let (rl, rg) = if r <= rp { (r, rp) } else { (rp, r) };
    let (j, _) = spherical_bessel_pair(ell, omega * rl)?;
    let (_, h) = spherical_bessel_pair(ell, omega * rg)?;
    Ok(Complex64::new(0.0, omega) * h * j)
}
