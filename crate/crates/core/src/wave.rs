//! Wave equation in Minkowski spacetime: world function, causal kernels in
//! every dimension, dimensional reduction, retarded convolution, Kirchhoff
//! evolution, frequency-space kernels and multipole radiation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, FieldError, Result};
use crate::fd::{self, Side};
use crate::odegreen::radial_green_helmholtz;
use crate::poisson::MultipoleSet;
use crate::quad::{QuadratureRule, SphereRule};
use crate::specialfn::{double_factorial, lm_index, sph_harm_all, spherical_bessel_j_seq};

const NULL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub x: Vec<f64>,
}

impl SpacetimeEvent {
    pub fn new(t: f64, x: &[f64]) -> Self {
        Self { t, x: x.to_vec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Separation {
    Timelike,
    Spacelike,
    Null,
}

/// `sigma = ((t - t')^2 - |x - x'|^2) / 2`.
pub fn synge(x: &SpacetimeEvent, xp: &SpacetimeEvent) -> Result<f64> {
    if x.x.len() != xp.x.len() {
        return Err(FieldError::DimensionMismatch { expected: x.x.len(), found: xp.x.len() });
    }
    let r2: f64 = x.x.iter().zip(&xp.x).map(|(a, b)| (a - b) * (a - b)).sum();
    let dt = x.t - xp.t;
    Ok(0.5 * (dt * dt - r2))
}

/// Sign of the world function, null within `1e-12`.
pub fn classify(x: &SpacetimeEvent, xp: &SpacetimeEvent) -> Result<Separation> {
    let s = synge(x, xp)?;
    Ok(if s.abs() <= NULL_TOL {
        Separation::Null
    } else if s > 0.0 {
        Separation::Timelike
    } else {
        Separation::Spacelike
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Retarded,
    Advanced,
}

/// Minkowski Green's function of `box psi = J` in `d` spacetime dimensions.
///
/// Built from the `d = 2` or `d = 3` kernel by `n` applications of
/// `(2 pi)^{-1} d/d sigma`. Even `d >= 4` is supported on the light cone as
/// `c delta^{(n-1)}(sigma)`; odd `d` carries an interior tail in `sigma^{-1/2-n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalKernel {
    d: usize,
    orientation: Orientation,
    n: usize,
}

pub fn causal_green(d: usize, orientation: Orientation) -> Result<CausalKernel> {
    if d < 2 {
        return domain("spacetime dimension must be at least 2");
    }
    Ok(CausalKernel { d, orientation, n: (d - 2) / 2 })
}

impl CausalKernel {
    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Number of `sigma` derivatives applied to the base kernel.
    pub fn derivative_count(&self) -> usize {
        self.n
    }

    pub fn is_even(&self) -> bool {
        self.d.is_multiple_of(2)
    }

    /// Order `k` of the `delta^{(k)}(sigma)` light-cone term, if any.
    pub fn lightcone_order(&self) -> Option<usize> {
        (self.is_even() && self.n >= 1).then(|| self.n - 1)
    }

    /// Coefficient of `Theta(+-dt) delta^{(n-1)}(sigma)`; zero without a light-cone term.
    pub fn lightcone_coefficient(&self) -> f64 {
        if self.lightcone_order().is_some() {
            (2.0 * PI).powi(-(self.n as i32)) / 2.0
        } else {
            0.0
        }
    }

    /// Coefficient of `Theta(+-dt) Theta(sigma)` at `sigma > 0`.
    pub fn tail(&self, sigma: f64) -> f64 {
        if sigma <= 0.0 {
            return 0.0;
        }
        if self.is_even() {
            return if self.n == 0 { 0.5 } else { 0.0 };
        }
        let mut c = (2.0 * PI).powi(-(self.n as i32)) / (2.0 * PI * 2f64.sqrt());
        for k in 0..self.n {
            c *= -0.5 - k as f64;
        }
        c * sigma.powf(-0.5 - self.n as f64)
    }

    /// One step of the recursion `G_{d+2} = -(2 pi R)^{-1} d/dR G_d`.
    pub fn step(&self) -> CausalKernel {
        CausalKernel { d: self.d + 2, orientation: self.orientation, n: self.n + 1 }
    }

    fn causal(&self, dt: f64) -> bool {
        match self.orientation {
            Orientation::Retarded => dt >= 0.0,
            Orientation::Advanced => dt <= 0.0,
        }
    }

    /// Pointwise value at time lag `dt` and spatial distance `r`. Light-cone
    /// points of kernels that are singular there are rejected.
    pub fn eval(&self, dt: f64, r: f64) -> Result<f64> {
        if r < 0.0 {
            return domain("distance must be non-negative");
        }
        if !self.causal(dt) {
            return Ok(0.0);
        }
        let sigma = 0.5 * (dt * dt - r * r);
        if sigma.abs() <= NULL_TOL * (1.0 + dt * dt) {
            if self.d == 2 {
                return Ok(0.5);
            }
            return Err(FieldError::Singular(format!("d = {} kernel is singular on the light cone", self.d)));
        }
        Ok(self.tail(sigma))
    }
}

/// Value of the `d`-dimensional kernel at `(dt, rho)` obtained by integrating
/// the `(d+1)`-dimensional `kernel` along a transverse line.
///
/// `d + 1 = 3` uses Gauss-Legendre after `w = W sin u`, which absorbs the
/// inverse square root at the cone. `d + 1 = 4` sums the two light-cone roots
/// of `delta(sigma)`. Higher orders are not integrable pointwise.
pub fn reduce_dimension(kernel: &CausalKernel, dt: f64, rho: f64) -> Result<f64> {
    if rho < 0.0 {
        return domain("rho must be non-negative");
    }
    if !kernel.causal(dt) {
        return Ok(0.0);
    }
    let w2 = dt * dt - rho * rho;
    match kernel.d {
        3 => {
            if w2 <= 0.0 {
                return Ok(0.0);
            }
            let big_w = w2.sqrt();
            let rule = QuadratureRule::gauss_legendre(64);
            let mut acc = 0.0;
            for (&u, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let u = 0.5 * PI * u;
                let w = big_w * u.sin();
                acc += wt * kernel.eval(dt, (rho * rho + w * w).sqrt())? * big_w * u.cos();
            }
            Ok(0.5 * PI * acc)
        }
        4 => {
            if w2 <= 0.0 {
                return Ok(0.0);
            }
            // roots w = +-W with |d sigma / d w| = W
            Ok(2.0 * kernel.lightcone_coefficient() / w2.sqrt())
        }
        d => Err(FieldError::UnsupportedOrder(format!("line reduction from d = {d} needs a distributional integral"))),
    }
}

pub type SourceFn = dyn Fn(f64, &[f64; 3]) -> f64 + Sync;

/// Quadrature controls for [`convolve_retarded_4d`]. The source must vanish
/// outside the ball `|x' - center| <= support_radius`.
#[derive(Debug, Clone, Copy)]
pub struct ConvolveOptions {
    pub center: [f64; 3],
    pub support_radius: f64,
    pub radial_panels: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Accepted difference between the full and half radial resolution.
    pub tol: f64,
}

impl Default for ConvolveOptions {
    fn default() -> Self {
        Self { center: [0.0; 3], support_radius: 1.0, radial_panels: 32, n_theta: 32, n_phi: 64, tol: 1e-6 }
    }
}

fn radial_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let rule = QuadratureRule::gauss_legendre(8);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * 8);
    for p in 0..panels {
        let (x, w) = rule.mapped(a + p as f64 * h, a + (p + 1) as f64 * h);
        out.extend(x.into_iter().zip(w));
    }
    out
}

fn convolve_once(source: &SourceFn, t: f64, x: &[f64; 3], o: &ConvolveOptions, panels: usize) -> f64 {
    let sphere = SphereRule::new(o.n_theta, o.n_phi).points();
    let c = o.center;
    let dc = ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2)).sqrt();
    let outside = dc > o.support_radius;
    let radial = if outside { radial_nodes(0.0, o.support_radius, panels) } else { radial_nodes(0.0, dc + o.support_radius, panels) };
    let shells: Vec<f64> = radial
        .par_iter()
        .map(|&(s, ws)| {
            let mut acc = 0.0;
            for &(th, ph, w) in &sphere {
                let n = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                if outside {
                    // source-centred: r'^2 J(t - R, x') / (4 pi R)
                    let xp = [c[0] + s * n[0], c[1] + s * n[1], c[2] + s * n[2]];
                    let rr = ((x[0] - xp[0]).powi(2) + (x[1] - xp[1]).powi(2) + (x[2] - xp[2]).powi(2)).sqrt();
                    acc += w * s * s * source(t - rr, &xp) / (4.0 * PI * rr);
                } else {
                    // observer-centred: s J(t - s, x + s n) / (4 pi)
                    let xp = [x[0] + s * n[0], x[1] + s * n[1], x[2] + s * n[2]];
                    acc += w * s * source(t - s, &xp) / (4.0 * PI);
                }
            }
            acc * ws
        })
        .collect();
    shells.iter().sum()
}

/// `psi(t, x) = int d^3x' J(t - |x - x'|, x') / (4 pi |x - x'|)`.
///
/// Spherical coordinates are centred on the source when the observer lies
/// outside its support and on the observer otherwise, so the `1/R`
/// singularity is always absorbed by the Jacobian.
pub fn convolve_retarded_4d(source: &SourceFn, t: f64, x: [f64; 3], opts: &ConvolveOptions) -> Result<f64> {
    if !(opts.support_radius > 0.0) || opts.radial_panels < 2 {
        return Err(FieldError::Configuration("need a positive support radius and at least two radial panels".into()));
    }
    let fine = convolve_once(source, t, &x, opts, opts.radial_panels);
    let coarse = convolve_once(source, t, &x, opts, opts.radial_panels / 2);
    let est = (fine - coarse).abs();
    if est > opts.tol * fine.abs().max(1.0) {
        return Err(FieldError::Tolerance { tol: opts.tol, estimate: est });
    }
    Ok(fine)
}

pub type InitialData = dyn Fn(&[f64; 3]) -> Complex64 + Sync;

/// Kirchhoff evolution from `t0` to `t` with the default 64 x 128 sphere rule.
pub fn kirchhoff_evolve_4d(psi0: &InitialData, dpsi0: &InitialData, t0: f64, t: f64, x: [f64; 3]) -> Result<Complex64> {
    kirchhoff_evolve_4d_with_rule(psi0, dpsi0, t0, t, x, &SphereRule::default())
}

/// `psi = tau <dpsi0> + <psi0> + tau <n . grad psi0>` with `<.>` the mean over
/// the sphere `|x' - x| = tau = t - t0`. The radial derivative uses a
/// fourth-order stencil with step `1e-3 tau`.
pub fn kirchhoff_evolve_4d_with_rule(
    psi0: &InitialData,
    dpsi0: &InitialData,
    t0: f64,
    t: f64,
    x: [f64; 3],
    rule: &SphereRule,
) -> Result<Complex64> {
    if !(t > t0) {
        return domain("Kirchhoff evolution requires t > t0");
    }
    let tau = t - t0;
    let h = 1e-3 * tau;
    let pts = rule.points();
    let terms: Vec<Complex64> = pts
        .par_iter()
        .map(|&(th, ph, w)| {
            let n = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            let at = |s: f64| psi0(&[x[0] + s * n[0], x[1] + s * n[1], x[2] + s * n[2]]);
            let on = [x[0] + tau * n[0], x[1] + tau * n[1], x[2] + tau * n[2]];
            let dn = (at(tau - 2.0 * h) - at(tau - h) * 8.0 + at(tau + h) * 8.0 - at(tau + 2.0 * h)) / (12.0 * h);
            (dpsi0(&on) * tau + at(tau) + dn * tau) * w
        })
        .collect();
    Ok(terms.iter().sum::<Complex64>() / (4.0 * PI))
}

/// `psi(t, k) = psi0(k) cos(|k| t) + dpsi0(k) sin(|k| t) / |k|`.
pub fn homogeneous_fourier_evolve<F, G>(psi0_hat: F, dpsi0_hat: G, k: [f64; 3], t: f64) -> Complex64
where
    F: Fn([f64; 3]) -> Complex64,
    G: Fn([f64; 3]) -> Complex64,
{
    let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    evolve_mode(psi0_hat(k), dpsi0_hat(k), kk, t)
}

fn evolve_mode(a: Complex64, b: Complex64, kk: f64, t: f64) -> Complex64 {
    let x = kk * t;
    let sinc = if x.abs() < 1e-4 { t * (1.0 - x * x / 6.0 + x.powi(4) / 120.0) } else { x.sin() / kk };
    a * x.cos() + b * sinc
}

/// Spherically symmetric data: `psi(t, r) = (2 pi^2 r)^{-1} int k sin(k r) psi_hat(t, k) dk`
/// with the radial transforms supplied as functions of `|k|`.
pub fn radial_fourier_evolve<F, G>(psi0_hat: F, dpsi0_hat: G, t: f64, r: f64, kmax: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(r > 0.0) {
        return domain("radius must be positive");
    }
    let f = |k: f64| {
        let v = evolve_mode(Complex64::new(psi0_hat(k), 0.0), Complex64::new(dpsi0_hat(k), 0.0), k, t);
        k * (k * r).sin() * v.re
    };
    let panels = (kmax * (r + t.abs()) / 2.0).ceil().max(16.0) as usize;
    Ok(crate::quad::composite_gl(f, 0.0, kmax, 16, panels) / (2.0 * PI * PI * r))
}

/// `exp(i omega r) / (4 pi r)`.
pub fn freq_green_4d(omega: f64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return domain("r must be positive");
    }
    Ok(Complex64::from_polar(1.0 / (4.0 * PI * r), omega * r))
}

fn to_spherical(x: &[f64; 3]) -> (f64, f64, f64) {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let th = if r == 0.0 { 0.0 } else { (x[2] / r).clamp(-1.0, 1.0).acos() };
    (r, th, x[1].atan2(x[0]))
}

/// `sum_l i omega j_l(omega r<) h_l(omega r>) sum_m Y_l^m(x^) conj(Y_l^m(x'^))`.
pub fn freq_green_modesum(omega: f64, x: [f64; 3], xp: [f64; 3], lmax: usize) -> Result<Complex64> {
    let (r, th, ph) = to_spherical(&x);
    let (rp, thp, php) = to_spherical(&xp);
    let y = sph_harm_all(lmax, th, ph);
    let yp = sph_harm_all(lmax, thp, php);
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..=lmax {
        let radial = radial_green_helmholtz(l, omega, r, rp)?;
        let mut ang = Complex64::new(0.0, 0.0);
        for m in -(l as i64)..=l as i64 {
            let i = lm_index(l, m);
            ang += y[i] * yp[i].conj();
        }
        acc += radial * ang;
    }
    Ok(acc)
}

pub type ProfileFn = Arc<dyn Fn(&[f64; 3]) -> Complex64 + Send + Sync>;

/// Monochromatic source `Re[J(x) exp(-i omega t)]`.
#[derive(Clone)]
pub struct FrequencyProfile {
    pub omega: f64,
    pub profile: ProfileFn,
}

/// `Omega_l^m = (2l+1) (-i)^l int d^3x j_l(omega r) conj(Y_l^m) J(x)` over the
/// ball of `support_radius`, with `radial` Gauss-Legendre panels.
pub fn frequency_multipoles(profile: &FrequencyProfile, lmax: usize, support_radius: f64, rule: &SphereRule, radial: usize) -> Result<MultipoleSet> {
    if !(support_radius > 0.0) {
        return domain("support radius must be positive");
    }
    let nodes = radial_nodes(0.0, support_radius, radial.max(1));
    let pts = rule.points();
    let rows: Vec<Vec<Complex64>> = pts
        .par_iter()
        .map(|&(th, ph, w)| {
            let n = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            let ys = sph_harm_all(lmax, th, ph);
            let mut row = vec![Complex64::new(0.0, 0.0); ys.len()];
            for &(r, wr) in &nodes {
                let js = spherical_bessel_j_seq(lmax, profile.omega * r);
                let j = (profile.profile)(&[r * n[0], r * n[1], r * n[2]]) * (w * wr * r * r);
                for l in 0..=lmax {
                    for m in -(l as i64)..=l as i64 {
                        let i = lm_index(l, m);
                        row[i] += ys[i].conj() * j * js[l];
                    }
                }
            }
            row
        })
        .collect();
    let mut set = MultipoleSet::zeros(lmax);
    for l in 0..=lmax {
        let pref = Complex64::new(0.0, -1.0).powu(l as u32) * (2 * l + 1) as f64;
        for m in -(l as i64)..=l as i64 {
            let i = lm_index(l, m);
            let s: Complex64 = rows.iter().map(|row| row[i]).sum();
            set.set(l, m, s * pref);
        }
    }
    set.source_radius = Some(support_radius);
    Ok(set)
}

/// Far-zone field `exp(i omega r)/r sum Y_l^m Omega_l^m / (2l+1)`.
pub fn far_zone_frequency_field(omega: f64, moments: &MultipoleSet, x: [f64; 3]) -> Result<Complex64> {
    let (r, th, ph) = to_spherical(&x);
    if let Some(rs) = moments.source_radius {
        if r <= rs {
            return Err(FieldError::OutOfRegion(format!("observer at r = {r} inside source radius {rs}")));
        }
    }
    let ys = sph_harm_all(moments.lmax, th, ph);
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..=moments.lmax {
        for m in -(l as i64)..=l as i64 {
            acc += ys[lm_index(l, m)] * moments.get(l, m) / (2 * l + 1) as f64;
        }
    }
    Ok(acc * Complex64::from_polar(1.0 / r, omega * r))
}

pub type MomentFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Time series `rho_l^m(t)` of one static-type moment.
#[derive(Clone)]
pub struct MomentTerm {
    pub l: usize,
    pub m: i64,
    pub series: MomentFn,
}

fn time_derivative(f: &MomentFn, t: f64, order: usize) -> Complex64 {
    if order == 0 {
        return f(t);
    }
    let h = 1e-3 * (1u32 << order.min(4)) as f64;
    let re = fd::derivative(|s| f(s).re, t, order, h, Side::Both);
    let im = fd::derivative(|s| f(s).im, t, order, h, Side::Both);
    Complex64::new(re, im)
}

/// Slow-motion far field `(1/r) sum Y_l^m / (2l+1)!! d^l rho_l^m(t - r)/dt^l`,
/// real part. Time derivatives use finite differences.
pub fn multipole_radiation(moments: &[MomentTerm], source_radius: f64, t: f64, x: [f64; 3]) -> Result<f64> {
    let (r, th, ph) = to_spherical(&x);
    if r <= source_radius {
        return Err(FieldError::OutOfRegion(format!("observer at r = {r} inside source radius {source_radius}")));
    }
    let lmax = moments.iter().map(|m| m.l).max().unwrap_or(0);
    let ys = sph_harm_all(lmax, th, ph);
    let mut acc = Complex64::new(0.0, 0.0);
    for term in moments {
        if term.m.unsigned_abs() as usize > term.l {
            return domain(format!("|m| > l in moment ({}, {})", term.l, term.m));
        }
        let d = time_derivative(&term.series, t - r, term.l);
        acc += ys[lm_index(term.l, term.m)] * d / double_factorial(2 * term.l as i64 + 1);
    }
    Ok(acc.re / r)
}

fn second_derivative(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    fd::derivative(f, t, 2, 1e-3, Side::Both)
}

/// Radiation-zone field `E^i = -(4 pi |x|)^{-1} d^2 I^i/dt^2 (t - |x|)` of a dipole moment `I(t)`.
pub fn dipole_field<F>(dipole: F, t: f64, x: [f64; 3]) -> Result<[f64; 3]>
where
    F: Fn(f64) -> [f64; 3],
{
    let (r, _, _) = to_spherical(&x);
    if !(r > 0.0) {
        return domain("observer must be away from the origin");
    }
    let mut e = [0.0; 3];
    for (i, ei) in e.iter_mut().enumerate() {
        *ei = -second_derivative(|s| dipole(s)[i], t - r) / (4.0 * PI * r);
    }
    Ok(e)
}

/// Trace-reversed metric perturbation `hbar^{ij} = -(2 G / |x|) d^2 I^{ij}/dt^2 (t - |x|)`.
pub fn quadrupole_strain<F>(quadrupole: F, g_newton: f64, t: f64, x: [f64; 3]) -> Result<[[f64; 3]; 3]>
where
    F: Fn(f64) -> [[f64; 3]; 3],
{
    let (r, _, _) = to_spherical(&x);
    if !(r > 0.0) {
        return domain("observer must be away from the origin");
    }
    let mut h = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            h[i][j] = -2.0 * g_newton / r * second_derivative(|s| quadrupole(s)[i][j], t - r);
        }
    }
    Ok(h)
}

/// Real wave field on a periodic square, evolved exactly mode by mode and
/// sampled on an `n x n` grid. The Nyquist row and column are discarded so
/// sampled gradients are unambiguous.
pub struct PeriodicWave2d {
    length: f64,
    n: usize,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    twiddle: Vec<Complex64>,
}

impl PeriodicWave2d {
    pub fn new<F, G>(length: f64, n: usize, psi0: F, dpsi0: G) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64,
        G: Fn(f64, f64) -> f64,
    {
        if !(length > 0.0) || n < 4 || !n.is_multiple_of(2) {
            return domain("need length > 0 and an even grid of at least 4");
        }
        let h = length / n as f64;
        let twiddle: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
        let sample = |f: &dyn Fn(f64, f64) -> f64| -> Vec<Complex64> {
            let mut g = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] = Complex64::new(f(i as f64 * h, j as f64 * h), 0.0);
                }
            }
            let mut c = dft2(&g, n, &twiddle, false);
            let scale = 1.0 / (n * n) as f64;
            for (idx, v) in c.iter_mut().enumerate() {
                if idx / n == n / 2 || idx % n == n / 2 {
                    *v = Complex64::new(0.0, 0.0);
                } else {
                    *v *= scale;
                }
            }
            c
        };
        let a = sample(&psi0);
        let b = sample(&dpsi0);
        Ok(Self { length, n, a, b, twiddle })
    }

    fn wavenumber(&self, idx: usize) -> f64 {
        let s = if idx > self.n / 2 { idx as f64 - self.n as f64 } else { idx as f64 };
        2.0 * PI * s / self.length
    }

    /// `int (psi_t^2 + |grad psi|^2) dA` by the grid sum at time `t`.
    pub fn energy(&self, t: f64) -> f64 {
        let n = self.n;
        let mut dt = vec![Complex64::new(0.0, 0.0); n * n];
        let mut dx = dt.clone();
        let mut dy = dt.clone();
        for p in 0..n {
            for q in 0..n {
                let i = p * n + q;
                let (kx, ky) = (self.wavenumber(p), self.wavenumber(q));
                let k = (kx * kx + ky * ky).sqrt();
                let psi = evolve_mode(self.a[i], self.b[i], k, t);
                dt[i] = -self.a[i] * k * (k * t).sin() + self.b[i] * (k * t).cos();
                dx[i] = psi * Complex64::new(0.0, kx);
                dy[i] = psi * Complex64::new(0.0, ky);
            }
        }
        let (ft, fx, fy) = (dft2(&dt, n, &self.twiddle, true), dft2(&dx, n, &self.twiddle, true), dft2(&dy, n, &self.twiddle, true));
        let cell = (self.length / n as f64).powi(2);
        let mut e = 0.0;
        for i in 0..n * n {
            e += ft[i].re * ft[i].re + fx[i].re * fx[i].re + fy[i].re * fy[i].re;
        }
        e * cell
    }
}

/// Separable unnormalized 2D DFT; `inverse` selects the `+i` sign.
fn dft2(g: &[Complex64], n: usize, tw: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let w = |k: usize| if inverse { tw[k % n] } else { tw[k % n].conj() };
    let mut rows = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for q in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += g[i * n + j] * w(q * j);
            }
            rows[i * n + q] = acc;
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for p in 0..n {
        for q in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += rows[i * n + q] * w(p * i);
            }
            out[p * n + q] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: f64, x: &[f64]) -> SpacetimeEvent {
        SpacetimeEvent::new(t, x)
    }

    #[test]
    fn synge_examples() {
        let o = ev(0.0, &[0.0, 0.0, 0.0]);
        assert_eq!(synge(&o, &o).unwrap(), 0.0);
        assert_eq!(synge(&ev(1.0, &[0.0; 3]), &o).unwrap(), 0.5);
        assert_eq!(classify(&ev(1.0, &[1.0, 0.0, 0.0]), &o).unwrap(), Separation::Null);
        assert_eq!(classify(&ev(0.5, &[1.0, 0.0, 0.0]), &o).unwrap(), Separation::Spacelike);
        assert!(synge(&ev(0.0, &[0.0; 2]), &o).is_err());
    }

    #[test]
    fn low_dimension_kernels() {
        let g2 = causal_green(2, Orientation::Retarded).unwrap();
        assert_eq!(g2.eval(1.0, 0.3).unwrap(), 0.5);
        assert_eq!(g2.eval(-1.0, 0.3).unwrap(), 0.0);
        let g3 = causal_green(3, Orientation::Retarded).unwrap();
        assert!((g3.eval(2.0, 1.0).unwrap() - 1.0 / (2.0 * PI * 3f64.sqrt())).abs() < 1e-15);
        let g4 = causal_green(4, Orientation::Retarded).unwrap();
        assert_eq!(g4.eval(2.0, 1.0).unwrap(), 0.0);
        assert_eq!(g4.lightcone_order(), Some(0));
        assert!((g4.lightcone_coefficient() - 1.0 / (4.0 * PI)).abs() < 1e-17);
        assert_eq!(g2.step(), g4);
        assert!(causal_green(1, Orientation::Retarded).is_err());
        let adv = causal_green(3, Orientation::Advanced).unwrap();
        assert_eq!(adv.eval(2.0, 1.0).unwrap(), 0.0);
        assert!(adv.eval(-2.0, 1.0).unwrap() > 0.0);
    }

    #[test]
    fn line_reduction() {
        let g3 = causal_green(3, Orientation::Retarded).unwrap();
        assert!((reduce_dimension(&g3, 1.0, 0.5).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(reduce_dimension(&g3, 1.0, 1.5).unwrap(), 0.0);
        let g4 = causal_green(4, Orientation::Retarded).unwrap();
        let want = g3.eval(2.0, 0.7).unwrap();
        assert!((reduce_dimension(&g4, 2.0, 0.7).unwrap() - want).abs() < 1e-15);
        let g5 = causal_green(5, Orientation::Retarded).unwrap();
        assert!(matches!(reduce_dimension(&g5, 2.0, 0.7), Err(FieldError::UnsupportedOrder(_))));
    }

    #[test]
    fn fourier_mode_limits() {
        let a = |_k: [f64; 3]| Complex64::new(1.5, -0.5);
        let b = |_k: [f64; 3]| Complex64::new(0.25, 2.0);
        assert_eq!(homogeneous_fourier_evolve(a, b, [1.0, 2.0, 0.0], 0.0), a([0.0; 3]));
        let small = homogeneous_fourier_evolve(a, b, [1e-9, 0.0, 0.0], 0.8);
        assert!((small - (a([0.0; 3]) + b([0.0; 3]) * 0.8)).norm() < 1e-12);
    }

    #[test]
    fn freq_green_static_limit() {
        assert_eq!(freq_green_4d(0.0, 2.0).unwrap(), Complex64::new(1.0 / (8.0 * PI), 0.0));
        assert!((freq_green_4d(3.7, 2.0).unwrap().norm() - 1.0 / (8.0 * PI)).abs() < 1e-16);
        assert!(freq_green_4d(1.0, 0.0).is_err());
    }

    #[test]
    fn periodic_energy_constant() {
        let w = PeriodicWave2d::new(
            2.0 * PI,
            16,
            |x, y| (x.sin() * (2.0 * y).cos()) + 0.3 * (3.0 * x + y).cos(),
            |x, y| 0.5 * (x + y).sin(),
        )
        .unwrap();
        let e0 = w.energy(0.0);
        for k in 1..20 {
            assert!((w.energy(0.37 * k as f64) - e0).abs() < 1e-10 * e0);
        }
    }
}
