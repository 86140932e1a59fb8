//! Orthonormal Laplacian eigenbases, Fourier series, plane-wave expansions
//! and the Rayleigh quotient.
//!
//! Points are Cartesian coordinates for boxes, `[phi]` for the unit circle
//! and `[theta, phi]` for the unit 2-sphere.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use smallvec::{smallvec, SmallVec};

use crate::error::{domain, FieldError, Result};
use crate::fd;
use crate::quad::{self, AdaptiveOptions, QuadratureRule, SphereRule};
use crate::specialfn::{cyl_bessel_j_seq, legendre_seq, lm_index, sph_harm_all, spherical_bessel_j_seq};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    /// Box with Dirichlet walls; one length per axis.
    IntervalDirichlet,
    /// Box with periodic identification; one length per axis.
    PeriodicBox,
    /// Unit circle.
    Circle,
    /// Unit 2-sphere.
    TwoSphere,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub lengths: Vec<f64>,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, lengths: Vec<f64>) -> Result<Self> {
        if lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return domain("domain lengths must be positive and finite");
        }
        match kind {
            DomainKind::IntervalDirichlet | DomainKind::PeriodicBox if lengths.is_empty() => {
                domain("box domains need at least one edge length")
            }
            DomainKind::Circle | DomainKind::TwoSphere if lengths.len() != 1 || lengths[0] != 1.0 => {
                domain("circle and sphere domains have unit radius")
            }
            _ => Ok(Self { kind, lengths }),
        }
    }

    pub fn dirichlet_box(lengths: &[f64]) -> Result<Self> {
        Self::new(DomainKind::IntervalDirichlet, lengths.to_vec())
    }

    pub fn periodic_box(lengths: &[f64]) -> Result<Self> {
        Self::new(DomainKind::PeriodicBox, lengths.to_vec())
    }

    pub fn circle() -> Self {
        Self { kind: DomainKind::Circle, lengths: vec![1.0] }
    }

    pub fn two_sphere() -> Self {
        Self { kind: DomainKind::TwoSphere, lengths: vec![1.0] }
    }

    /// Number of coordinates of a point.
    pub fn dimension(&self) -> usize {
        match self.kind {
            DomainKind::IntervalDirichlet | DomainKind::PeriodicBox => self.lengths.len(),
            DomainKind::Circle => 1,
            DomainKind::TwoSphere => 2,
        }
    }
}

pub type Label = SmallVec<[i64; 3]>;

#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub label: Label,
    pub eigenvalue: f64,
}

/// Immutable family of orthonormal eigenfunctions of the negative Laplacian.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    domain: DomainSpec,
    modes: Vec<Mode>,
}

fn lexicographic(ranges: &[(i64, i64)]) -> Vec<Label> {
    let mut out: Vec<Label> = vec![SmallVec::new()];
    for &(lo, hi) in ranges {
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1) as usize);
        for prefix in &out {
            for n in lo..=hi {
                let mut l = prefix.clone();
                l.push(n);
                next.push(l);
            }
        }
        out = next;
    }
    out
}

fn sorted(mut modes: Vec<Mode>) -> Vec<Mode> {
    // stable: degenerate eigenvalues keep lexicographic label order
    modes.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    modes
}

/// Dirichlet box modes with `n^i` in `1..=nmax` on every axis.
pub fn box_modes(lengths: &[f64], nmax: usize) -> Result<ModeBasis> {
    box_modes_with_counts(lengths, &vec![nmax; lengths.len()])
}

/// Dirichlet box modes with an independent cutoff per axis.
pub fn box_modes_with_counts(lengths: &[f64], counts: &[usize]) -> Result<ModeBasis> {
    let domain_spec = DomainSpec::dirichlet_box(lengths)?;
    if counts.len() != lengths.len() || counts.contains(&0) {
        return domain("need one positive mode count per axis");
    }
    let ranges: Vec<(i64, i64)> = counts.iter().map(|&c| (1, c as i64)).collect();
    let modes = lexicographic(&ranges)
        .into_iter()
        .map(|label| {
            let eigenvalue = label.iter().zip(lengths).map(|(&n, &l)| (PI * n as f64 / l).powi(2)).sum();
            Mode { label, eigenvalue }
        })
        .collect();
    Ok(ModeBasis { domain: domain_spec, modes: sorted(modes) })
}

/// Periodic box modes with labels in `-nmax..=nmax` on every axis.
pub fn periodic_modes(lengths: &[f64], nmax: usize) -> Result<ModeBasis> {
    let domain_spec = DomainSpec::periodic_box(lengths)?;
    let n = nmax as i64;
    let ranges = vec![(-n, n); lengths.len()];
    let modes = lexicographic(&ranges)
        .into_iter()
        .map(|label| {
            let eigenvalue = label.iter().zip(lengths).map(|(&n, &l)| (2.0 * PI * n as f64 / l).powi(2)).sum();
            Mode { label, eigenvalue }
        })
        .collect();
    Ok(ModeBasis { domain: domain_spec, modes: sorted(modes) })
}

/// Unit-circle modes `e^{i m phi} / sqrt(2 pi)` with `|m| <= mmax`.
pub fn circle_modes(mmax: usize) -> ModeBasis {
    let n = mmax as i64;
    let modes = (-n..=n).map(|m| Mode { label: smallvec![m], eigenvalue: (m * m) as f64 }).collect();
    ModeBasis { domain: DomainSpec::circle(), modes: sorted(modes) }
}

/// Spherical harmonics `Y_l^m` with `l <= lmax`, eigenvalue `l (l + 1)`.
pub fn sphere_modes(lmax: usize) -> ModeBasis {
    let mut modes = Vec::with_capacity((lmax + 1) * (lmax + 1));
    for l in 0..=lmax as i64 {
        for m in -l..=l {
            modes.push(Mode { label: smallvec![l, m], eigenvalue: (l * (l + 1)) as f64 });
        }
    }
    ModeBasis { domain: DomainSpec::two_sphere(), modes }
}

impl ModeBasis {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Largest label magnitude along each coordinate among the first `count` modes.
    fn max_labels(&self, count: usize) -> Vec<i64> {
        let dim = self.modes.first().map_or(0, |m| m.label.len());
        let mut out = vec![0; dim];
        for m in self.modes.iter().take(count) {
            for (o, &n) in out.iter_mut().zip(&m.label) {
                *o = (*o).max(n.abs());
            }
        }
        out
    }

    /// Value of `mode` at `x`.
    pub fn eval(&self, mode: &Mode, x: &[f64]) -> Complex64 {
        let l = &self.domain.lengths;
        match self.domain.kind {
            DomainKind::IntervalDirichlet => Complex64::new(dirichlet_value(&mode.label, l, x), 0.0),
            DomainKind::PeriodicBox => {
                let mut phase = 0.0;
                let mut norm = 1.0;
                for ((&n, &len), &xi) in mode.label.iter().zip(l).zip(x) {
                    phase += 2.0 * PI * n as f64 * xi / len;
                    norm /= len.sqrt();
                }
                Complex64::from_polar(norm, phase)
            }
            DomainKind::Circle => Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), mode.label[0] as f64 * x[0]),
            DomainKind::TwoSphere => {
                let (ell, m) = (mode.label[0] as usize, mode.label[1]);
                sph_harm_all(ell, x[0], x[1])[lm_index(ell, m)]
            }
        }
    }

    /// Real part of the mode value; exact for Dirichlet boxes.
    pub fn eval_real(&self, mode: &Mode, x: &[f64]) -> f64 {
        match self.domain.kind {
            DomainKind::IntervalDirichlet => dirichlet_value(&mode.label, &self.domain.lengths, x),
            _ => self.eval(mode, x).re,
        }
    }

    /// Coordinate gradient of `mode` at `x` (analytic for boxes and circle,
    /// fourth-order differences on the sphere).
    pub fn gradient(&self, mode: &Mode, x: &[f64]) -> SmallVec<[Complex64; 3]> {
        let l = &self.domain.lengths;
        match self.domain.kind {
            DomainKind::IntervalDirichlet => {
                let d = l.len();
                let mut g: SmallVec<[Complex64; 3]> = smallvec![Complex64::new(0.0, 0.0); d];
                for (i, gi) in g.iter_mut().enumerate() {
                    let mut prod = 1.0;
                    for j in 0..d {
                        let k = PI * mode.label[j] as f64 / l[j];
                        let amp = (2.0 / l[j]).sqrt();
                        prod *= if i == j { amp * k * (k * x[j]).cos() } else { amp * (k * x[j]).sin() };
                    }
                    *gi = Complex64::new(prod, 0.0);
                }
                g
            }
            DomainKind::PeriodicBox => {
                let v = self.eval(mode, x);
                mode.label
                    .iter()
                    .zip(l)
                    .map(|(&n, &len)| v * Complex64::new(0.0, 2.0 * PI * n as f64 / len))
                    .collect()
            }
            DomainKind::Circle => {
                let v = self.eval(mode, x);
                smallvec![v * Complex64::new(0.0, mode.label[0] as f64)]
            }
            DomainKind::TwoSphere => {
                let h = 1e-4;
                let ft = |t: f64| self.eval(mode, &[t, x[1]]);
                let fp = |p: f64| self.eval(mode, &[x[0], p]);
                let dt = (ft(x[0] - 2.0 * h) - ft(x[0] - h) * 8.0 + ft(x[0] + h) * 8.0 - ft(x[0] + 2.0 * h))
                    * (1.0 / (12.0 * h));
                let dp = Complex64::new(0.0, mode.label[1] as f64) * fp(x[1]);
                smallvec![dt, dp]
            }
        }
    }

    /// Inner products `<psi_lambda | f>` for the first `limit` modes, by a
    /// product quadrature sized to resolve the highest label involved.
    pub fn project<F>(&self, f: F, limit: usize) -> Vec<Complex64>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let count = limit.min(self.modes.len());
        let modes = &self.modes[..count];
        let maxl = self.max_labels(count);
        match self.domain.kind {
            DomainKind::IntervalDirichlet | DomainKind::PeriodicBox => {
                let periodic = self.domain.kind == DomainKind::PeriodicBox;
                let axes: Vec<(Vec<f64>, Vec<f64>)> = self
                    .domain
                    .lengths
                    .iter()
                    .zip(&maxl)
                    .map(|(&len, &n)| {
                        if periodic {
                            let r = QuadratureRule::trapezoid_periodic(2 * n as usize + 16, len);
                            (r.nodes, r.weights)
                        } else {
                            gl_panels(0.0, len, n as usize)
                        }
                    })
                    .collect();
                let grid = tensor_grid(&axes);
                let values: Vec<Complex64> = grid.par_iter().map(|(p, w)| f(p) * *w).collect();
                modes
                    .par_iter()
                    .map(|m| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for ((p, _), v) in grid.iter().zip(&values) {
                            acc += self.eval(m, p).conj() * v;
                        }
                        acc
                    })
                    .collect()
            }
            DomainKind::Circle => {
                let r = QuadratureRule::trapezoid_periodic(2 * maxl[0] as usize + 16, 2.0 * PI);
                let values: Vec<Complex64> = r.nodes.iter().zip(&r.weights).map(|(&p, &w)| f(&[p]) * w).collect();
                modes
                    .iter()
                    .map(|m| r.nodes.iter().zip(&values).map(|(&p, v)| self.eval(m, &[p]).conj() * v).sum())
                    .collect()
            }
            DomainKind::TwoSphere => {
                let lmax = maxl[0] as usize;
                let rule = SphereRule::new(lmax + 24, 2 * lmax + 48);
                let pts = rule.points();
                let partial: Vec<Vec<Complex64>> = pts
                    .par_iter()
                    .map(|&(t, p, w)| {
                        let fv = f(&[t, p]) * w;
                        let ys = sph_harm_all(lmax, t, p);
                        modes.iter().map(|m| ys[lm_index(m.label[0] as usize, m.label[1])].conj() * fv).collect()
                    })
                    .collect();
                let mut out = vec![Complex64::new(0.0, 0.0); count];
                for row in &partial {
                    for (o, v) in out.iter_mut().zip(row) {
                        *o += v;
                    }
                }
                out
            }
        }
    }
}

fn dirichlet_value(label: &[i64], lengths: &[f64], x: &[f64]) -> f64 {
    let mut v = 1.0;
    for ((&n, &len), &xi) in label.iter().zip(lengths).zip(x) {
        v *= (2.0 / len).sqrt() * (PI * n as f64 * xi / len).sin();
    }
    v
}

/// Composite 16-point Gauss-Legendre nodes on [a, b] resolving `sin(n pi x / L)`.
pub(crate) fn gl_panels(a: f64, b: f64, max_wavenumber: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = QuadratureRule::gauss_legendre(16);
    let panels = (max_wavenumber / 4 + 2).max(2);
    let step = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(16 * panels);
    let mut ws = Vec::with_capacity(16 * panels);
    for k in 0..panels {
        let (x, w) = rule.mapped(a + k as f64 * step, a + (k + 1) as f64 * step);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

pub(crate) fn tensor_grid(axes: &[(Vec<f64>, Vec<f64>)]) -> Vec<(SmallVec<[f64; 3]>, f64)> {
    let mut out: Vec<(SmallVec<[f64; 3]>, f64)> = vec![(SmallVec::new(), 1.0)];
    for (xs, ws) in axes {
        let mut next = Vec::with_capacity(out.len() * xs.len());
        for (p, w) in &out {
            for (x, wx) in xs.iter().zip(ws) {
                let mut q = p.clone();
                q.push(*x);
                next.push((q, w * wx));
            }
        }
        out = next;
    }
    out
}

/// Coefficients `C_n = (1/L) int_0^L f(x) e^{-i 2 pi n x / L} dx` for `|n| <= nmax`.
#[derive(Debug, Clone)]
pub struct FourierSeries {
    pub length: f64,
    pub nmax: usize,
    coeffs: Vec<Complex64>,
    /// Set when quadrature had to refine to its depth limit; without supplied
    /// breakpoints this indicates a jump and O(1/n) coefficient decay.
    pub suspected_discontinuity: bool,
}

impl FourierSeries {
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs[(n + self.nmax as i64) as usize]
    }

    /// Truncated sum `f_N(x) = sum_{|n| <= N} C_n e^{i 2 pi n x / L}`.
    pub fn partial_sum(&self, x: f64, n: usize) -> Complex64 {
        let n = n.min(self.nmax) as i64;
        (-n..=n)
            .map(|k| self.coeff(k) * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x / self.length))
            .sum()
    }
}

/// Fourier coefficients of `f` over one period [0, L). Supplying the jump
/// locations in `breakpoints` keeps the quadrature exact-to-tolerance there.
pub fn fourier_coeffs<F>(f: F, length: f64, nmax: usize, breakpoints: &[f64], tol: f64) -> Result<FourierSeries>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if !(length > 0.0) {
        return domain("period must be positive");
    }
    let n = nmax as i64;
    // e^{-i w x} at a rounded node carries a phase error near |w| L eps, which
    // bounds the attainable absolute accuracy of the high coefficients
    let floor = 16.0 * f64::EPSILON * 2.0 * PI * (1 + nmax) as f64;
    let opts = AdaptiveOptions { rel_tol: tol, abs_tol: (tol * 1e-2).max(floor), initial_panels: 16 + 2 * nmax, ..Default::default() };
    let results: Vec<Result<quad::QuadResult<Complex64>>> = (-n..=n)
        .into_par_iter()
        .map(|k| {
            let w = 2.0 * PI * k as f64 / length;
            quad::adaptive_with_breaks(|x| f(x) * Complex64::from_polar(1.0 / length, -w * x), 0.0, length, breakpoints, opts)
        })
        .collect();
    let mut coeffs = Vec::with_capacity(results.len());
    let mut flagged = false;
    for r in results {
        let r = r?;
        flagged |= r.suspected_discontinuity;
        coeffs.push(r.value);
    }
    if flagged {
        log::warn!("fourier_coeffs: integrand looks discontinuous; expect O(1/n) decay and Gibbs overshoot");
    }
    Ok(FourierSeries { length, nmax, coeffs, suspected_discontinuity: flagged })
}

/// Partial sum of `sum_{|m| <= mmax} i^m J_m(k r) e^{i m (phi - phi_k)}`.
pub fn plane_wave_cylindrical(k: f64, phi_k: f64, r: f64, phi: f64, mmax: usize) -> Complex64 {
    let js = cyl_bessel_j_seq(mmax, k * r);
    let mut acc = Complex64::new(js[0], 0.0);
    for (m, &j) in js.iter().enumerate().skip(1) {
        let im = Complex64::new(0.0, 1.0).powu(m as u32);
        let a = m as f64 * (phi - phi_k);
        // m and -m together: J_{-m} = (-1)^m J_m and i^{-m} = (-i)^m
        let pair = im * Complex64::from_polar(1.0, a) + im.conj() * Complex64::from_polar(1.0, -a) * if m % 2 == 0 { 1.0 } else { -1.0 };
        acc += pair * j;
    }
    acc
}

/// Partial sum of `sum_{l <= lmax} (2l+1) i^l j_l(k r) P_l(khat . xhat)`.
pub fn plane_wave_spherical(k: f64, khat: [f64; 3], x: [f64; 3], lmax: usize) -> Complex64 {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let mu = ((khat[0] * x[0] + khat[1] * x[1] + khat[2] * x[2]) / r).clamp(-1.0, 1.0);
    let js = spherical_bessel_j_seq(lmax, k * r);
    let ps = legendre_seq(lmax, mu);
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..=lmax {
        acc += Complex64::new(0.0, 1.0).powu(l as u32) * ((2 * l + 1) as f64 * js[l] * ps[l]);
    }
    acc
}

/// `int |grad psi|^2 / int psi^2` over a Dirichlet box or the unit sphere.
pub fn rayleigh_quotient<F>(psi: F, domain_spec: &DomainSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    match domain_spec.kind {
        DomainKind::IntervalDirichlet => {
            let lens = &domain_spec.lengths;
            let d = lens.len();
            let n_axis = match d {
                1 => 128,
                2 => 64,
                _ => 32,
            };
            let axes: Vec<(Vec<f64>, Vec<f64>)> = lens.iter().map(|&l| QuadratureRule::gauss_legendre(n_axis).mapped(0.0, l)).collect();
            let grid = tensor_grid(&axes);
            let scale = grid.iter().map(|(p, _)| psi(p).abs()).fold(0.0, f64::max);
            if scale == 0.0 {
                return Err(FieldError::Precondition("trial function vanishes identically".into()));
            }
            check_boundary(&psi, lens, scale)?;
            let (num, den) = grid
                .par_iter()
                .map(|(p, w)| {
                    let v = psi(p);
                    let mut g2 = 0.0;
                    for i in 0..d {
                        let h = 1e-3 * lens[i];
                        let g = fd::d1(
                            |t| {
                                let mut q = p.clone();
                                q[i] = t;
                                psi(&q)
                            },
                            p[i],
                            h,
                        );
                        g2 += g * g;
                    }
                    (w * g2, w * v * v)
                })
                .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            Ok(num / den)
        }
        DomainKind::TwoSphere => {
            let rule = SphereRule::default();
            let h = 1e-4;
            let num = rule.integrate(|t, p| {
                let dt = fd::d1(|s| psi(&[s, p]), t, h);
                let dp = fd::d1(|s| psi(&[t, s]), p, h);
                dt * dt + dp * dp / (t.sin() * t.sin())
            });
            let den = rule.integrate(|t, p| psi(&[t, p]).powi(2));
            if den == 0.0 {
                return Err(FieldError::Precondition("trial function vanishes identically".into()));
            }
            Ok(num / den)
        }
        _ => Err(FieldError::Configuration("Rayleigh quotient is defined here for Dirichlet boxes and the 2-sphere".into())),
    }
}

fn check_boundary<F: Fn(&[f64]) -> f64>(psi: &F, lens: &[f64], scale: f64) -> Result<()> {
    let d = lens.len();
    let samples: usize = 17;
    for face in 0..d {
        for &wall in &[0.0, lens[face]] {
            for k in 0..samples.max(1).pow((d - 1) as u32) {
                let mut p: SmallVec<[f64; 3]> = SmallVec::new();
                let mut idx = k;
                for (j, &lj) in lens.iter().enumerate() {
                    if j == face {
                        p.push(wall);
                    } else {
                        p.push(lj * (idx % samples) as f64 / (samples - 1) as f64);
                        idx /= samples;
                    }
                }
                if psi(&p).abs() > 1e-8 * scale {
                    return Err(FieldError::Precondition(format!("trial function does not vanish on the boundary at {:?}", p.as_slice())));
                }
            }
        }
    }
    Ok(())
}
