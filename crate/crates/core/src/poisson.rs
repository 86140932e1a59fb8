//! Static Green's functions and Poisson solvers.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{domain, FieldError, Result};
use crate::quad::{self, AdaptiveOptions, SphereRule};
use crate::specialfn::{gamma, legendre_seq, lm_index, sph_harm_all};
use crate::spectra::{gl_panels, tensor_grid, DomainKind, ModeBasis};

pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Source `J(x)` vanishing outside the ball of radius `support_radius`
/// about the origin.
#[derive(Clone)]
pub struct SourceDensity {
    pub dimension: usize,
    pub density: PointFn,
    pub support_radius: f64,
}

impl SourceDensity {
    /// Spot-checks that the density vanishes just outside its support.
    pub fn new(dimension: usize, density: PointFn, support_radius: f64) -> Result<Self> {
        if dimension == 0 || !(support_radius > 0.0) {
            return domain("source needs a positive dimension and support radius");
        }
        for axis in 0..dimension {
            for &s in &[-1.0, 1.0] {
                for &f in &[1.01, 1.5, 3.0] {
                    let mut p = vec![0.0; dimension];
                    p[axis] = s * f * support_radius;
                    if (density)(&p) != 0.0 {
                        return Err(FieldError::Precondition(format!("density nonzero outside support at {p:?}")));
                    }
                }
            }
        }
        Ok(Self { dimension, density, support_radius })
    }
}

/// Coefficients indexed by `(l, m)` with `|m| <= l <= lmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleSet {
    pub lmax: usize,
    coeffs: Vec<Complex64>,
    /// Radius of the source the moments were taken from, if any.
    pub source_radius: Option<f64>,
}

impl MultipoleSet {
    pub fn zeros(lmax: usize) -> Self {
        Self { lmax, coeffs: vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)], source_radius: None }
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.coeffs[lm_index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, v: Complex64) {
        self.coeffs[lm_index(l, m)] = v;
    }

    /// `sum_lm c_l^m Y_l^m(theta, phi)`.
    pub fn synthesize(&self, theta: f64, phi: f64) -> Complex64 {
        let ys = sph_harm_all(self.lmax, theta, phi);
        self.coeffs.iter().zip(&ys).map(|(c, y)| c * y).sum()
    }

    /// Exterior potential `sum rho_l^m Y_l^m / ((2l+1) r^{l+1})`.
    pub fn exterior_field(&self, r: f64, theta: f64, phi: f64) -> Result<f64> {
        if let Some(radius) = self.source_radius {
            if r <= radius {
                return Err(FieldError::OutOfRegion(format!("r = {r} is inside the source radius {radius}")));
            }
        }
        let ys = sph_harm_all(self.lmax, theta, phi);
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..=self.lmax {
            let f = 1.0 / ((2 * l + 1) as f64 * r.powi(l as i32 + 1));
            for m in -(l as i64)..=l as i64 {
                let i = lm_index(l, m);
                acc += self.coeffs[i] * ys[i] * f;
            }
        }
        Ok(acc.re)
    }
}

fn distance(x: &[f64], xp: &[f64]) -> f64 {
    x.iter().zip(xp).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// `Gamma(D/2 - 1) / (4 pi^{D/2} |x - x'|^{D-2})`.
pub fn coulomb_green(d: usize, x: &[f64], xp: &[f64]) -> Result<f64> {
    if d < 3 {
        return Err(FieldError::Configuration("D < 3: use log_green_2d_series".into()));
    }
    if x.len() != d || xp.len() != d {
        return Err(FieldError::DimensionMismatch { expected: d, found: x.len().min(xp.len()) });
    }
    let r = distance(x, xp);
    if r == 0.0 {
        return Err(FieldError::Singular("coincident points".into()));
    }
    let h = d as f64 / 2.0;
    Ok(gamma(h - 1.0)? / (4.0 * PI.powf(h) * r.powi(d as i32 - 2)))
}

/// Outward flux `-oint n . grad G(x, x') dA` through the sphere of `radius`
/// about `center`, by product quadrature refined until stable.
pub fn coulomb_flux(xp: [f64; 3], center: [f64; 3], radius: f64) -> Result<f64> {
    let integrand = |t: f64, p: f64| {
        let n = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
        let x = [center[0] + radius * n[0], center[1] + radius * n[1], center[2] + radius * n[2]];
        let d = [x[0] - xp[0], x[1] - xp[1], x[2] - xp[2]];
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        // -grad_x 1/(4 pi r) = d / (4 pi r^3)
        (d[0] * n[0] + d[1] * n[1] + d[2] * n[2]) / (4.0 * PI * r * r * r) * radius * radius
    };
    SphereRule::integrate_converged(integrand, 1e-13)
}

/// `ln r> - sum_{l=1}^{lmax} (r</r>)^l cos(l (phi - phi')) / l`.
pub fn log_green_2d_series(r: f64, phi: f64, rp: f64, phip: f64, lmax: usize) -> Result<f64> {
    if r < 0.0 || rp < 0.0 {
        return domain("radii must be non-negative");
    }
    if r == rp && ((phi - phip).cos() - 1.0).abs() < 1e-15 {
        return Err(FieldError::Singular("coincident points".into()));
    }
    let (rl, rg) = if r <= rp { (r, rp) } else { (rp, r) };
    let q = rl / rg;
    let dphi = phi - phip;
    let mut acc = rg.ln();
    let mut ql = 1.0;
    for l in 1..=lmax {
        ql *= q;
        acc -= ql * (l as f64 * dphi).cos() / l as f64;
    }
    Ok(acc)
}

/// Dirichlet Green's function of the half space `x^D >= 0` by one image.
pub fn image_green_halfspace(d: usize, x: &[f64], xp: &[f64]) -> Result<f64> {
    if x.len() != d || xp.len() != d {
        return Err(FieldError::DimensionMismatch { expected: d, found: x.len().min(xp.len()) });
    }
    if x[d - 1] < 0.0 || xp[d - 1] < 0.0 {
        return domain("points must satisfy x^D >= 0");
    }
    let mut image = xp.to_vec();
    image[d - 1] = -image[d - 1];
    if x[d - 1] == 0.0 {
        return Ok(0.0);
    }
    Ok(coulomb_green(d, x, xp)? - coulomb_green(d, x, &image)?)
}

fn require_dirichlet(basis: &ModeBasis) -> Result<()> {
    if basis.domain().kind != DomainKind::IntervalDirichlet {
        return Err(FieldError::Configuration("a Dirichlet box basis is required".into()));
    }
    if basis.modes().iter().any(|m| m.eigenvalue == 0.0) {
        return Err(FieldError::NoInverse);
    }
    Ok(())
}

/// Mode sum `sum psi(x) psi(x') / lambda`, stopped after 20 consecutive
/// increments each below `tol / 20`.
pub fn box_green_modesum(basis: &ModeBasis, x: &[f64], xp: &[f64], tol: f64) -> Result<f64> {
    require_dirichlet(basis)?;
    let mut acc = 0.0;
    let mut quiet = 0;
    for m in basis.modes() {
        let inc = basis.eval_real(m, x) * basis.eval_real(m, xp) / m.eigenvalue;
        acc += inc;
        if inc.abs() < tol / 20.0 {
            quiet += 1;
            if quiet >= 20 {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
    }
    log::warn!("box_green_modesum: basis exhausted before the increment criterion was met");
    Ok(acc)
}

/// Transverse wavenumbers above this are treated as carrying no boundary data.
const FACE_LABEL_CAP: i64 = 512;
/// Source projections are taken for at most this many modes.
const SOURCE_MODE_CAP: usize = 4096;

/// Precomputed Kirchhoff coefficients
/// `c = (1/lambda) [int psi J - oint (d_n psi) psi_boundary]` on a Dirichlet box.
pub struct DirichletSolver {
    basis: ModeBasis,
    /// Mode labels with coefficients that already carry the `sqrt(2/L)` factors.
    terms: Vec<(SmallVec<[usize; 3]>, f64)>,
    max_label: Vec<usize>,
}

/// `sin(n theta)` for `n = 0..=nmax` by rotation, reseeded every 128 steps so
/// the drift stays at a few ulps.
fn sine_table(theta: f64, nmax: usize) -> Vec<f64> {
    let (s1, c1) = theta.sin_cos();
    let mut out = Vec::with_capacity(nmax + 1);
    let (mut s, mut c) = (0.0f64, 1.0f64);
    for n in 0..=nmax {
        if n % 128 == 0 {
            (s, c) = (n as f64 * theta).sin_cos();
        }
        out.push(s);
        (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
    }
    out
}

impl DirichletSolver {
    pub fn new<B>(basis: ModeBasis, source: Option<&SourceDensity>, boundary: B) -> Result<Self>
    where
        B: Fn(&[f64]) -> f64 + Sync,
    {
        require_dirichlet(&basis)?;
        let lens = basis.domain().lengths.clone();
        let d = lens.len();
        if let Some(s) = source {
            if s.dimension != d {
                return Err(FieldError::Configuration(format!("source dimension {} vs box dimension {d}", s.dimension)));
            }
        }
        let mut maxl = vec![0i64; d];
        for m in basis.modes() {
            for (o, &n) in maxl.iter_mut().zip(&m.label) {
                *o = (*o).max(n);
            }
        }
        // face projections P[face][wall] indexed by the transverse label tuple
        let mut faces: Vec<[std::collections::HashMap<SmallVec<[i64; 3]>, f64>; 2]> = Vec::with_capacity(d);
        for face in 0..d {
            let others: Vec<usize> = (0..d).filter(|&j| j != face).collect();
            let caps: Vec<i64> = others.iter().map(|&j| maxl[j].min(FACE_LABEL_CAP)).collect();
            let axes: Vec<(Vec<f64>, Vec<f64>)> = others.iter().zip(&caps).map(|(&j, &c)| gl_panels(0.0, lens[j], c as usize)).collect();
            let grid = tensor_grid(&axes);
            let mut labels: Vec<SmallVec<[i64; 3]>> = vec![SmallVec::new()];
            for &c in &caps {
                labels = labels.into_iter().flat_map(|p| (1..=c).map(move |n| { let mut q = p.clone(); q.push(n); q })).collect();
            }
            let mut walls: [std::collections::HashMap<SmallVec<[i64; 3]>, f64>; 2] = Default::default();
            for (wi, &wall) in [0.0, lens[face]].iter().enumerate() {
                let values: Vec<f64> = grid
                    .par_iter()
                    .map(|(p, w)| {
                        let mut full: SmallVec<[f64; 3]> = SmallVec::new();
                        let mut it = p.iter();
                        for j in 0..d {
                            full.push(if j == face { wall } else { *it.next().unwrap() });
                        }
                        boundary(&full) * w
                    })
                    .collect();
                let proj: Vec<f64> = labels
                    .par_iter()
                    .map(|lab| {
                        grid.iter()
                            .zip(&values)
                            .map(|((p, _), v)| {
                                let mut prod = *v;
                                for ((&n, &j), &x) in lab.iter().zip(&others).zip(p.iter()) {
                                    prod *= (2.0 / lens[j]).sqrt() * (PI * n as f64 * x / lens[j]).sin();
                                }
                                prod
                            })
                            .sum()
                    })
                    .collect();
                walls[wi] = labels.iter().cloned().zip(proj).collect();
            }
            faces.push(walls);
        }
        let src: Vec<f64> = match source {
            Some(s) => {
                let limit = SOURCE_MODE_CAP.min(basis.len());
                let f = &s.density;
                basis.project(|p| Complex64::new(f(p), 0.0), limit).into_iter().map(|c| c.re).collect()
            }
            None => Vec::new(),
        };
        let coeffs: Vec<f64> = basis
            .modes()
            .par_iter()
            .enumerate()
            .map(|(i, m)| {
                let mut surf = 0.0;
                for face in 0..d {
                    let n = m.label[face];
                    let k = (2.0 / lens[face]).sqrt() * PI * n as f64 / lens[face];
                    let lab: SmallVec<[i64; 3]> = (0..d).filter(|&j| j != face).map(|j| m.label[j]).collect();
                    let p0 = faces[face][0].get(&lab).copied().unwrap_or(0.0);
                    let pl = faces[face][1].get(&lab).copied().unwrap_or(0.0);
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    surf += -k * p0 + k * sign * pl;
                }
                let vol = src.get(i).copied().unwrap_or(0.0);
                (vol - surf) / m.eigenvalue
            })
            .collect();
        let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let norm: f64 = lens.iter().map(|l| (2.0 / l).sqrt()).product();
        let terms = basis
            .modes()
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| c.abs() > 1e-16 * scale)
            .map(|(m, c)| (m.label.iter().map(|&n| n as usize).collect(), c * norm))
            .collect();
        let max_label = maxl.iter().map(|&n| n as usize).collect();
        Ok(Self { basis, terms, max_label })
    }

    /// `psi(x)`, summed in mode order.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let lens = &self.basis.domain().lengths;
        let tables: SmallVec<[Vec<f64>; 3]> =
            x.iter().zip(lens).zip(&self.max_label).map(|((&xi, &l), &n)| sine_table(PI * xi / l, n)).collect();
        self.terms
            .iter()
            .map(|(lab, c)| lab.iter().zip(&tables).fold(*c, |acc, (&n, t)| acc * t[n]))
            .sum()
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }
}

/// Kirchhoff solution at one point; see [`DirichletSolver`] for repeated use.
pub fn dirichlet_solve<B>(basis: &ModeBasis, source: Option<&SourceDensity>, boundary: B, x: &[f64]) -> Result<f64>
where
    B: Fn(&[f64]) -> f64 + Sync,
{
    let lens = &basis.domain().lengths;
    if x.len() != lens.len() {
        return Err(FieldError::DimensionMismatch { expected: lens.len(), found: x.len() });
    }
    if x.iter().zip(lens).any(|(&xi, &l)| !(xi > 0.0 && xi < l)) {
        return domain("evaluation point must be interior");
    }
    Ok(DirichletSolver::new(basis.clone(), source, boundary)?.eval(x))
}

/// Static moments `rho_l^m = int dOmega dr r^{l+2} conj(Y_l^m) J` on the
/// product grid `2(lmax+1) x 4(lmax+1)`.
pub fn multipole_static(source: &SourceDensity, lmax: usize) -> Result<MultipoleSet> {
    multipole_static_with_grid(source, lmax, 2 * (lmax + 1), 4 * (lmax + 1))
}

/// As [`multipole_static`] with an explicit angular grid, for sources whose
/// angular content is not band-limited at `lmax`.
pub fn multipole_static_with_grid(source: &SourceDensity, lmax: usize, n_theta: usize, n_phi: usize) -> Result<MultipoleSet> {
    if source.dimension != 3 {
        return Err(FieldError::DimensionMismatch { expected: 3, found: source.dimension });
    }
    let rule = SphereRule::new(n_theta, n_phi);
    let radius = source.support_radius;
    let opts = AdaptiveOptions { rel_tol: 1e-12, abs_tol: 1e-15, initial_panels: 64, ..Default::default() };
    let rows: Vec<Result<Vec<Complex64>>> = rule
        .points()
        .par_iter()
        .map(|&(t, p, w)| {
            let n = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
            let ys = sph_harm_all(lmax, t, p);
            let mut row = vec![Complex64::new(0.0, 0.0); ys.len()];
            for l in 0..=lmax {
                let radial = quad::adaptive(
                    |r: f64| r.powi(l as i32 + 2) * (source.density)(&[r * n[0], r * n[1], r * n[2]]),
                    0.0,
                    radius,
                    opts,
                )?
                .value;
                for m in -(l as i64)..=l as i64 {
                    let i = lm_index(l, m);
                    row[i] = ys[i].conj() * (radial * w);
                }
            }
            Ok(row)
        })
        .collect();
    let mut set = MultipoleSet::zeros(lmax);
    for row in rows {
        for (c, v) in set.coeffs.iter_mut().zip(row?) {
            *c += v;
        }
    }
    set.source_radius = Some(radius);
    Ok(set)
}

/// `(4 pi r>)^{-1} sum_l P_l(mu) (r</r>)^l`.
pub fn legendre_green_expansion(r: f64, rp: f64, mu: f64, lmax: usize) -> Result<f64> {
    if r < 0.0 || rp < 0.0 || mu.abs() > 1.0 {
        return domain("need r, r' >= 0 and |mu| <= 1");
    }
    if r == rp {
        return Err(FieldError::Singular("expansion requires r != r'".into()));
    }
    let (rl, rg) = if r <= rp { (r, rp) } else { (rp, r) };
    let q = rl / rg;
    let ps = legendre_seq(lmax, mu);
    let mut acc = 0.0;
    let mut ql = 1.0;
    for p in ps {
        acc += p * ql;
        ql *= q;
    }
    Ok(acc / (4.0 * PI * rg))
}

/// Solve `-laplacian_{S^2} psi = J` in harmonics: `A = B / (l (l+1))`, with
/// the undetermined monopole of psi set to zero.
pub fn sphere_poisson_solve(b: &MultipoleSet) -> Result<MultipoleSet> {
    let scale = b.coeffs.iter().fold(0.0f64, |a, c| a.max(c.norm()));
    if b.get(0, 0).norm() > 1e-14 * scale.max(1.0) {
        return Err(FieldError::InconsistentSource("source has a nonzero l = 0 component".into()));
    }
    let mut a = MultipoleSet::zeros(b.lmax);
    for l in 1..=b.lmax {
        let lam = (l * (l + 1)) as f64;
        for m in -(l as i64)..=l as i64 {
            a.set(l, m, b.get(l, m) / lam);
        }
    }
    Ok(a)
}
