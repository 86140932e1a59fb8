//! Special functions: gamma, Bessel, Legendre, spherical harmonics.
//!
//! Cylindrical `J_m` uses its power series for |x| < 1 and Miller's backward
//! recurrence beyond. Spherical `j_l` follows the same split; `y_l` is always
//! built by upward recurrence, which is stable for the dominant solution.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, FieldError, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + k as f64 - 1.0);
    }
    a
}

/// Gamma function for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma requires x > 0, got {x}"));
    }
    if x == x.floor() && x <= 21.0 {
        let mut f = 1.0;
        for k in 2..(x as u64) {
            f *= k as f64;
        }
        return Ok(f);
    }
    if x < 0.5 {
        // reflection keeps the rational approximation in its accurate range
        return Ok(PI / ((PI * x).sin() * gamma(1.0 - x)?));
    }
    let t = x - 0.5 + LANCZOS_G;
    let s = lanczos_sum(x);
    let p = t.powf(0.5 * (x - 0.5));
    Ok((2.0 * PI).sqrt() * p * (p * (-t).exp()) * s)
}

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let t = x - 0.5 + LANCZOS_G;
    Ok(0.5 * (2.0 * PI).ln() + (x - 0.5) * t.ln() - t + lanczos_sum(x).ln())
}

/// `n!!` with the conventions `0!! = (-1)!! = 1`.
pub fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

fn bessel_j_series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=m {
        term *= half / k as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        term *= q / (k as f64 * (k + m as usize) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J_0 .. J_nmax` at `x >= 0` by normalized backward recurrence.
fn bessel_j_miller(nmax: usize, x: f64) -> Vec<f64> {
    let big = (nmax as f64).max(x);
    let mut start = (big + 15.0 + (40.0 * big).sqrt()) as usize;
    start += start % 2;
    let mut out = vec![0.0; nmax + 1];
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        let idx = k - 1;
        if idx <= nmax {
            out[idx] = j;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp1 *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += j;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Integer-order Bessel function of the first kind.
pub fn cyl_bessel_j(m: i32, x: f64) -> f64 {
    let n = m.unsigned_abs();
    let mut sign = if m < 0 && n % 2 == 1 { -1.0 } else { 1.0 };
    if x < 0.0 && n % 2 == 1 {
        sign = -sign;
    }
    let ax = x.abs();
    if ax == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let v = if ax < 1.0 { bessel_j_series(n, ax) } else { bessel_j_miller(n as usize, ax)[n as usize] };
    sign * v
}

/// `J_0 .. J_nmax` at `x`.
pub fn cyl_bessel_j_seq(nmax: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    let mut out = if ax == 0.0 {
        let mut v = vec![0.0; nmax + 1];
        v[0] = 1.0;
        v
    } else if ax < 1.0 {
        (0..=nmax).map(|n| bessel_j_series(n as u32, ax)).collect()
    } else {
        bessel_j_miller(nmax, ax)
    };
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

fn sph_j_series(l: usize, x: f64) -> f64 {
    let mut lead = 1.0;
    for k in 1..=l {
        lead *= x / (2 * k + 1) as f64;
    }
    let q = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..100 {
        term *= q / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// `j_0 .. j_lmax` at `x >= 0`.
pub fn spherical_bessel_j_seq(lmax: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; lmax + 1];
        v[0] = 1.0;
        return v;
    }
    if x < 1.0 {
        return (0..=lmax).map(|l| sph_j_series(l, x)).collect();
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    if lmax == 0 {
        return vec![j0];
    }
    let big = (lmax as f64).max(x);
    let start = (big + 20.0 + (40.0 * big).sqrt()) as usize;
    let mut out = vec![0.0; lmax + 1];
    let mut fp1 = 0.0;
    let mut f = 1e-300;
    let mut f1 = 0.0;
    for l in (1..=start).rev() {
        let fm1 = (2 * l + 1) as f64 / x * f - fp1;
        fp1 = f;
        f = fm1;
        let idx = l - 1;
        if idx <= lmax {
            out[idx] = f;
        }
        if idx == 1 {
            f1 = f;
        }
        if f.abs() > 1e250 {
            let sc = 1e-250;
            f *= sc;
            fp1 *= sc;
            f1 *= sc;
            for v in out.iter_mut() {
                *v *= sc;
            }
        }
    }
    let scale = if j0.abs() >= j1.abs() { j0 / f } else { j1 / f1 };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// `y_0 .. y_lmax` at `x > 0`.
pub fn spherical_bessel_y_seq(lmax: usize, x: f64) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(-c / x);
    if lmax >= 1 {
        out.push(-c / (x * x) - s / x);
    }
    for l in 1..lmax {
        let next = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        out.push(next);
    }
    out
}

/// `j_l(x)` for x >= 0.
pub fn spherical_bessel_j(l: usize, x: f64) -> Result<f64> {
    if x < 0.0 {
        return domain("spherical_bessel_j requires x >= 0");
    }
    Ok(spherical_bessel_j_seq(l, x)[l])
}

/// `(j_l(x), h_l^(1)(x))` with `h = j + i y`.
pub fn spherical_bessel_pair(l: usize, x: f64) -> Result<(f64, Complex64)> {
    if !(x > 0.0) {
        return domain(format!("Hankel function requires x > 0, got {x}"));
    }
    let j = spherical_bessel_j_seq(l, x)[l];
    let y = spherical_bessel_y_seq(l, x)[l];
    Ok((j, Complex64::new(j, y)))
}

/// Sequences `j_l` and `h_l^(1)` together with their x-derivatives.
pub struct SphericalBesselTable {
    pub j: Vec<f64>,
    pub h: Vec<Complex64>,
    pub dj: Vec<f64>,
    pub dh: Vec<Complex64>,
}

pub fn spherical_bessel_table(lmax: usize, x: f64) -> Result<SphericalBesselTable> {
    if !(x > 0.0) {
        return domain(format!("Hankel function requires x > 0, got {x}"));
    }
    let j = spherical_bessel_j_seq(lmax + 1, x);
    let y = spherical_bessel_y_seq(lmax + 1, x);
    let h: Vec<Complex64> = j.iter().zip(&y).map(|(a, b)| Complex64::new(*a, *b)).collect();
    let mut dj = Vec::with_capacity(lmax + 1);
    let mut dh = Vec::with_capacity(lmax + 1);
    for l in 0..=lmax {
        // f_l' = f_{l-1} - (l+1) f_l / x, with f_0' = -f_1
        if l == 0 {
            dj.push(-j[1]);
            dh.push(-h[1]);
        } else {
            dj.push(j[l - 1] - (l + 1) as f64 * j[l] / x);
            dh.push(h[l - 1] - h[l] * ((l + 1) as f64 / x));
        }
    }
    Ok(SphericalBesselTable { j: j[..=lmax].to_vec(), h: h[..=lmax].to_vec(), dj, dh })
}

/// Legendre polynomial `P_l(x)` for |x| <= 1.
pub fn legendre_p(l: usize, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + 1e-14) {
        return domain(format!("legendre_p requires |x| <= 1, got {x}"));
    }
    let x = x.clamp(-1.0, 1.0);
    Ok(legendre_seq(l, x)[l])
}

pub(crate) fn legendre_seq(lmax: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(lmax + 1);
    p.push(1.0);
    if lmax >= 1 {
        p.push(x);
    }
    for l in 2..=lmax {
        let lf = l as f64;
        let v = ((2.0 * lf - 1.0) * x * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf;
        p.push(v);
    }
    p
}

/// Spherical-harmonic index with `|m| <= ell` enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SphericalHarmonicIndex {
    ell: u32,
    m: i32,
}

impl SphericalHarmonicIndex {
    pub fn new(ell: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > ell {
            return Err(FieldError::Domain(format!("|m| = {} exceeds ell = {ell}", m.abs())));
        }
        Ok(Self { ell, m })
    }
    pub fn ell(&self) -> u32 {
        self.ell
    }
    pub fn m(&self) -> i32 {
        self.m
    }
    /// Position in the flat `(l, m)` ordering `l^2 + l + m`.
    pub fn flat(&self) -> usize {
        lm_index(self.ell as usize, self.m as i64)
    }
}

/// Flat index `l^2 + l + m`.
#[inline]
pub fn lm_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Normalized associated Legendre values `Pbar_l^m(x)` for `0 <= m <= l <= lmax`,
/// including the Condon-Shortley phase and the factor
/// `sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!)`, stored at `l (l+1) / 2 + m`.
pub fn assoc_legendre_normalized(lmax: usize, x: f64) -> Vec<f64> {
    let size = (lmax + 1) * (lmax + 2) / 2;
    let mut out = vec![0.0; size];
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            pmm *= -s * ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
        }
        out[idx(m, m)] = pmm;
        if m < lmax {
            out[idx(m + 1, m)] = x * (2.0 * m as f64 + 3.0).sqrt() * pmm;
        }
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            out[idx(l, m)] = a * (x * out[idx(l - 1, m)] - b * out[idx(l - 2, m)]);
        }
    }
    out
}

/// All `Y_l^m(theta, phi)` for `l <= lmax`, stored at `l^2 + l + m`.
pub fn sph_harm_all(lmax: usize, theta: f64, phi: f64) -> Vec<Complex64> {
    let p = assoc_legendre_normalized(lmax, theta.cos());
    let mut out = vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)];
    for l in 0..=lmax {
        for m in 0..=l {
            let v = p[l * (l + 1) / 2 + m];
            let e = Complex64::from_polar(1.0, m as f64 * phi);
            let y = e * v;
            out[lm_index(l, m as i64)] = y;
            if m > 0 {
                let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
                out[lm_index(l, -(m as i64))] = y.conj() * sign;
            }
        }
    }
    out
}

/// `Y_l^m(theta, phi)` in the Condon-Shortley convention.
pub fn sph_harm(idx: SphericalHarmonicIndex, theta: f64, phi: f64) -> Complex64 {
    let l = idx.ell as usize;
    let m = idx.m.unsigned_abs() as usize;
    let p = assoc_legendre_normalized(l, theta.cos())[l * (l + 1) / 2 + m];
    let y = Complex64::from_polar(1.0, m as f64 * phi) * p;
    if idx.m < 0 {
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        y.conj() * sign
    } else {
        y
    }
}

/// Surface measure of the unit sphere in D dimensions, `2 pi^(D/2) / Gamma(D/2)`.
pub fn solid_angle(d: i64) -> Result<f64> {
    if d < 1 {
        return domain(format!("solid_angle requires D >= 1, got {d}"));
    }
    let h = d as f64 / 2.0;
    Ok(2.0 * PI.powf(h) / gamma(h)?)
}
