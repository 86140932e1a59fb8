//! Quadrature rules and adaptive integration.
//!
//! Every rule stores nodes and weights for a reference domain; integrals over
//! other intervals go through [`QuadratureRule::integrate`], which maps
//! linearly. The adaptive integrator bisects panels locally and compares a
//! 15-point Gauss-Legendre estimate on the whole panel against the sum over
//! its halves.

use std::ops::{Add, AddAssign, Mul, Sub};
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{FieldError, Result};

/// Values that can be accumulated by a quadrature rule.
pub trait Scalar:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign + 'static
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    /// Nodes in (-1, 1), weights summing to 2.
    GaussLegendre,
    /// Nodes `k P / n` on [0, P), equal weights summing to P.
    TrapezoidPeriodic,
    /// Gauss-Legendre in cos(theta) crossed with a periodic trapezoid in phi.
    ProductSphere,
    /// Nodes on the real line for the weight exp(-x^2); weights sum to sqrt(pi).
    GaussHermite,
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: QuadratureKind,
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl QuadratureRule {
    /// `n`-point Gauss-Legendre rule on [-1, 1].
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return Self { nodes: vec![0.0], weights: vec![2.0], kind: QuadratureKind::GaussLegendre };
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_and_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights, kind: QuadratureKind::GaussLegendre }
    }

    /// `n`-point periodic trapezoid rule on [0, period).
    pub fn trapezoid_periodic(n: usize, period: f64) -> Self {
        assert!(n >= 1);
        let h = period / n as f64;
        Self {
            nodes: (0..n).map(|k| k as f64 * h).collect(),
            weights: vec![h; n],
            kind: QuadratureKind::TrapezoidPeriodic,
        }
    }

    /// `n`-point Gauss-Hermite rule (Golub-Welsch).
    pub fn gauss_hermite(n: usize) -> Self {
        assert!(n >= 1);
        let mut j = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let b = (k as f64 / 2.0).sqrt();
            j[(k, k - 1)] = b;
            j[(k - 1, k)] = b;
        }
        let eig = SymmetricEigen::new(j);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
            kind: QuadratureKind::GaussHermite,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Integrate over [a, b] for Gauss-Legendre rules; periodic rules ignore
    /// `b` and shift by `a`.
    pub fn integrate<T: Scalar, F: Fn(f64) -> T>(&self, f: F, a: f64, b: f64) -> T {
        let mut acc = T::zero();
        match self.kind {
            QuadratureKind::GaussLegendre => {
                let half = 0.5 * (b - a);
                let mid = 0.5 * (a + b);
                for (x, w) in self.nodes.iter().zip(&self.weights) {
                    acc += f(mid + half * x) * (w * half);
                }
            }
            _ => {
                for (x, w) in self.nodes.iter().zip(&self.weights) {
                    acc += f(a + x) * *w;
                }
            }
        }
        acc
    }

    /// Nodes and weights mapped onto [a, b]: Gauss-Legendre from [-1, 1],
    /// periodic rules from [0, period). Hermite rules live on the whole line
    /// and are returned unchanged.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let (shift, scale) = match self.kind {
            QuadratureKind::GaussLegendre => (0.5 * (a + b), 0.5 * (b - a)),
            QuadratureKind::TrapezoidPeriodic => (a, (b - a) / self.weight_sum()),
            _ => (0.0, 1.0),
        };
        (
            self.nodes.iter().map(|x| shift + scale * x).collect(),
            self.weights.iter().map(|w| w * scale).collect(),
        )
    }
}

/// Tanh-sinh nodes and weights on [a, b]; nodes that round onto an endpoint
/// are dropped so endpoint singularities are never sampled.
pub fn tanh_sinh(a: f64, b: f64, h: f64, tmax: f64) -> (Vec<f64>, Vec<f64>) {
    let half = 0.5 * (b - a);
    let n = (tmax / h).ceil() as i64;
    let mut nodes = Vec::with_capacity(2 * n as usize + 1);
    let mut weights = Vec::with_capacity(2 * n as usize + 1);
    for k in -n..=n {
        let t = k as f64 * h;
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = half * h * std::f64::consts::FRAC_PI_2 * t.cosh() / (ch * ch);
        // distance to the nearer endpoint, computed without cancellation
        let x = if u < 0.0 {
            a + half * 2.0 / (1.0 + (-2.0 * u).exp())
        } else {
            b - half * 2.0 / (1.0 + (2.0 * u).exp())
        };
        if x <= a || x >= b || w == 0.0 || !w.is_finite() {
            continue;
        }
        nodes.push(x);
        weights.push(w);
    }
    (nodes, weights)
}

/// Product rule for integrals over the unit 2-sphere, `f(theta, phi)`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub cos_theta: QuadratureRule,
    pub phi: QuadratureRule,
}

impl SphereRule {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        Self {
            cos_theta: QuadratureRule::gauss_legendre(n_theta),
            phi: QuadratureRule::trapezoid_periodic(n_phi, 2.0 * std::f64::consts::PI),
        }
    }

    pub fn kind(&self) -> QuadratureKind {
        QuadratureKind::ProductSphere
    }

    /// Flattened `(theta, phi, weight)` triples.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.cos_theta.len() * self.phi.len());
        for (ct, wt) in self.cos_theta.nodes.iter().zip(&self.cos_theta.weights) {
            let th = ct.acos();
            for (ph, wp) in self.phi.nodes.iter().zip(&self.phi.weights) {
                out.push((th, *ph, wt * wp));
            }
        }
        out
    }

    pub fn integrate<T: Scalar, F: Fn(f64, f64) -> T>(&self, f: F) -> T {
        let mut acc = T::zero();
        for (ct, wt) in self.cos_theta.nodes.iter().zip(&self.cos_theta.weights) {
            let th = ct.acos();
            let mut row = T::zero();
            for (ph, wp) in self.phi.nodes.iter().zip(&self.phi.weights) {
                row += f(th, *ph) * *wp;
            }
            acc += row * *wt;
        }
        acc
    }

    /// Start from the default 64 x 128 grid and double both axes until two
    /// successive estimates agree to `tol` (relative, with absolute floor `tol`).
    pub fn integrate_converged<T: Scalar, F: Fn(f64, f64) -> T>(f: F, tol: f64) -> Result<T> {
        let (mut nt, mut np) = (64, 128);
        let mut prev = SphereRule::new(nt, np).integrate(&f);
        for _ in 0..4 {
            nt *= 2;
            np *= 2;
            let next = SphereRule::new(nt, np).integrate(&f);
            let diff = (next - prev).magnitude();
            if diff <= tol * next.magnitude().max(1.0) {
                return Ok(next);
            }
            prev = next;
        }
        Err(FieldError::Tolerance { tol, estimate: f64::NAN })
    }
}

impl Default for SphereRule {
    fn default() -> Self {
        Self::new(64, 128)
    }
}

fn gl15() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| QuadratureRule::gauss_legendre(15))
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub max_evals: usize,
    pub initial_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-13, max_depth: 48, max_evals: 2_000_000, initial_panels: 8 }
    }
}

impl AdaptiveOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self { rel_tol, abs_tol: rel_tol * 1e-3, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evals: usize,
    /// Some panel hit the depth limit without meeting its local tolerance,
    /// which happens at jumps and integrable singularities.
    pub suspected_discontinuity: bool,
}

/// Adaptive integration of `f` over [a, b], splitting first at `breakpoints`.
pub fn adaptive_with_breaks<T: Scalar, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
) -> Result<QuadResult<T>> {
    if a == b {
        return Ok(QuadResult { value: T::zero(), error: 0.0, evals: 0, suspected_discontinuity: false });
    }
    if b < a {
        let r = adaptive_with_breaks(f, b, a, breakpoints, opts)?;
        return Ok(QuadResult { value: r.value * -1.0, ..r });
    }
    let rule = gl15();
    let est = |lo: f64, hi: f64| rule.integrate(&f, lo, hi);

    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    cuts.extend(inner);
    cuts.push(b);
    let mut panels = Vec::new();
    for w in cuts.windows(2) {
        let n = opts.initial_panels.max(1);
        let step = (w[1] - w[0]) / n as f64;
        for k in 0..n {
            let lo = w[0] + k as f64 * step;
            let hi = if k + 1 == n { w[1] } else { lo + step };
            panels.push((lo, hi));
        }
    }
    let mut evals = 0usize;
    let mut stack: Vec<(f64, f64, T, u32)> = Vec::with_capacity(panels.len() * 4);
    let mut rough = T::zero();
    for &(lo, hi) in &panels {
        let v = est(lo, hi);
        evals += rule.len();
        rough += v;
        stack.push((lo, hi, v, 0));
    }
    let scale = rough.magnitude();
    let eps = opts.abs_tol.max(opts.rel_tol * scale);
    let total = b - a;

    let mut value = T::zero();
    let mut error = 0.0;
    let mut flagged = false;
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = est(lo, mid);
        let right = est(mid, hi);
        evals += 2 * rule.len();
        let halves = left + right;
        let diff = (whole - halves).magnitude();
        let local = eps * (hi - lo) / total;
        if diff <= local || !diff.is_finite() {
            value += halves;
            error += diff;
            continue;
        }
        if depth >= opts.max_depth || (hi - lo) <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            flagged = true;
            value += halves;
            error += diff;
            continue;
        }
        if evals > opts.max_evals {
            return Err(FieldError::Tolerance { tol: eps, estimate: error + diff });
        }
        stack.push((lo, mid, left, depth + 1));
        stack.push((mid, hi, right, depth + 1));
    }
    Ok(QuadResult { value, error, evals, suspected_discontinuity: flagged })
}

pub fn adaptive<T: Scalar, F: Fn(f64) -> T>(f: F, a: f64, b: f64, opts: AdaptiveOptions) -> Result<QuadResult<T>> {
    adaptive_with_breaks(f, a, b, &[], opts)
}

/// Shorthand for the value of an adaptive integral at relative tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    Ok(adaptive(f, a, b, AdaptiveOptions::with_tol(tol))?.value)
}

/// Integral over [a, inf) via x = a + u / (1 - u).
pub fn adaptive_semi_infinite<T: Scalar, F: Fn(f64) -> T>(f: F, a: f64, opts: AdaptiveOptions) -> Result<QuadResult<T>> {
    adaptive(
        |u: f64| {
            let om = 1.0 - u;
            f(a + u / om) * (1.0 / (om * om))
        },
        0.0,
        1.0,
        opts,
    )
}

/// Integral over the whole real line, split at `center`.
pub fn adaptive_real_line<T: Scalar, F: Fn(f64) -> T>(f: F, center: f64, opts: AdaptiveOptions) -> Result<QuadResult<T>> {
    let right = adaptive_semi_infinite(&f, center, opts)?;
    let left = adaptive_semi_infinite(|x: f64| f(2.0 * center - x), center, opts)?;
    Ok(QuadResult {
        value: right.value + left.value,
        error: right.error + left.error,
        evals: right.evals + left.evals,
        suspected_discontinuity: right.suspected_discontinuity || left.suspected_discontinuity,
    })
}

/// Composite Gauss-Legendre with `panels` equal panels of `n` nodes.
pub fn composite_gl<T: Scalar, F: Fn(f64) -> T>(f: F, a: f64, b: f64, n: usize, panels: usize) -> T {
    let rule = QuadratureRule::gauss_legendre(n);
    let step = (b - a) / panels as f64;
    let mut acc = T::zero();
    for k in 0..panels {
        let lo = a + k as f64 * step;
        acc += rule.integrate(&f, lo, lo + step);
    }
    acc
}
