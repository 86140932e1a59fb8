//! JWKB solutions of `-eps^2 psi'' + U psi = 0` away from turning points.
//!
//! Corrections `Q_l` live on a Chebyshev-Lobatto grid over the evaluation
//! interval; the phase `int sqrt(U)` uses adaptive quadrature.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, FieldError, Result};
use crate::quad::{self, AdaptiveOptions};

/// `-eps^2 psi'' + U psi = 0` with corrections kept through `eps^order`.
#[derive(Clone)]
pub struct JwkbProblem {
    pub u: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub epsilon: f64,
    pub order: usize,
}

/// `Plus` decays and `Minus` grows as `x` increases (for `x > x0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JwkbSign {
    Plus,
    Minus,
}

impl JwkbSign {
    fn value(self) -> f64 {
        match self {
            JwkbSign::Plus => 1.0,
            JwkbSign::Minus => -1.0,
        }
    }
}

const CHEB_N: usize = 48;

/// Chebyshev series `c0/2 + sum c_j T_j` on `[a, b]`.
#[derive(Debug, Clone)]
struct Cheb {
    a: f64,
    b: f64,
    c: Vec<f64>,
}

impl Cheb {
    fn nodes(a: f64, b: f64) -> Vec<f64> {
        (0..=CHEB_N).map(|k| 0.5 * (a + b) + 0.5 * (b - a) * (PI * k as f64 / CHEB_N as f64).cos()).collect()
    }

    fn from_values(a: f64, b: f64, f: &[f64]) -> Self {
        let n = CHEB_N;
        let c = (0..=n)
            .map(|j| {
                let mut s = 0.0;
                for (k, &fk) in f.iter().enumerate() {
                    let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                    s += w * fk * (PI * (j * k) as f64 / n as f64).cos();
                }
                let s = 2.0 * s / n as f64;
                if j == n {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect::<Vec<f64>>();
        // round-off coefficients would be amplified by spectral differentiation
        let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let c = c.into_iter().map(|v| if v.abs() < 1e-14 * scale { 0.0 } else { v }).collect();
        Self { a, b, c }
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &cj in self.c.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + cj;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + 0.5 * self.c[0]
    }

    fn derivative(&self) -> Self {
        let n = self.c.len() - 1;
        let mut d = vec![0.0; n + 2];
        for j in (1..=n).rev() {
            d[j - 1] = d[j + 1] + 2.0 * j as f64 * self.c[j];
        }
        d.truncate(n + 1);
        let s = 2.0 / (self.b - self.a);
        Self { a: self.a, b: self.b, c: d.into_iter().map(|v| v * s).collect() }
    }

    /// Antiderivative vanishing at `x0`.
    fn integral_from(&self, x0: f64) -> Self {
        let n = self.c.len() - 1;
        let mut c = vec![0.0; n + 2];
        let coef = |j: usize| if j <= n { self.c[j] } else { 0.0 };
        for j in 1..=n + 1 {
            c[j] = (coef(j - 1) - coef(j + 1)) / (2.0 * j as f64);
        }
        let s = 0.5 * (self.b - self.a);
        let mut out = Self { a: self.a, b: self.b, c: c.into_iter().map(|v| v * s).collect() };
        let v0 = out.eval(x0);
        out.c[0] -= 2.0 * v0;
        out
    }
}

/// JWKB solution prepared on the interval spanned by `x0` and `x_end`.
#[derive(Clone)]
pub struct JwkbSolution {
    x0: f64,
    sign: JwkbSign,
    epsilon: f64,
    q: Vec<Cheb>,
    u_at: Cheb,
    sqrt_u: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl JwkbSolution {
    /// Samples `U` on the path, rejects turning points, and builds `Q_1..Q_order`
    /// from `Q_l = +- 1/2 int_{x0}^x U^{-1/4} (U^{-1/4} Q_{l-1})''`.
    pub fn new(problem: &JwkbProblem, x0: f64, x_end: f64, sign: JwkbSign) -> Result<Self> {
        if !(problem.epsilon > 0.0) {
            return domain("epsilon must be positive");
        }
        let (a, b) = if x0 <= x_end { (x0, x_end) } else { (x_end, x0) };
        let (a, b) = if a == b { (a - 1e-6, b + 1e-6) } else { (a, b) };
        for k in 0..=256 {
            let x = a + (b - a) * k as f64 / 256.0;
            let u = (problem.u)(x);
            if !(u > 0.0) {
                return Err(FieldError::TurningPoint { x });
            }
        }
        let nodes = Cheb::nodes(a, b);
        let uv: Vec<f64> = nodes.iter().map(|&x| (problem.u)(x)).collect();
        if let Some((i, _)) = uv.iter().enumerate().find(|(_, &u)| !(u > 0.0)) {
            return Err(FieldError::TurningPoint { x: nodes[i] });
        }
        let amp: Vec<f64> = uv.iter().map(|u| u.powf(-0.25)).collect();
        let mut q = vec![Cheb::from_values(a, b, &vec![1.0; nodes.len()])];
        for _ in 1..=problem.order {
            let prev = q.last().unwrap();
            let aq: Vec<f64> = nodes.iter().zip(&amp).map(|(&x, &w)| w * prev.eval(x)).collect();
            let d2 = Cheb::from_values(a, b, &aq).derivative().derivative();
            let integrand: Vec<f64> = nodes.iter().zip(&amp).map(|(&x, &w)| 0.5 * sign.value() * w * d2.eval(x)).collect();
            q.push(Cheb::from_values(a, b, &integrand).integral_from(x0));
        }
        let u = problem.u.clone();
        Ok(Self { x0, sign, epsilon: problem.epsilon, q, u_at: Cheb::from_values(a, b, &uv), sqrt_u: Arc::new(move |x| u(x).sqrt()) })
    }

    /// `Q_l(x)`.
    pub fn correction(&self, l: usize, x: f64) -> f64 {
        self.q[l].eval(x)
    }

    /// `psi(x) = U^{-1/4} exp(-+ S / eps) sum eps^l Q_l`, `S = int_{x0}^x sqrt(U)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let s = quad::adaptive(|t| (self.sqrt_u)(t), self.x0, x, AdaptiveOptions::with_tol(1e-13))?.value;
        let u = self.u_at.eval(x);
        let mut sum = 0.0;
        let mut e = 1.0;
        for q in &self.q {
            sum += e * q.eval(x);
            e *= self.epsilon;
        }
        Ok(u.powf(-0.25) * (-self.sign.value() * s / self.epsilon).exp() * sum)
    }
}

/// One-shot JWKB value at `x` for data anchored at `x0`.
pub fn jwkb_solve(problem: &JwkbProblem, x0: f64, x: f64, sign: JwkbSign) -> Result<f64> {
    JwkbSolution::new(problem, x0, x, sign)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_potential_is_exact() {
        let p = JwkbProblem { u: Arc::new(|_| 1.0), epsilon: 0.1, order: 3 };
        let s = JwkbSolution::new(&p, 0.0, 1.0, JwkbSign::Plus).unwrap();
        for l in 1..=3 {
            assert!(s.correction(l, 0.7).abs() < 1e-12);
        }
        assert!((s.eval(0.7).unwrap() / (-7.0f64).exp() - 1.0).abs() < 1e-12);
        let m = jwkb_solve(&p, 0.0, 0.4, JwkbSign::Minus).unwrap();
        assert!((m / 4.0f64.exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn turning_point_rejected() {
        let p = JwkbProblem { u: Arc::new(|x| x - 0.5), epsilon: 0.1, order: 1 };
        assert!(matches!(jwkb_solve(&p, 0.0, 1.0, JwkbSign::Plus), Err(FieldError::TurningPoint { .. })));
    }

    #[test]
    fn chebyshev_calculus() {
        let nodes = Cheb::nodes(0.5, 2.0);
        let f: Vec<f64> = nodes.iter().map(|x| x.sin()).collect();
        let c = Cheb::from_values(0.5, 2.0, &f);
        assert!((c.eval(1.3) - 1.3f64.sin()).abs() < 1e-14);
        assert!((c.derivative().eval(1.3) - 1.3f64.cos()).abs() < 1e-12);
        assert!((c.integral_from(0.5).eval(1.3) - (0.5f64.cos() - 1.3f64.cos())).abs() < 1e-14);
    }
}
