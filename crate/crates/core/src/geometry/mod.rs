//! Riemannian geometry from a metric supplied as a function of coordinates.
//!
//! Every metric derivative is a fourth-order central difference, i.e. one
//! Richardson step on the plain central difference of step `h`. Derivatives of
//! derived quantities (Christoffels inside curvature, fluxes inside the
//! Laplacian) use an outer step of `10 h` so round-off stays below truncation.

mod surface;
mod tensor;

pub use surface::{directed_surface_element, surface_area, EmbeddedSurface, JacobianFn};
pub use tensor::{hodge_dual, levi_civita_sign, lower_indices, AntisymmetricTensor};

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{FieldError, Result};

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// `g_ij(x)` in `dimension` coordinates.
#[derive(Clone)]
pub struct Metric {
    dimension: usize,
    components: MetricFn,
}

impl Metric {
    pub fn new(dimension: usize, components: MetricFn) -> Self {
        Self { dimension, components }
    }

    pub fn euclidean(dimension: usize) -> Self {
        Self::new(dimension, Arc::new(move |_| DMatrix::identity(dimension, dimension)))
    }

    /// `dr^2 + r^2 dphi^2` in `(r, phi)`.
    pub fn polar() -> Self {
        Self::new(2, Arc::new(|x| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, x[0] * x[0]]))))
    }

    /// `dr^2 + r^2 (dtheta^2 + sin^2 theta dphi^2)` in `(r, theta, phi)`.
    pub fn spherical() -> Self {
        Self::new(
            3,
            Arc::new(|x| {
                let r2 = x[0] * x[0];
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, r2, r2 * x[1].sin().powi(2)]))
            }),
        )
    }

    /// Round 2-sphere of `radius` in `(theta, phi)`.
    pub fn sphere(radius: f64) -> Self {
        let r2 = radius * radius;
        Self::new(2, Arc::new(move |x| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![r2, r2 * x[0].sin().powi(2)]))))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Components at `x`, checked for shape and symmetry.
    pub fn at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if x.len() != self.dimension {
            return Err(FieldError::DimensionMismatch { expected: self.dimension, found: x.len() });
        }
        let g = (self.components)(x);
        if g.nrows() != self.dimension || g.ncols() != self.dimension {
            return Err(FieldError::DimensionMismatch { expected: self.dimension, found: g.nrows() });
        }
        let scale = g.amax().max(1e-300);
        if (&g - g.transpose()).amax() > 1e-12 * scale {
            return Err(FieldError::Domain(format!("metric is not symmetric at {x:?}")));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(FieldError::Domain(format!("metric is not finite at {x:?}")));
        }
        Ok(g)
    }

    /// `g^ij(x)`.
    pub fn inverse_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.at(x)?;
        let det = g.determinant();
        if !(det.abs() > 1e-300) || det.abs() < 1e-14 * g.amax().powi(self.dimension as i32) {
            return Err(FieldError::NoInverse);
        }
        g.try_inverse().ok_or(FieldError::NoInverse)
    }

    /// `sqrt|det g|`.
    pub fn sqrt_det(&self, x: &[f64]) -> Result<f64> {
        Ok(self.at(x)?.determinant().abs().sqrt())
    }

    /// Whether `g` is positive definite at every sample point.
    pub fn is_riemannian_at(&self, points: &[Vec<f64>]) -> Result<bool> {
        for p in points {
            let g = self.at(p)?;
            if g.symmetric_eigenvalues().iter().any(|&e| e <= 0.0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Fourth-order central difference of a vector-valued map along coordinate `i`.
pub(crate) fn partial<F>(f: F, x: &[f64], i: usize, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut p = x.to_vec();
    let mut at = |s: f64| {
        p[i] = x[i] + s;
        f(&p)
    };
    let (m2, m1, p1, p2) = (at(-2.0 * h)?, at(-h)?, at(h)?, at(2.0 * h)?);
    Ok((0..m2.len()).map(|k| (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h)).collect())
}

/// `d_l g_ij` for each `l`.
fn metric_derivatives(m: &Metric, x: &[f64], h: f64) -> Result<Vec<DMatrix<f64>>> {
    let d = m.dimension;
    (0..d)
        .map(|l| {
            let v = partial(|p| Ok(m.at(p)?.as_slice().to_vec()), x, l, h)?;
            Ok(DMatrix::from_vec(d, d, v))
        })
        .collect()
}

/// `Gamma^i_jk`, stored densely with `get(i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// `Gamma^i_jk = g^il (d_j g_kl + d_k g_jl - d_l g_jk) / 2`.
pub fn christoffel(m: &Metric, x: &[f64], h: f64) -> Result<Christoffel> {
    let d = m.dimension;
    let ginv = m.inverse_at(x)?;
    let dg = metric_derivatives(m, x, h)?;
    let mut data = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in j..d {
                let mut s = 0.0;
                for l in 0..d {
                    s += ginv[(i, l)] * (dg[j][(k, l)] + dg[k][(j, l)] - dg[l][(j, k)]);
                }
                data[(i * d + j) * d + k] = 0.5 * s;
                data[(i * d + k) * d + j] = 0.5 * s;
            }
        }
    }
    Ok(Christoffel { dim: d, data })
}

/// Riemann `R^i_jkl` (dense, `riemann(i, j, k, l)`), Ricci `R_jl = R^i_jil`
/// and the scalar `g^jl R_jl`.
#[derive(Debug, Clone)]
pub struct Curvature {
    dim: usize,
    riemann: Vec<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

impl Curvature {
    pub fn riemann(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let d = self.dim;
        self.riemann[((i * d + j) * d + k) * d + l]
    }

    /// `R_ijkl = g_ia R^a_jkl`.
    pub fn riemann_lowered(&self, g: &DMatrix<f64>, i: usize, j: usize, k: usize, l: usize) -> f64 {
        (0..self.dim).map(|a| g[(i, a)] * self.riemann(a, j, k, l)).sum()
    }
}

/// `R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj + Gamma^i_sk Gamma^s_lj - Gamma^i_sl Gamma^s_kj`.
pub fn curvature(m: &Metric, x: &[f64], h: f64) -> Result<Curvature> {
    let d = m.dimension;
    let gam = christoffel(m, x, h)?;
    let dgam: Vec<Vec<f64>> = (0..d).map(|k| partial(|p| Ok(christoffel(m, p, h)?.data), x, k, 10.0 * h)).collect::<Result<_>>()?;
    let g_at = |dk: &Vec<f64>, i: usize, j: usize, k: usize| dk[(i * d + j) * d + k];
    let mut riemann = vec![0.0; d * d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut r = g_at(&dgam[k], i, l, j) - g_at(&dgam[l], i, k, j);
                    for s in 0..d {
                        r += gam.get(i, s, k) * gam.get(s, l, j) - gam.get(i, s, l) * gam.get(s, k, j);
                    }
                    riemann[((i * d + j) * d + k) * d + l] = r;
                }
            }
        }
    }
    let mut ricci = DMatrix::zeros(d, d);
    for j in 0..d {
        for l in 0..d {
            ricci[(j, l)] = (0..d).map(|i| riemann[((i * d + j) * d + i) * d + l]).sum();
        }
    }
    let ginv = m.inverse_at(x)?;
    let scalar = ginv.component_mul(&ricci).sum();
    Ok(Curvature { dim: d, riemann, ricci, scalar })
}

/// `nabla_i g_jk`, which vanishes for the Levi-Civita connection; returned as
/// a dense array indexed `(i * D + j) * D + k`.
pub fn metric_covariant_derivative(m: &Metric, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let d = m.dimension;
    let g = m.at(x)?;
    let dg = metric_derivatives(m, x, h)?;
    let gam = christoffel(m, x, h)?;
    let mut out = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut v = dg[i][(j, k)];
                for s in 0..d {
                    v -= gam.get(s, i, j) * g[(s, k)] + gam.get(s, i, k) * g[(j, s)];
                }
                out[(i * d + j) * d + k] = v;
            }
        }
    }
    Ok(out)
}

/// Samples of a geodesic; `halted` records why integration stopped early.
#[derive(Debug, Clone)]
pub struct Geodesic {
    pub lambda: Vec<f64>,
    pub position: Vec<Vec<f64>>,
    pub velocity: Vec<Vec<f64>>,
    pub halted: Option<FieldError>,
}

impl Geodesic {
    /// `g_ij v^i v^j` at every sample.
    pub fn norms(&self, m: &Metric) -> Result<Vec<f64>> {
        self.position
            .iter()
            .zip(&self.velocity)
            .map(|(x, v)| {
                let g = m.at(x)?;
                Ok((0..v.len()).flat_map(|i| (0..v.len()).map(move |j| (i, j))).map(|(i, j)| g[(i, j)] * v[i] * v[j]).sum())
            })
            .collect()
    }
}

fn geodesic_rhs(m: &Metric, x: &[f64], v: &[f64], h: f64) -> Result<Vec<f64>> {
    let d = x.len();
    let gam = christoffel(m, x, h)?;
    let mut acc = vec![0.0; d];
    for (i, a) in acc.iter_mut().enumerate() {
        for j in 0..d {
            for k in 0..d {
                *a -= gam.get(i, j, k) * v[j] * v[k];
            }
        }
    }
    Ok(acc)
}

/// RK4 for `z'' + Gamma z' z' = 0` over `lambda_span` with fixed `step`.
/// A singular or non-finite metric stops the integration and keeps the samples so far.
pub fn geodesic(m: &Metric, x0: &[f64], v0: &[f64], lambda_span: (f64, f64), step: f64, h: f64) -> Result<Geodesic> {
    let d = m.dimension;
    if x0.len() != d || v0.len() != d {
        return Err(FieldError::DimensionMismatch { expected: d, found: x0.len().min(v0.len()) });
    }
    if !(step > 0.0) || !(lambda_span.1 > lambda_span.0) {
        return Err(FieldError::Domain("need step > 0 and an increasing span".into()));
    }
    m.inverse_at(x0)?;
    let nsteps = ((lambda_span.1 - lambda_span.0) / step).round() as usize;
    let mut out = Geodesic { lambda: vec![lambda_span.0], position: vec![x0.to_vec()], velocity: vec![v0.to_vec()], halted: None };
    let (mut x, mut v) = (x0.to_vec(), v0.to_vec());
    let add = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + s * q).collect() };
    for n in 1..=nsteps {
        let stage = || -> Result<(Vec<f64>, Vec<f64>)> {
            let a1 = geodesic_rhs(m, &x, &v, h)?;
            let (x2, v2) = (add(&x, &v, step / 2.0), add(&v, &a1, step / 2.0));
            let a2 = geodesic_rhs(m, &x2, &v2, h)?;
            let (x3, v3) = (add(&x, &v2, step / 2.0), add(&v, &a2, step / 2.0));
            let a3 = geodesic_rhs(m, &x3, &v3, h)?;
            let (x4, v4) = (add(&x, &v3, step), add(&v, &a3, step));
            let a4 = geodesic_rhs(m, &x4, &v4, h)?;
            let nx: Vec<f64> = (0..d).map(|i| x[i] + step / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i])).collect();
            let nv: Vec<f64> = (0..d).map(|i| v[i] + step / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i])).collect();
            if nx.iter().chain(&nv).any(|c| !c.is_finite()) {
                return Err(FieldError::Domain("geodesic left the metric domain".into()));
            }
            Ok((nx, nv))
        };
        match stage() {
            Ok((nx, nv)) => {
                x = nx;
                v = nv;
                out.lambda.push(lambda_span.0 + n as f64 * step);
                out.position.push(x.clone());
                out.velocity.push(v.clone());
            }
            Err(e) => {
                out.halted = Some(e);
                break;
            }
        }
    }
    Ok(out)
}

/// `|g|^{-1/2} d_i (|g|^{1/2} g^ij d_j f)`.
pub fn curved_laplacian<F>(m: &Metric, f: F, x: &[f64], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let d = m.dimension;
    let flux = |p: &[f64]| -> Result<Vec<f64>> {
        let ginv = m.inverse_at(p)?;
        let sg = m.sqrt_det(p)?;
        let grad: Vec<f64> = (0..d).map(|j| partial(|q| Ok(vec![f(q)]), p, j, h).map(|v| v[0])).collect::<Result<_>>()?;
        Ok((0..d).map(|i| sg * (0..d).map(|j| ginv[(i, j)] * grad[j]).sum::<f64>()).collect())
    };
    let mut div = 0.0;
    for i in 0..d {
        div += partial(|p| Ok(vec![flux(p)?[i]]), x, i, 10.0 * h)?[0];
    }
    Ok(div / m.sqrt_det(x)?)
}

/// `nabla_i V^i = d_i V^i + Gamma^i_ik V^k`.
pub fn divergence_christoffel<V>(m: &Metric, v: V, x: &[f64], h: f64) -> Result<f64>
where
    V: Fn(&[f64]) -> Vec<f64>,
{
    let d = m.dimension;
    let gam = christoffel(m, x, h)?;
    let vx = v(x);
    let mut div = 0.0;
    for i in 0..d {
        div += partial(|p| Ok(vec![v(p)[i]]), x, i, h)?[0];
        for k in 0..d {
            div += gam.get(i, i, k) * vx[k];
        }
    }
    Ok(div)
}

/// `|g|^{-1/2} d_i (|g|^{1/2} V^i)`.
pub fn divergence_density<V>(m: &Metric, v: V, x: &[f64], h: f64) -> Result<f64>
where
    V: Fn(&[f64]) -> Vec<f64>,
{
    let d = m.dimension;
    let mut div = 0.0;
    for i in 0..d {
        div += partial(|p| Ok(vec![m.sqrt_det(p)? * v(p)[i]]), x, i, h)?[0];
    }
    Ok(div / m.sqrt_det(x)?)
}

/// `xi^c d_c g_ij + g_ia d_j xi^a + g_ja d_i xi^a`; zero for Killing vectors.
pub fn lie_derivative_metric<V>(m: &Metric, xi: V, x: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    V: Fn(&[f64]) -> Vec<f64>,
{
    let d = m.dimension;
    let g = m.at(x)?;
    let dg = metric_derivatives(m, x, h)?;
    let xv = xi(x);
    let dxi: Vec<Vec<f64>> = (0..d).map(|j| partial(|p| Ok(xi(p)), x, j, h)).collect::<Result<_>>()?;
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut v: f64 = (0..d).map(|c| xv[c] * dg[c][(i, j)]).sum();
            for a in 0..d {
                v += g[(i, a)] * dxi[j][a] + g[(j, a)] * dxi[i][a];
            }
            out[(i, j)] = v;
        }
    }
    Ok(out)
}
