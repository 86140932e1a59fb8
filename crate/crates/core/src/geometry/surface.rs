//! Embedded hypersurfaces: induced metric, area and directed surface elements.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::{partial, Metric};
use crate::error::{FieldError, Result};
use crate::spectra::tensor_grid;

pub type EmbeddingFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// `dx^i / dxi^I` as an ambient-dimension by intrinsic-dimension matrix.
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// `xi -> x(xi)` into an ambient space with metric `ambient`.
#[derive(Clone)]
pub struct EmbeddedSurface {
    intrinsic: usize,
    embedding: EmbeddingFn,
    jacobian: Option<JacobianFn>,
    ambient: Metric,
}

impl EmbeddedSurface {
    pub fn new(intrinsic: usize, embedding: EmbeddingFn, ambient: Metric) -> Result<Self> {
        if intrinsic == 0 || intrinsic > ambient.dimension() {
            return Err(FieldError::Domain(format!("intrinsic dimension {intrinsic} vs ambient {}", ambient.dimension())));
        }
        Ok(Self { intrinsic, embedding, jacobian: None, ambient })
    }

    /// Supplies `dx/dxi` analytically, e.g. where finite differences would
    /// step outside the parameter domain.
    pub fn with_jacobian(mut self, jacobian: JacobianFn) -> Self {
        self.jacobian = Some(jacobian);
        self
    }

    /// Graph `x^{N+1} = f(x^1..x^N)` in flat space.
    pub fn graph(intrinsic: usize, f: crate::poisson::PointFn) -> Self {
        let emb: EmbeddingFn = Arc::new(move |xi: &[f64]| {
            let mut x = xi.to_vec();
            x.push(f(xi));
            x
        });
        Self { intrinsic, embedding: emb, jacobian: None, ambient: Metric::euclidean(intrinsic + 1) }
    }

    pub fn intrinsic_dimension(&self) -> usize {
        self.intrinsic
    }

    pub fn ambient(&self) -> &Metric {
        &self.ambient
    }

    pub fn point(&self, xi: &[f64]) -> Vec<f64> {
        (self.embedding)(xi)
    }

    pub fn jacobian_at(&self, xi: &[f64], h: f64) -> Result<DMatrix<f64>> {
        if xi.len() != self.intrinsic {
            return Err(FieldError::DimensionMismatch { expected: self.intrinsic, found: xi.len() });
        }
        if let Some(j) = &self.jacobian {
            return Ok(j(xi));
        }
        let d = self.ambient.dimension();
        let mut jac = DMatrix::zeros(d, self.intrinsic);
        for col in 0..self.intrinsic {
            let c = partial(|p| Ok((self.embedding)(p)), xi, col, h)?;
            for (row, v) in c.into_iter().enumerate() {
                jac[(row, col)] = v;
            }
        }
        Ok(jac)
    }

    /// `H_IJ = g_ij dx^i/dxi^I dx^j/dxi^J`, rejecting rank-deficient embeddings.
    pub fn induced_metric(&self, xi: &[f64], h: f64) -> Result<DMatrix<f64>> {
        let jac = self.jacobian_at(xi, h)?;
        let g = self.ambient.at(&self.point(xi))?;
        let hm = jac.transpose() * g * &jac;
        // det H <= prod H_II, with equality for orthogonal tangents; the ratio
        // ignores how each parameter is scaled
        let scale: f64 = (0..self.intrinsic).map(|i| hm[(i, i)]).product();
        if !(hm.determinant().abs() > 1e-12 * scale) {
            return Err(FieldError::Domain(format!("degenerate surface at {xi:?}")));
        }
        Ok(hm)
    }

    /// The induced metric as a [`Metric`] on the parameter space. Points
    /// where the embedding degenerates yield non-finite components.
    pub fn induced(&self, h: f64) -> Metric {
        let s = self.clone();
        let n = self.intrinsic;
        Metric::new(n, Arc::new(move |xi| s.induced_metric(xi, h).unwrap_or_else(|_| DMatrix::from_element(n, n, f64::NAN))))
    }
}

/// `int sqrt(det H)` over the tensor product of `axes` (nodes, weights).
pub fn surface_area(surface: &EmbeddedSurface, axes: &[(Vec<f64>, Vec<f64>)], h: f64) -> Result<f64> {
    if axes.len() != surface.intrinsic {
        return Err(FieldError::DimensionMismatch { expected: surface.intrinsic, found: axes.len() });
    }
    let mut area = 0.0;
    for (p, w) in tensor_grid(axes) {
        area += w * surface.induced_metric(&p, h)?.determinant().sqrt();
    }
    Ok(area)
}

/// Lower-index `dSigma_i = sqrt|g| eps_{i a_1 .. a_N} dx^{a_1}/dxi^1 .. dx^{a_N}/dxi^N`
/// for a hypersurface (`N = D - 1`); per unit parameter volume.
pub fn directed_surface_element(surface: &EmbeddedSurface, xi: &[f64], h: f64) -> Result<Vec<f64>> {
    let d = surface.ambient.dimension();
    if surface.intrinsic + 1 != d {
        return Err(FieldError::Configuration("directed elements need a codimension-one surface".into()));
    }
    let jac = surface.jacobian_at(xi, h)?;
    let sg = surface.ambient.sqrt_det(&surface.point(xi))?;
    Ok((0..d)
        .map(|i| {
            let mut m = DMatrix::zeros(d, d);
            m[(i, 0)] = 1.0;
            m.view_mut((0, 1), (d, d - 1)).copy_from(&jac);
            sg * m.determinant()
        })
        .collect())
}
