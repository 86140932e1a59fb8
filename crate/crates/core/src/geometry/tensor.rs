//! Totally antisymmetric tensors and the Hodge dual.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use smallvec::SmallVec;

use super::Metric;
use crate::error::{FieldError, Result};

type Index = SmallVec<[usize; 4]>;

/// Sign of the permutation taking `indices` to increasing order; zero on repeats.
pub fn levi_civita_sign(indices: &[usize]) -> i32 {
    let mut v: Vec<usize> = indices.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return 0;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

/// Rank-`N` antisymmetric tensor in `D` dimensions, stored by strictly
/// increasing index tuples. `upper` records the index position.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymmetricTensor {
    rank: usize,
    dim: usize,
    upper: bool,
    comps: BTreeMap<Index, f64>,
}

fn increasing_tuples(rank: usize, dim: usize) -> Vec<Index> {
    let mut out: Vec<Index> = vec![Index::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|p| {
                let start = p.last().map_or(0, |&l| l + 1);
                (start..dim).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

fn all_tuples(rank: usize, dim: usize) -> Vec<Index> {
    let mut out: Vec<Index> = vec![Index::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..dim).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

impl AntisymmetricTensor {
    pub fn zeros(rank: usize, dim: usize, upper: bool) -> Result<Self> {
        if rank > dim {
            return Err(FieldError::Domain(format!("rank {rank} exceeds dimension {dim}")));
        }
        Ok(Self { rank, dim, upper, comps: increasing_tuples(rank, dim).into_iter().map(|i| (i, 0.0)).collect() })
    }

    /// Builds the tensor from its values on increasing index tuples.
    pub fn from_fn<F: Fn(&[usize]) -> f64>(rank: usize, dim: usize, upper: bool, f: F) -> Result<Self> {
        let mut t = Self::zeros(rank, dim, upper)?;
        for (k, v) in t.comps.iter_mut() {
            *v = f(k);
        }
        Ok(t)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn is_upper(&self) -> bool {
        self.upper
    }

    /// Component for any index order, with the permutation sign applied.
    pub fn get(&self, indices: &[usize]) -> f64 {
        let s = levi_civita_sign(indices);
        if s == 0 || indices.len() != self.rank {
            return 0.0;
        }
        let mut key: Index = indices.iter().copied().collect();
        key.sort_unstable();
        s as f64 * self.comps.get(&key).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, indices: &[usize], value: f64) -> Result<()> {
        if indices.len() != self.rank || indices.iter().any(|&i| i >= self.dim) {
            return Err(FieldError::Domain(format!("bad index tuple {indices:?}")));
        }
        let s = levi_civita_sign(indices);
        if s == 0 {
            return Err(FieldError::Domain("repeated index in an antisymmetric tensor".into()));
        }
        let mut key: Index = indices.iter().copied().collect();
        key.sort_unstable();
        self.comps.insert(key, s as f64 * value);
        Ok(())
    }

    /// Canonical components in increasing-tuple order.
    pub fn components(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.comps.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.comps.iter().map(|(k, v)| (v - other.comps.get(k).copied().unwrap_or(0.0)).abs()).fold(0.0, f64::max)
    }
}

fn transform(t: &AntisymmetricTensor, g: &DMatrix<f64>, upper: bool) -> Result<AntisymmetricTensor> {
    let all = all_tuples(t.rank, t.dim);
    AntisymmetricTensor::from_fn(t.rank, t.dim, upper, |out| {
        all.iter()
            .map(|j| {
                let w: f64 = out.iter().zip(j).map(|(&a, &b)| g[(a, b)]).product();
                if w == 0.0 {
                    0.0
                } else {
                    w * t.get(j)
                }
            })
            .sum()
    })
}

/// Moves every index of an upper tensor down with `g_ij`, or up with `g^ij`
/// for a lower one.
pub fn lower_indices(t: &AntisymmetricTensor, m: &Metric, x: &[f64]) -> Result<AntisymmetricTensor> {
    if t.upper {
        transform(t, &m.at(x)?, false)
    } else {
        transform(t, &m.inverse_at(x)?, true)
    }
}

/// `T~^J = eps~^{J I} T_I` summed over increasing `I`, with
/// `eps~^{1..D} = 1/sqrt|g|`; an upper-index input uses `eps~_{1..D} = sqrt|g|`
/// and returns lower indices. Coordinate order fixes the orientation.
pub fn hodge_dual(t: &AntisymmetricTensor, m: &Metric, x: &[f64]) -> Result<AntisymmetricTensor> {
    let d = m.dimension();
    if t.dim != d {
        return Err(FieldError::DimensionMismatch { expected: d, found: t.dim });
    }
    let sg = m.sqrt_det(x)?;
    let factor = if t.upper { sg } else { 1.0 / sg };
    let sources = increasing_tuples(t.rank, d);
    AntisymmetricTensor::from_fn(d - t.rank, d, !t.upper, |j| {
        sources
            .iter()
            .map(|i| {
                let mut full: Vec<usize> = j.to_vec();
                full.extend_from_slice(i);
                levi_civita_sign(&full) as f64 * t.get(i)
            })
            .sum::<f64>()
            * factor
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_convention() {
        assert_eq!(levi_civita_sign(&[0, 1, 2]), 1);
        assert_eq!(levi_civita_sign(&[1, 0, 2]), -1);
        assert_eq!(levi_civita_sign(&[2, 0, 1]), 1);
        assert_eq!(levi_civita_sign(&[0, 0, 1]), 0);
    }

    #[test]
    fn storage_is_antisymmetric() {
        let mut t = AntisymmetricTensor::zeros(2, 3, false).unwrap();
        t.set(&[2, 0], 1.5).unwrap();
        assert_eq!(t.get(&[0, 2]), -1.5);
        assert_eq!(t.get(&[2, 0]), 1.5);
        assert!(t.set(&[1, 1], 1.0).is_err());
        assert!(AntisymmetricTensor::zeros(4, 3, false).is_err());
    }

    #[test]
    fn double_dual_sign() {
        let m = Metric::spherical();
        let x = [1.3, 0.7, 0.2];
        for rank in 0..=3 {
            let t = AntisymmetricTensor::from_fn(rank, 3, false, |i| 1.0 + i.iter().sum::<usize>() as f64).unwrap();
            let back = hodge_dual(&lower_indices(&hodge_dual(&t, &m, &x).unwrap(), &m, &x).unwrap(), &m, &x).unwrap();
            let back = lower_indices(&back, &m, &x).unwrap();
            let sign = if (rank * (3 - rank)) % 2 == 0 { 1.0 } else { -1.0 };
            let expect = AntisymmetricTensor::from_fn(rank, 3, false, |i| sign * t.get(i)).unwrap();
            assert!(back.max_abs_diff(&expect) < 1e-12, "rank {rank}");
        }
    }
}
