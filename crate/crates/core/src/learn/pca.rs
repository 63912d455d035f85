use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::affine;
use crate::error::{QdError, Result};

/// `z = C (y - mean)` where the rows of `C` are the leading principal axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaProjection {
    pub input_dim: usize,
    pub latent_dim: usize,
    pub mean: Vec<f64>,
    /// Row-major `latent_dim x input_dim`, orthonormal rows.
    pub components: Vec<f64>,
    /// Sample-covariance eigenvalues matching `components`, descending.
    pub eigenvalues: Vec<f64>,
}

impl PcaProjection {
    pub fn apply(&self, features: &[f64]) -> Vec<f64> {
        affine(&self.components, self.input_dim, features, &self.mean)
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.input_dim..(i + 1) * self.input_dim]
    }
}

/// Top-`k` eigenvectors of the sample covariance (`n - 1` denominator).
///
/// Each component's sign is fixed so that its largest-magnitude entry is
/// positive.
pub fn fit_pca<T: AsRef<[f64]>>(rows: &[T], k: usize) -> Result<PcaProjection> {
    let n = rows.len();
    if k == 0 {
        return Err(QdError::InvalidConfig("PCA needs at least one component".into()));
    }
    if n < k {
        return Err(QdError::NotEnoughSamples { n, k });
    }
    let d = rows[0].as_ref().len();
    if k > d {
        return Err(QdError::DimensionMismatch { expected: k, got: d });
    }
    if let Some(bad) = rows.iter().map(|r| r.as_ref().len()).find(|&l| l != d) {
        return Err(QdError::DimensionMismatch { expected: d, got: bad });
    }

    let mut mean = vec![0.0; d];
    for r in rows {
        mean.iter_mut().zip(r.as_ref()).for_each(|(m, v)| *m += v);
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let centered = DMatrix::from_fn(n, d, |i, j| rows[i].as_ref()[j] - mean[j]);
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    let cov = (centered.transpose() * &centered) / denom;

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut components = Vec::with_capacity(k * d);
    let mut eigenvalues = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let col = eig.eigenvectors.column(idx);
        let pivot = col
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(1.0);
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        components.extend(col.iter().map(|v| sign * v));
        eigenvalues.push(eig.eigenvalues[idx]);
    }

    Ok(PcaProjection {
        input_dim: d,
        latent_dim: k,
        mean,
        components,
        eigenvalues,
    })
}
