//! Latent models that map task features to a low-dimensional measure space.
//!
//! [`LinearProjection`] is trained from triplet judgments with a hinge
//! loss on Euclidean distances. [`PcaProjection`] and [`AutoEncoder`] are
//! the unsupervised baselines.

mod autoencoder;
mod linear;
mod pca;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use autoencoder::{fit_autoencoder, AeConfig, AutoEncoder};
pub use linear::{
    train_projection, triplet_loss, triplet_loss_grad, LinearProjection, TrainConfig,
};
pub use pca::{fit_pca, PcaProjection};

use crate::error::{QdError, Result};

/// Lookup of feature vectors by individual id.
pub trait FeatureSource {
    fn features(&self, id: u64) -> Option<&[f64]>;
}

impl FeatureSource for HashMap<u64, Vec<f64>> {
    fn features(&self, id: u64) -> Option<&[f64]> {
        self.get(&id).map(Vec::as_slice)
    }
}

impl FeatureSource for HashMap<u64, Arc<[f64]>> {
    fn features(&self, id: u64) -> Option<&[f64]> {
        self.get(&id).map(|f| &f[..])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum LatentModel {
    Linear(LinearProjection),
    Pca(PcaProjection),
    AutoEncoder(AutoEncoder),
}

impl LatentModel {
    pub fn input_dim(&self) -> usize {
        match self {
            LatentModel::Linear(m) => m.input_dim,
            LatentModel::Pca(m) => m.input_dim,
            LatentModel::AutoEncoder(m) => m.input_dim,
        }
    }

    pub fn latent_dim(&self) -> usize {
        match self {
            LatentModel::Linear(m) => m.latent_dim,
            LatentModel::Pca(m) => m.latent_dim,
            LatentModel::AutoEncoder(m) => m.latent_dim,
        }
    }

    pub fn project(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.input_dim() {
            return Err(QdError::DimensionMismatch {
                expected: self.input_dim(),
                got: features.len(),
            });
        }
        Ok(match self {
            LatentModel::Linear(m) => m.apply(features),
            LatentModel::Pca(m) => m.apply(features),
            LatentModel::AutoEncoder(m) => m.encode(features),
        })
    }
}

/// Row-major `rows x cols` matrix times `x - shift`.
pub(crate) fn affine(matrix: &[f64], cols: usize, x: &[f64], shift: &[f64]) -> Vec<f64> {
    matrix
        .chunks_exact(cols)
        .map(|row| row.iter().zip(x).zip(shift).map(|((w, v), s)| w * (v - s)).sum())
        .collect()
}
