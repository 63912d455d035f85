use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{affine, FeatureSource};
use crate::error::{QdError, Result};
use crate::feedback::Judgment;

/// Hyper-parameters for contrastive training of the linear projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub latent_dim: usize,
    pub margin: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Epochs for warm-started fine-tunes during online runs.
    pub finetune_epochs: usize,
    pub minibatch: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            latent_dim: 2,
            margin: 0.05,
            learning_rate: 1e-2,
            epochs: 100,
            finetune_epochs: 50,
            minibatch: 32,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.margin > 0.0) {
            return Err(QdError::InvalidConfig("margin must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(QdError::InvalidConfig("learning rate must be positive".into()));
        }
        if self.minibatch == 0 || self.latent_dim == 0 {
            return Err(QdError::InvalidConfig("minibatch and latent_dim must be positive".into()));
        }
        Ok(())
    }
}

/// `z = W (y - offset)` with `W` stored row-major as `latent_dim x input_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProjection {
    pub input_dim: usize,
    pub latent_dim: usize,
    pub weights: Vec<f64>,
    pub offset: Vec<f64>,
}

impl LinearProjection {
    /// Weights drawn i.i.d. from `N(0, 1/input_dim)`.
    pub fn random<R: Rng + ?Sized>(input_dim: usize, latent_dim: usize, offset: Vec<f64>, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, (1.0 / input_dim as f64).sqrt()).expect("finite std");
        Self {
            input_dim,
            latent_dim,
            weights: (0..input_dim * latent_dim).map(|_| normal.sample(rng)).collect(),
            offset,
        }
    }

    pub fn apply(&self, features: &[f64]) -> Vec<f64> {
        affine(&self.weights, self.input_dim, features, &self.offset)
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Hinge loss `max(0, m + D(ref, preferred) - D(ref, other))` with
/// Euclidean `D`.
pub fn triplet_loss(z_ref: &[f64], z_preferred: &[f64], z_other: &[f64], margin: f64) -> f64 {
    (margin + distance(z_ref, z_preferred) - distance(z_ref, z_other)).max(0.0)
}

/// Loss of one triplet through the projection and its gradient with
/// respect to `(weights, offset)`.
///
/// The offset cancels in every distance, so its gradient is identically
/// zero; it is returned for completeness.
pub fn triplet_loss_grad(
    model: &LinearProjection,
    x_ref: &[f64],
    x_preferred: &[f64],
    x_other: &[f64],
    margin: f64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let d = model.input_dim;
    let mut grad_w = vec![0.0; model.weights.len()];
    let grad_offset = vec![0.0; d];

    let u: Vec<f64> = x_ref.iter().zip(x_preferred).map(|(a, b)| a - b).collect();
    let v: Vec<f64> = x_ref.iter().zip(x_other).map(|(a, b)| a - b).collect();
    let zero = vec![0.0; d];
    let pu = affine(&model.weights, d, &u, &zero);
    let pv = affine(&model.weights, d, &v, &zero);
    let du = pu.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dv = pv.iter().map(|x| x * x).sum::<f64>().sqrt();

    let loss = margin + du - dv;
    if loss <= 0.0 {
        return (0.0, grad_w, grad_offset);
    }
    for (r, row) in grad_w.chunks_exact_mut(d).enumerate() {
        let cu = if du > 0.0 { pu[r] / du } else { 0.0 };
        let cv = if dv > 0.0 { pv[r] / dv } else { 0.0 };
        for ((g, ui), vi) in row.iter_mut().zip(&u).zip(&v) {
            *g = cu * ui - cv * vi;
        }
    }
    (loss, grad_w, grad_offset)
}

/// Minibatch gradient descent on the mean triplet loss.
///
/// Starts from `init` when given (fine-tuning); otherwise from random
/// weights with the offset at the mean of the referenced features.
pub fn train_projection<F: FeatureSource, R: Rng + ?Sized>(
    features: &F,
    judgments: &[Judgment],
    cfg: &TrainConfig,
    init: Option<&LinearProjection>,
    rng: &mut R,
) -> Result<LinearProjection> {
    cfg.validate()?;
    if judgments.is_empty() {
        return Err(QdError::EmptyJudgments);
    }
    let lookup = |id: u64| features.features(id).ok_or(QdError::MissingFeatures(id));
    let mut triples = Vec::with_capacity(judgments.len());
    for j in judgments {
        let (pref, other) = j.preferred_and_other();
        triples.push((lookup(j.triplet.ref_id)?, lookup(pref)?, lookup(other)?));
    }
    let d = triples[0].0.len();
    if let Some(bad) = triples
        .iter()
        .flat_map(|(a, b, c)| [a.len(), b.len(), c.len()])
        .find(|&len| len != d)
    {
        return Err(QdError::DimensionMismatch { expected: d, got: bad });
    }

    let mut model = match init {
        Some(m) => {
            if m.input_dim != d {
                return Err(QdError::DimensionMismatch {
                    expected: m.input_dim,
                    got: d,
                });
            }
            m.clone()
        }
        None => {
            let mut mean = vec![0.0; d];
            for (a, b, c) in &triples {
                for x in [a, b, c] {
                    for (m, v) in mean.iter_mut().zip(x.iter()) {
                        *m += v;
                    }
                }
            }
            let n = 3.0 * triples.len() as f64;
            mean.iter_mut().for_each(|m| *m /= n);
            LinearProjection::random(d, cfg.latent_dim, mean, rng)
        }
    };

    let mut order: Vec<usize> = (0..triples.len()).collect();
    let mut grad = vec![0.0; model.weights.len()];
    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        for batch in order.chunks(cfg.minibatch) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                let (r, p, o) = triples[i];
                let (loss, gw, _) = triplet_loss_grad(&model, r, p, o, cfg.margin);
                if loss > 0.0 {
                    grad.iter_mut().zip(&gw).for_each(|(g, x)| *g += x);
                }
            }
            let step = cfg.learning_rate / batch.len() as f64;
            model.weights.iter_mut().zip(&grad).for_each(|(w, g)| *w -= step * g);
        }
    }
    Ok(model)
}
