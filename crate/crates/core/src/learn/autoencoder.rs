use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{QdError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeConfig {
    /// Width of the input/output layers; narrower features are zero-padded.
    pub width: usize,
    pub hidden: usize,
    pub latent_dim: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub finetune_epochs: usize,
    pub minibatch: usize,
    /// Training sets larger than this are subsampled per fit.
    pub max_samples: usize,
}

impl Default for AeConfig {
    fn default() -> Self {
        Self {
            width: 64,
            hidden: 32,
            latent_dim: 2,
            learning_rate: 0.01,
            epochs: 50,
            finetune_epochs: 20,
            minibatch: 32,
            max_samples: 1000,
        }
    }
}

/// `width-hidden-latent-hidden-width` auto-encoder with tanh hidden layers
/// and linear bottleneck / output. All parameters live in one flat vector:
/// for each layer, row-major weights (`out x in`) followed by biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoEncoder {
    pub input_dim: usize,
    pub width: usize,
    pub hidden: usize,
    pub latent_dim: usize,
    pub params: Vec<f64>,
}

struct Layer {
    inp: usize,
    out: usize,
    w: usize,
    b: usize,
    tanh: bool,
}

impl AutoEncoder {
    /// Layer widths for `input_dim` features under `cfg`.
    pub fn zeros(input_dim: usize, cfg: &AeConfig) -> Self {
        let width = input_dim.max(cfg.width);
        let mut ae = Self {
            input_dim,
            width,
            hidden: cfg.hidden,
            latent_dim: cfg.latent_dim,
            params: Vec::new(),
        };
        let total = ae.layers().iter().map(|l| l.out * l.inp + l.out).sum();
        ae.params = vec![0.0; total];
        ae
    }

    /// Weights `N(0, 1/fan_in)`, zero biases.
    pub fn random<R: Rng + ?Sized>(input_dim: usize, cfg: &AeConfig, rng: &mut R) -> Self {
        let mut ae = Self::zeros(input_dim, cfg);
        for l in ae.layers() {
            let normal = Normal::new(0.0, (1.0 / l.inp as f64).sqrt()).expect("finite std");
            for p in &mut ae.params[l.w..l.w + l.out * l.inp] {
                *p = normal.sample(rng);
            }
        }
        ae
    }

    fn layers(&self) -> [Layer; 4] {
        let dims = [
            (self.width, self.hidden, true),
            (self.hidden, self.latent_dim, false),
            (self.latent_dim, self.hidden, true),
            (self.hidden, self.width, false),
        ];
        let mut off = 0;
        dims.map(|(inp, out, tanh)| {
            let l = Layer {
                inp,
                out,
                w: off,
                b: off + inp * out,
                tanh,
            };
            off += inp * out + out;
            l
        })
    }

    fn pad(&self, x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        v.resize(self.width, 0.0);
        v
    }

    fn layer_forward(&self, l: &Layer, x: &[f64]) -> Vec<f64> {
        let w = &self.params[l.w..l.b];
        let b = &self.params[l.b..l.b + l.out];
        w.chunks_exact(l.inp)
            .zip(b)
            .map(|(row, bias)| {
                let s = row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + bias;
                if l.tanh {
                    s.tanh()
                } else {
                    s
                }
            })
            .collect()
    }

    fn forward(&self, x: &[f64]) -> [Vec<f64>; 5] {
        let layers = self.layers();
        let a0 = self.pad(x);
        let a1 = self.layer_forward(&layers[0], &a0);
        let a2 = self.layer_forward(&layers[1], &a1);
        let a3 = self.layer_forward(&layers[2], &a2);
        let a4 = self.layer_forward(&layers[3], &a3);
        [a0, a1, a2, a3, a4]
    }

    pub fn encode(&self, x: &[f64]) -> Vec<f64> {
        let layers = self.layers();
        let a1 = self.layer_forward(&layers[0], &self.pad(x));
        self.layer_forward(&layers[1], &a1)
    }

    /// Reconstruction of the (padded) input.
    pub fn reconstruct(&self, x: &[f64]) -> Vec<f64> {
        let [_, _, _, _, out] = self.forward(x);
        out
    }

    /// Mean over samples of the per-output mean squared error.
    pub fn loss<T: AsRef<[f64]>>(&self, batch: &[T]) -> f64 {
        batch
            .iter()
            .map(|x| {
                let [a0, .., a4] = self.forward(x.as_ref());
                a4.iter().zip(&a0).map(|(o, t)| (o - t).powi(2)).sum::<f64>() / self.width as f64
            })
            .sum::<f64>()
            / batch.len() as f64
    }

    /// Loss and its gradient with respect to `params`.
    pub fn loss_and_grad<T: AsRef<[f64]>>(&self, batch: &[T]) -> (f64, Vec<f64>) {
        let layers = self.layers();
        let mut grad = vec![0.0; self.params.len()];
        let mut loss = 0.0;
        let scale = 1.0 / (batch.len() as f64 * self.width as f64);

        for x in batch {
            let acts = self.forward(x.as_ref());
            let mut delta: Vec<f64> = acts[4]
                .iter()
                .zip(&acts[0])
                .map(|(o, t)| {
                    loss += (o - t).powi(2) * scale;
                    2.0 * (o - t) * scale
                })
                .collect();

            for (li, l) in layers.iter().enumerate().rev() {
                let input = &acts[li];
                for (r, d) in delta.iter().enumerate() {
                    let row = &mut grad[l.w + r * l.inp..l.w + (r + 1) * l.inp];
                    row.iter_mut().zip(input).for_each(|(g, a)| *g += d * a);
                    grad[l.b + r] += d;
                }
                if li == 0 {
                    break;
                }
                let w = &self.params[l.w..l.b];
                let mut back = vec![0.0; l.inp];
                for (row, d) in w.chunks_exact(l.inp).zip(&delta) {
                    back.iter_mut().zip(row).for_each(|(b, a)| *b += d * a);
                }
                if layers[li - 1].tanh {
                    back.iter_mut().zip(input).for_each(|(b, a)| *b *= 1.0 - a * a);
                }
                delta = back;
            }
        }
        (loss, grad)
    }
}

/// Minibatch gradient descent on reconstruction error.
///
/// `init` warm-starts training (incremental refits) and must match the
/// feature dimension.
pub fn fit_autoencoder<T: AsRef<[f64]>, R: Rng + ?Sized>(
    rows: &[T],
    cfg: &AeConfig,
    epochs: usize,
    init: Option<&AutoEncoder>,
    rng: &mut R,
) -> Result<AutoEncoder> {
    if rows.is_empty() {
        return Err(QdError::EmptyData);
    }
    if cfg.minibatch == 0 || !(cfg.learning_rate > 0.0) {
        return Err(QdError::InvalidConfig("autoencoder minibatch and learning rate must be positive".into()));
    }
    let d = rows[0].as_ref().len();
    if let Some(bad) = rows.iter().map(|r| r.as_ref().len()).find(|&l| l != d) {
        return Err(QdError::DimensionMismatch { expected: d, got: bad });
    }
    let mut ae = match init {
        Some(m) if m.input_dim == d => m.clone(),
        Some(m) => {
            return Err(QdError::DimensionMismatch {
                expected: m.input_dim,
                got: d,
            })
        }
        None => AutoEncoder::random(d, cfg, rng),
    };

    let data: Vec<&[f64]> = if rows.len() > cfg.max_samples {
        let mut picked = index::sample(rng, rows.len(), cfg.max_samples).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| rows[i].as_ref()).collect()
    } else {
        rows.iter().map(AsRef::as_ref).collect()
    };

    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut batch = Vec::with_capacity(cfg.minibatch);
    for _ in 0..epochs {
        order.shuffle(rng);
        for chunk in order.chunks(cfg.minibatch) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| data[i]));
            let (_, grad) = ae.loss_and_grad(&batch);
            ae.params
                .iter_mut()
                .zip(&grad)
                .for_each(|(p, g)| *p -= cfg.learning_rate * g);
        }
    }
    Ok(ae)
}
