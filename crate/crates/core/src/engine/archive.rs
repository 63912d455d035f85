use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QdError, Result};

/// Fixed-length real vector searched over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genome(pub Arc<[f64]>);

impl Genome {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values.into())
    }
}

impl std::ops::Deref for Genome {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// An evaluated solution. Cloning is cheap: genome and features are shared.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub id: u64,
    pub genome: Genome,
    pub objective: f64,
    pub features: Arc<[f64]>,
    pub gt_measures: Vec<f64>,
    /// Set once a latent model has been applied.
    pub latent_measures: Option<Vec<f64>>,
}

impl Individual {
    pub fn measures(&self, kind: MeasureKind) -> Option<&[f64]> {
        match kind {
            MeasureKind::GroundTruth => Some(&self.gt_measures),
            MeasureKind::Latent => self.latent_measures.as_deref(),
        }
    }
}

/// Which of an individual's measure vectors an archive indexes by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    GroundTruth,
    Latent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasureBounds(Vec<(f64, f64)>);

impl MeasureBounds {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        for (dim, &(low, high)) in bounds.iter().enumerate() {
            if !(low < high) || !low.is_finite() || !high.is_finite() {
                return Err(QdError::InvalidBounds { dim, low, high });
            }
        }
        Ok(Self(bounds))
    }

    /// Per-dimension `[min, max]` of `points`, widened by `margin` times the
    /// span on each side. Degenerate dimensions get a unit span.
    pub fn fit<'a>(points: impl IntoIterator<Item = &'a [f64]>, margin: f64) -> Option<Self> {
        let mut lo: Vec<f64> = Vec::new();
        let mut hi: Vec<f64> = Vec::new();
        for p in points {
            if lo.is_empty() {
                lo = p.to_vec();
                hi = p.to_vec();
                continue;
            }
            for (i, &v) in p.iter().enumerate() {
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
            }
        }
        if lo.is_empty() {
            return None;
        }
        let bounds = lo
            .into_iter()
            .zip(hi)
            .map(|(l, h)| {
                let span = h - l;
                if span > 1e-12 {
                    (l - margin * span, h + margin * span)
                } else {
                    (l - 0.5, h + 0.5)
                }
            })
            .collect();
        Self::new(bounds).ok()
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.0.len() && p.iter().zip(&self.0).all(|(v, &(l, h))| (l..=h).contains(v))
    }
}

/// Grid cell for `measures`: uniform bins over `[low, high)` per dimension,
/// lower edge inclusive, out-of-range values clamped to the edge bins.
pub fn cell_index(measures: &[f64], bounds: &MeasureBounds, shape: &[usize]) -> Result<Vec<usize>> {
    if measures.len() != bounds.dims() {
        return Err(QdError::DimensionMismatch {
            expected: bounds.dims(),
            got: measures.len(),
        });
    }
    if shape.len() != bounds.dims() {
        return Err(QdError::DimensionMismatch {
            expected: bounds.dims(),
            got: shape.len(),
        });
    }
    measures
        .iter()
        .zip(bounds.as_slice())
        .zip(shape)
        .enumerate()
        .map(|(dim, ((&m, &(low, high)), &n))| {
            if !m.is_finite() {
                return Err(QdError::NonFiniteMeasure(dim));
            }
            let frac = (m.clamp(low, high) - low) / (high - low);
            Ok(((frac * n as f64).floor() as usize).min(n - 1))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    NewCell,
    Improved,
    Rejected,
}

impl InsertOutcome {
    pub fn accepted(self) -> bool {
        !matches!(self, InsertOutcome::Rejected)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elite {
    pub cell: Vec<usize>,
    pub individual: Individual,
}

/// Uniform grid archive holding at most one elite per cell.
///
/// Elites are kept in a dense vector (in first-fill order) so that uniform
/// parent selection is O(1) and deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    shape: Vec<usize>,
    bounds: MeasureBounds,
    kind: MeasureKind,
    slots: Vec<Option<usize>>,
    elites: Vec<Elite>,
}

impl Archive {
    pub fn new(shape: Vec<usize>, bounds: MeasureBounds, kind: MeasureKind) -> Result<Self> {
        if shape.len() != bounds.dims() {
            return Err(QdError::DimensionMismatch {
                expected: bounds.dims(),
                got: shape.len(),
            });
        }
        if shape.contains(&0) {
            return Err(QdError::InvalidConfig("archive shape entries must be positive".into()));
        }
        let total = shape.iter().product();
        Ok(Self {
            shape,
            bounds,
            kind,
            slots: vec![None; total],
            elites: Vec::new(),
        })
    }

    /// Empty archive with the same geometry and measure kind.
    pub fn empty_like(&self) -> Self {
        Self::new(self.shape.clone(), self.bounds.clone(), self.kind).expect("valid geometry")
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn bounds(&self) -> &MeasureBounds {
        &self.bounds
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn total_cells(&self) -> usize {
        self.slots.len()
    }

    pub fn len(&self) -> usize {
        self.elites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elites.is_empty()
    }

    pub fn elites(&self) -> &[Elite] {
        &self.elites
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Individual> {
        self.elites.iter().map(|e| &e.individual)
    }

    pub fn get(&self, cell: &[usize]) -> Option<&Elite> {
        self.slots[self.flat(cell)].map(|i| &self.elites[i])
    }

    pub fn best(&self) -> Option<&Elite> {
        self.elites
            .iter()
            .max_by(|a, b| a.individual.objective.total_cmp(&b.individual.objective))
    }

    pub fn cell_of(&self, ind: &Individual) -> Result<Vec<usize>> {
        let m = ind.measures(self.kind).ok_or(QdError::DimensionMismatch {
            expected: self.bounds.dims(),
            got: 0,
        })?;
        cell_index(m, &self.bounds, &self.shape)
    }

    fn flat(&self, cell: &[usize]) -> usize {
        cell.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Keeps the higher-objective individual per cell; ties keep the incumbent.
    pub fn insert(&mut self, ind: Individual) -> Result<InsertOutcome> {
        let cell = self.cell_of(&ind)?;
        let flat = self.flat(&cell);
        match self.slots[flat] {
            None => {
                self.slots[flat] = Some(self.elites.len());
                self.elites.push(Elite { cell, individual: ind });
                Ok(InsertOutcome::NewCell)
            }
            Some(i) if ind.objective > self.elites[i].individual.objective => {
                self.elites[i].individual = ind;
                Ok(InsertOutcome::Improved)
            }
            Some(_) => Ok(InsertOutcome::Rejected),
        }
    }
}
