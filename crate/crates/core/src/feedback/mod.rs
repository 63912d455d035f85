//! Triplet judgments: sampling, simulated and human judges, budget
//! accounting and judgment-prediction accuracy.

mod budget;
mod queue;

pub use budget::Budget;
pub use queue::{HumanJudge, JudgmentQueue, PendingRequest};

use std::collections::{HashMap, VecDeque};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use crate::tasks::RenderPayload;

use crate::engine::Individual;
use crate::error::{QdError, Result};
use crate::learn::{FeatureSource, LatentModel};
use crate::tasks::Task;

/// Ids of a reference and two candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triplet {
    pub ref_id: u64,
    pub a_id: u64,
    pub b_id: u64,
}

impl Triplet {
    pub fn ids(&self) -> [u64; 3] {
        [self.ref_id, self.a_id, self.b_id]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Choice {
    ACloser,
    BCloser,
}

impl Choice {
    pub fn flipped(self) -> Self {
        match self {
            Choice::ACloser => Choice::BCloser,
            Choice::BCloser => Choice::ACloser,
        }
    }
}

/// A judge's answer to one triplet. `Resample` carries no information:
/// an oracle tie or a human skip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Choice(Choice),
    Resample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JudgmentSource {
    Oracle,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub triplet: Triplet,
    pub choice: Choice,
    pub source: JudgmentSource,
}

impl Judgment {
    /// `(closer, farther)` candidate ids.
    pub fn preferred_and_other(&self) -> (u64, u64) {
        match self.choice {
            Choice::ACloser => (self.triplet.a_id, self.triplet.b_id),
            Choice::BCloser => (self.triplet.b_id, self.triplet.a_id),
        }
    }
}

/// `n` triplets of three distinct ids drawn uniformly from `population`.
/// Ids may repeat across triplets.
pub fn sample_triplets<R: Rng + ?Sized>(population: &[u64], n: usize, rng: &mut R) -> Result<Vec<Triplet>> {
    if population.len() < 3 {
        return Err(QdError::PopulationTooSmall(population.len()));
    }
    Ok((0..n)
        .map(|_| {
            let picks = index::sample(rng, population.len(), 3);
            Triplet {
                ref_id: population[picks.index(0)],
                a_id: population[picks.index(1)],
                b_id: population[picks.index(2)],
            }
        })
        .collect())
}

/// Distance gap below which the oracle declares a tie.
pub const ORACLE_TIE_TOLERANCE: f64 = 1e-9;

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Simulated 2AFC answer from ground-truth measures: the candidate with the
/// smaller L2 distance to the reference is closer.
pub fn oracle_verdict(gt_ref: &[f64], gt_a: &[f64], gt_b: &[f64]) -> Verdict {
    let da = l2(gt_ref, gt_a);
    let db = l2(gt_ref, gt_b);
    if (da - db).abs() <= ORACLE_TIE_TOLERANCE {
        Verdict::Resample
    } else if da < db {
        Verdict::Choice(Choice::ACloser)
    } else {
        Verdict::Choice(Choice::BCloser)
    }
}

/// [`oracle_verdict`] over a measure lookup table.
pub fn oracle_judge<M: AsRef<[f64]>>(triplet: &Triplet, gt_measures: &HashMap<u64, M>) -> Result<Verdict> {
    let get = |id| gt_measures.get(&id).map(AsRef::as_ref).ok_or(QdError::MissingMeasures(id));
    Ok(oracle_verdict(get(triplet.ref_id)?, get(triplet.a_id)?, get(triplet.b_id)?))
}

/// Fraction of judgments whose recorded choice matches the candidate nearer
/// to the reference in latent space. Exact latent ties predict `BCloser`.
pub fn validate_accuracy<F: FeatureSource>(model: &LatentModel, features: &F, judgments: &[Judgment]) -> Result<f64> {
    if judgments.is_empty() {
        return Err(QdError::EmptyJudgments);
    }
    let mut correct = 0usize;
    for j in judgments {
        let z = |id| -> Result<Vec<f64>> { model.project(features.features(id).ok_or(QdError::MissingFeatures(id))?) };
        let zr = z(j.triplet.ref_id)?;
        let predicted = if l2(&zr, &z(j.triplet.a_id)?) < l2(&zr, &z(j.triplet.b_id)?) {
            Choice::ACloser
        } else {
            Choice::BCloser
        };
        correct += usize::from(predicted == j.choice);
    }
    Ok(correct as f64 / judgments.len() as f64)
}

/// Source of 2AFC answers for the optimizer.
///
/// Triplets are queued with [`Judge::enqueue`]; [`Judge::next_verdict`]
/// blocks until one of them is answered. Implementations answer in FIFO
/// order when the answerer does.
pub trait Judge: Send {
    fn source(&self) -> JudgmentSource;
    fn enqueue(&mut self, triplet: Triplet, items: [&Individual; 3], task: &dyn Task) -> Result<()>;
    fn next_verdict(&mut self) -> Result<(Triplet, Verdict)>;
}

/// In-process simulated judge using ground-truth measures.
#[derive(Debug, Default)]
pub struct OracleJudge {
    answers: VecDeque<(Triplet, Verdict)>,
}

impl OracleJudge {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Judge for OracleJudge {
    fn source(&self) -> JudgmentSource {
        JudgmentSource::Oracle
    }

    fn enqueue(&mut self, triplet: Triplet, items: [&Individual; 3], _task: &dyn Task) -> Result<()> {
        let [r, a, b] = items;
        self.answers
            .push_back((triplet, oracle_verdict(&r.gt_measures, &a.gt_measures, &b.gt_measures)));
        Ok(())
    }

    fn next_verdict(&mut self) -> Result<(Triplet, Verdict)> {
        self.answers.pop_front().ok_or(QdError::JudgeDisconnected)
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn triplets_from_three_ids() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = sample_triplets(&[1, 2, 3], 1, &mut rng).unwrap();
        let mut ids = t[0].ids();
        ids.sort();
        assert_eq!(ids, [1, 2, 3]);
        assert!(sample_triplets(&[1, 2, 3], 0, &mut rng).unwrap().is_empty());
        assert!(matches!(sample_triplets(&[1, 2], 1, &mut rng), Err(QdError::PopulationTooSmall(2))));
    }

    #[test]
    fn many_triplets_from_small_population() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop: Vec<u64> = (0..100).collect();
        let ts = sample_triplets(&pop, 250, &mut rng).unwrap();
        assert_eq!(ts.len(), 250);
        for t in ts {
            assert!(t.ref_id != t.a_id && t.a_id != t.b_id && t.ref_id != t.b_id);
        }
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_verdict(&[0.0, 0.0], &[0.0, 1.0], &[2.0, 0.0]), Verdict::Choice(Choice::ACloser));
        assert_eq!(oracle_verdict(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]), Verdict::Resample);
        // 0.1 vs sqrt(0.32) ~ 0.566
        assert_eq!(oracle_verdict(&[0.5, 0.5], &[0.5, 0.6], &[0.1, 0.1]), Verdict::Choice(Choice::ACloser));
    }

    #[test]
    fn oracle_missing_measures() {
        let gt: HashMap<u64, Vec<f64>> = [(1, vec![0.0, 0.0]), (2, vec![1.0, 0.0])].into();
        let t = Triplet {
            ref_id: 1,
            a_id: 2,
            b_id: 3,
        };
        assert!(matches!(oracle_judge(&t, &gt), Err(QdError::MissingMeasures(3))));
    }

    #[test]
    fn empty_validation_set_rejected() {
        let m = LatentModel::Linear(crate::learn::LinearProjection {
            input_dim: 1,
            latent_dim: 1,
            weights: vec![1.0],
            offset: vec![0.0],
        });
        let f: HashMap<u64, Vec<f64>> = HashMap::new();
        assert!(matches!(validate_accuracy(&m, &f, &[]), Err(QdError::EmptyJudgments)));
    }
}
