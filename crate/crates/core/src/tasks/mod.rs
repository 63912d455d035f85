//! Built-in benchmark tasks.
//!
//! A task owns its genome domain and maps a genome to an [`Evaluation`]:
//! an objective in `[0, 1]`, a raw feature vector for latent models, and
//! the ground-truth 2-D measures used by the oracle judge and by the
//! evaluation archives.

mod arm;
pub mod geometry;
mod maze;

pub use arm::ArmTask;
pub use maze::{MazeTask, Pose, Rollout, DEFAULT_LAYOUT};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::MeasureBounds;

/// Result of evaluating one genome.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub features: Vec<f64>,
    pub gt_measures: Vec<f64>,
}

/// Per-coordinate box the genome lives in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenomeDomain(pub Vec<(f64, f64)>);

impl GenomeDomain {
    pub fn uniform(dim: usize, low: f64, high: f64) -> Self {
        Self(vec![(low, high); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn clip(&self, values: &mut [f64]) {
        for (v, &(lo, hi)) in values.iter_mut().zip(&self.0) {
            *v = v.clamp(lo, hi);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.0
            .iter()
            .map(|&(lo, hi)| rng.random_range(lo..=hi))
            .collect()
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        values.len() == self.0.len()
            && values
                .iter()
                .zip(&self.0)
                .all(|(v, &(lo, hi))| (lo..=hi).contains(v))
    }
}

/// Geometry shown to a human judge for one solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RenderPayload {
    /// Joint positions from the base to the end effector.
    Arm { joints: Vec<[f64; 2]> },
    /// Maze walls as `[x1, y1, x2, y2]`, the visited positions and the
    /// final `(x, y, heading)`.
    Maze {
        walls: Vec<[f64; 4]>,
        trajectory: Vec<[f64; 2]>,
        pose: [f64; 3],
    },
}

impl RenderPayload {
    /// The ground-truth position encoded in the payload (arm end effector
    /// or final maze position).
    pub fn position(&self) -> Option<[f64; 2]> {
        match self {
            RenderPayload::Arm { joints } => joints.last().copied(),
            RenderPayload::Maze { pose, .. } => Some([pose[0], pose[1]]),
        }
    }
}

pub trait Task: Send + Sync {
    fn name(&self) -> &'static str;
    fn genome_domain(&self) -> GenomeDomain;
    fn feature_dim(&self) -> usize;
    /// Known bounds of the ground-truth measures.
    fn measure_bounds(&self) -> MeasureBounds;
    fn evaluate(&self, genome: &[f64]) -> Evaluation;
    fn render(&self, genome: &[f64]) -> RenderPayload;

    fn genome_dim(&self) -> usize {
        self.genome_domain().dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Arm,
    Maze,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Arm => "arm",
            TaskKind::Maze => "maze",
        }
    }
}

impl std::str::FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arm" => Ok(TaskKind::Arm),
            "maze" => Ok(TaskKind::Maze),
            other => Err(format!("unknown task '{other}' (expected arm or maze)")),
        }
    }
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
