use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Evaluation, GenomeDomain, RenderPayload, Task};
use crate::engine::MeasureBounds;

/// Planar arm with revolute joints.
///
/// The genome holds relative joint angles. Features are the sines and
/// cosines of the cumulative angles, so the end effector is an exact
/// linear function of the feature vector. The objective rewards low
/// spread of the joint angles: `1 - Var(theta) / pi^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmTask {
    pub link_lengths: Vec<f64>,
}

impl Default for ArmTask {
    fn default() -> Self {
        Self::with_joints(10)
    }
}

impl ArmTask {
    /// Equal links with a total reach of 1.
    pub fn with_joints(num_joints: usize) -> Self {
        assert!(num_joints > 0, "arm needs at least one joint");
        Self {
            link_lengths: vec![1.0 / num_joints as f64; num_joints],
        }
    }

    pub fn num_joints(&self) -> usize {
        self.link_lengths.len()
    }

    fn cumulative_angles(&self, genome: &[f64]) -> Vec<f64> {
        genome
            .iter()
            .scan(0.0, |acc, &t| {
                *acc += t.clamp(-PI, PI);
                Some(*acc)
            })
            .collect()
    }

    /// Joint positions from the base (origin) to the end effector.
    pub fn joint_positions(&self, genome: &[f64]) -> Vec<[f64; 2]> {
        let mut pts = Vec::with_capacity(genome.len() + 1);
        let mut p = [0.0, 0.0];
        pts.push(p);
        for (c, l) in self.cumulative_angles(genome).iter().zip(&self.link_lengths) {
            p = [p[0] + l * c.cos(), p[1] + l * c.sin()];
            pts.push(p);
        }
        pts
    }
}

impl Task for ArmTask {
    fn name(&self) -> &'static str {
        "arm"
    }

    fn genome_domain(&self) -> GenomeDomain {
        GenomeDomain::uniform(self.num_joints(), -PI, PI)
    }

    fn feature_dim(&self) -> usize {
        2 * self.num_joints()
    }

    fn measure_bounds(&self) -> MeasureBounds {
        let reach: f64 = self.link_lengths.iter().sum();
        MeasureBounds::new(vec![(-reach, reach); 2]).expect("positive reach")
    }

    fn evaluate(&self, genome: &[f64]) -> Evaluation {
        assert_eq!(genome.len(), self.num_joints(), "arm genome length");
        let n = self.num_joints();
        let cum = self.cumulative_angles(genome);

        let mut features = vec![0.0; 2 * n];
        let (mut x, mut y) = (0.0, 0.0);
        for (i, (c, l)) in cum.iter().zip(&self.link_lengths).enumerate() {
            let (s, co) = c.sin_cos();
            features[i] = s;
            features[n + i] = co;
            x += l * co;
            y += l * s;
        }

        let clipped: Vec<f64> = genome.iter().map(|t| t.clamp(-PI, PI)).collect();
        let mean = clipped.iter().sum::<f64>() / n as f64;
        let var = clipped.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n as f64;
        let objective = (1.0 - var / (PI * PI)).clamp(0.0, 1.0);

        Evaluation {
            objective,
            features,
            gt_measures: vec![x, y],
        }
    }

    fn render(&self, genome: &[f64]) -> RenderPayload {
        RenderPayload::Arm {
            joints: self.joint_positions(genome),
        }
    }
}
