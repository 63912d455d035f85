use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::geometry::{ray_distance, segments_intersect, Point, Segment};
use super::{Evaluation, GenomeDomain, RenderPayload, Task};
use crate::engine::MeasureBounds;
use crate::error::{QdError, Result};

/// Interior walls of the default layout.
pub const DEFAULT_LAYOUT: &str = include_str!("../../mazes/default.txt");

const INPUTS: usize = 5;
const HIDDEN: usize = 8;
const OUTPUTS: usize = 2;
const GENOME_DIM: usize = INPUTS * HIDDEN + HIDDEN + HIDDEN * OUTPUTS + OUTPUTS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

/// Simplified Khepera-like maze navigation.
///
/// A point robot with three range-limited lasers and two short contact
/// probes is driven by a 5-8-2 tanh MLP whose weights form the genome.
/// A translation whose path touches a wall is cancelled; the rotation of
/// that tick is still applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MazeTask {
    /// Interior walls followed by the four boundary walls.
    pub walls: Vec<Segment>,
    pub start: Pose,
    pub steps: usize,
    pub laser_angles: [f64; 3],
    pub laser_range: f64,
    pub contact_angles: [f64; 2],
    pub contact_range: f64,
    /// Distance covered per tick at full wheel speed (`v_max * dt`).
    pub step_length: f64,
    pub axle: f64,
}

/// Full trace of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    /// Position after each tick.
    pub trajectory: Vec<Point>,
    pub final_pose: Pose,
    pub objective: f64,
}

impl Default for MazeTask {
    fn default() -> Self {
        let walls = parse_layout(DEFAULT_LAYOUT).expect("embedded layout parses");
        Self::with_walls(walls).expect("embedded layout is valid")
    }
}

/// Parses `x1 y1 x2 y2` lines; blank lines and `#` comments are skipped.
pub fn parse_layout(text: &str) -> Result<Vec<Segment>> {
    let mut walls = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| QdError::Layout {
                line: i + 1,
                msg: format!("{e}"),
            })?;
        if nums.len() != 4 {
            return Err(QdError::Layout {
                line: i + 1,
                msg: format!("expected 4 numbers, got {}", nums.len()),
            });
        }
        if nums.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(QdError::Layout {
                line: i + 1,
                msg: "coordinates must lie in [0, 1]".into(),
            });
        }
        walls.push(Segment::new(nums[0], nums[1], nums[2], nums[3]));
    }
    Ok(walls)
}

impl MazeTask {
    /// Builds a maze from interior walls with the default start pose and
    /// kinematic constants.
    pub fn with_walls(interior: Vec<Segment>) -> Result<Self> {
        let mut walls = interior;
        walls.extend([
            Segment::new(0.0, 0.0, 1.0, 0.0),
            Segment::new(1.0, 0.0, 1.0, 1.0),
            Segment::new(1.0, 1.0, 0.0, 1.0),
            Segment::new(0.0, 1.0, 0.0, 0.0),
        ]);
        let task = Self {
            walls,
            start: Pose {
                x: 0.1,
                y: 0.1,
                heading: 0.0,
            },
            steps: 250,
            laser_angles: [FRAC_PI_4, 0.0, -FRAC_PI_4],
            laser_range: 0.2,
            contact_angles: [FRAC_PI_6, -FRAC_PI_6],
            contact_range: 0.02,
            step_length: 0.01,
            axle: 0.05,
        };
        task.validate()?;
        Ok(task)
    }

    pub fn from_layout_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::with_walls(parse_layout(&text)?)
    }

    pub fn with_start(mut self, start: Pose) -> Result<Self> {
        self.start = start;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let Pose { x, y, .. } = self.start;
        if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
            return Err(QdError::InvalidConfig("maze start must lie inside the arena".into()));
        }
        if self.walls.iter().any(|w| w.distance_sq([x, y]) < 1e-18) {
            return Err(QdError::InvalidConfig("maze start lies on a wall".into()));
        }
        Ok(())
    }

    /// Interior walls only (the boundary is implicit).
    pub fn interior_walls(&self) -> &[Segment] {
        &self.walls[..self.walls.len() - 4]
    }

    /// Normalized laser reading in `[0, 1]` for an absolute ray angle.
    pub fn laser(&self, p: Point, angle: f64) -> f64 {
        self.cast(p, angle, self.laser_range) / self.laser_range
    }

    fn cast(&self, p: Point, angle: f64, range: f64) -> f64 {
        let walls: Vec<&Segment> = self.walls.iter().collect();
        cast_dir(&walls, p, [angle.cos(), angle.sin()], range)
    }

    /// Laser readings followed by contact probes for a pose.
    pub fn sensors(&self, pose: &Pose) -> [f64; INPUTS] {
        let (sin, cos) = pose.heading.sin_cos();
        let walls: Vec<&Segment> = self.walls.iter().collect();
        self.sensors_rotated(&walls, [pose.x, pose.y], cos, sin, &self.sensor_offsets())
    }

    /// Unit direction of each sensor relative to a heading of zero.
    fn sensor_offsets(&self) -> [Point; INPUTS] {
        let mut out = [[0.0; 2]; INPUTS];
        for (o, a) in out.iter_mut().zip(self.laser_angles.iter().chain(&self.contact_angles)) {
            *o = [a.cos(), a.sin()];
        }
        out
    }

    fn sensors_rotated(&self, walls: &[&Segment], p: Point, cos: f64, sin: f64, offsets: &[Point; INPUTS]) -> [f64; INPUTS] {
        let mut s = [0.0; INPUTS];
        for (k, [oc, os]) in offsets.iter().enumerate() {
            let dir = [cos * oc - sin * os, sin * oc + cos * os];
            s[k] = if k < 3 {
                cast_dir(walls, p, dir, self.laser_range) / self.laser_range
            } else if cast_dir(walls, p, dir, self.contact_range) < self.contact_range {
                1.0
            } else {
                -1.0
            };
        }
        s
    }

    pub fn rollout(&self, genome: &[f64]) -> Rollout {
        assert_eq!(genome.len(), GENOME_DIM, "maze genome length");
        let policy = Policy::new(genome);
        let mut pose = self.start;
        let mut trajectory = Vec::with_capacity(self.steps);
        let mut reward = 0.0;

        let offsets = self.sensor_offsets();
        // nothing farther than this from the robot can affect one tick
        let reach = self.laser_range.max(self.contact_range).max(self.step_length);
        let mut local: Vec<&Segment> = Vec::with_capacity(self.walls.len());
        for _ in 0..self.steps {
            let (sin, cos) = pose.heading.sin_cos();
            local.clear();
            local.extend(self.walls.iter().filter(|w| near(w, [pose.x, pose.y], reach)));
            let [wl, wr] = policy.act(&self.sensors_rotated(&local, [pose.x, pose.y], cos, sin, &offsets));
            reward -= 0.5 * (wl * wl + wr * wr);

            let forward = 0.5 * (wl + wr) * self.step_length;
            let turn = (wr - wl) * self.step_length / self.axle;
            if forward != 0.0 {
                let from = [pose.x, pose.y];
                let to = [
                    pose.x + forward * cos,
                    pose.y + forward * sin,
                ];
                if !local.iter().any(|w| segments_intersect(from, to, w)) {
                    pose.x = to[0];
                    pose.y = to[1];
                }
            }
            pose.heading = (pose.heading + turn).rem_euclid(TAU);
            trajectory.push([pose.x, pose.y]);
        }

        let objective = if self.steps == 0 {
            1.0
        } else {
            (1.0 + reward / self.steps as f64).clamp(0.0, 1.0)
        };
        Rollout {
            trajectory,
            final_pose: pose,
            objective,
        }
    }
}

impl Task for MazeTask {
    fn name(&self) -> &'static str {
        "maze"
    }

    fn genome_domain(&self) -> GenomeDomain {
        GenomeDomain::uniform(GENOME_DIM, -1.0, 1.0)
    }

    fn feature_dim(&self) -> usize {
        2 * self.steps
    }

    fn measure_bounds(&self) -> MeasureBounds {
        MeasureBounds::new(vec![(0.0, 1.0); 2]).expect("unit square")
    }

    fn evaluate(&self, genome: &[f64]) -> Evaluation {
        let r = self.rollout(genome);
        let features = r.trajectory.iter().flatten().copied().collect();
        Evaluation {
            objective: r.objective,
            features,
            gt_measures: vec![r.final_pose.x, r.final_pose.y],
        }
    }

    fn render(&self, genome: &[f64]) -> RenderPayload {
        let r = self.rollout(genome);
        let mut trajectory = Vec::with_capacity(r.trajectory.len() + 1);
        trajectory.push([self.start.x, self.start.y]);
        trajectory.extend(r.trajectory);
        RenderPayload::Maze {
            walls: self.walls.iter().map(Segment::as_array).collect(),
            trajectory,
            pose: [r.final_pose.x, r.final_pose.y, r.final_pose.heading],
        }
    }
}

/// 5-8-2 MLP with tanh on both layers. Genome layout: hidden weights
/// (row-major 8x5), hidden biases, output weights (row-major 2x8), output
/// biases.
fn cast_dir(walls: &[&Segment], p: Point, dir: Point, range: f64) -> f64 {
    walls
        .iter()
        .filter_map(|w| ray_distance(p, dir, w))
        .fold(range, f64::min)
}

/// Cheap reject: can `w` lie within `r` of `p`?
fn near(w: &Segment, p: Point, r: f64) -> bool {
    let (lx, hx) = (w.a[0].min(w.b[0]), w.a[0].max(w.b[0]));
    let (ly, hy) = (w.a[1].min(w.b[1]), w.a[1].max(w.b[1]));
    p[0] >= lx - r && p[0] <= hx + r && p[1] >= ly - r && p[1] <= hy + r
}

struct Policy<'a> {
    w1: &'a [f64],
    b1: &'a [f64],
    w2: &'a [f64],
    b2: &'a [f64],
}

impl<'a> Policy<'a> {
    fn new(g: &'a [f64]) -> Self {
        let (w1, rest) = g.split_at(INPUTS * HIDDEN);
        let (b1, rest) = rest.split_at(HIDDEN);
        let (w2, b2) = rest.split_at(HIDDEN * OUTPUTS);
        Self { w1, b1, w2, b2 }
    }

    fn act(&self, x: &[f64; INPUTS]) -> [f64; OUTPUTS] {
        let mut h = [0.0; HIDDEN];
        for (j, hj) in h.iter_mut().enumerate() {
            let row = &self.w1[j * INPUTS..(j + 1) * INPUTS];
            *hj = (row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1[j]).tanh();
        }
        let mut out = [0.0; OUTPUTS];
        for (k, o) in out.iter_mut().enumerate() {
            let row = &self.w2[k * HIDDEN..(k + 1) * HIDDEN];
            *o = (row.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>() + self.b2[k]).tanh();
        }
        out
    }
}
