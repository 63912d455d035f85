//! On-disk layout of a run directory.
//!
//! ```text
//! config.json        resolved flat config
//! metrics.csv        one row per iteration
//! archive.json       final working archive
//! all_solutions.json ground-truth archive of every evaluated solution
//! model.json         latent model, or null
//! judgments.jsonl    one judgment per line
//! checkpoint/        archive, model, budget and judgments at the last update
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use qdhf_core::engine::{Archive, Checkpoint, Genome, Individual, MeasureBounds, MeasureKind, RunObserver, RunResult};
use qdhf_core::eval::{metrics_csv, MetricsRow};
use qdhf_core::feedback::{Budget, Judgment};
use qdhf_core::learn::LatentModel;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::RunnerError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliteRecord {
    pub cell: Vec<usize>,
    pub id: u64,
    pub genome: Vec<f64>,
    pub objective: f64,
    pub gt_measures: Vec<f64>,
    pub latent_measures: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveRecord {
    pub kind: MeasureKind,
    pub shape: Vec<usize>,
    pub bounds: MeasureBounds,
    pub cells: usize,
    pub filled: usize,
    pub elites: Vec<EliteRecord>,
}

impl ArchiveRecord {
    pub fn from_archive(a: &Archive) -> Self {
        Self {
            kind: a.kind(),
            shape: a.shape().to_vec(),
            bounds: a.bounds().clone(),
            cells: a.total_cells(),
            filled: a.len(),
            elites: a
                .elites()
                .iter()
                .map(|e| EliteRecord {
                    cell: e.cell.clone(),
                    id: e.individual.id,
                    genome: e.individual.genome.to_vec(),
                    objective: e.individual.objective,
                    gt_measures: e.individual.gt_measures.clone(),
                    latent_measures: e.individual.latent_measures.clone(),
                })
                .collect(),
        }
    }

    /// Rebuilds the archive. Feature vectors are not stored, so the
    /// individuals come back without them.
    pub fn to_archive(&self) -> Result<Archive, RunnerError> {
        let mut a = Archive::new(self.shape.clone(), self.bounds.clone(), self.kind)?;
        for e in &self.elites {
            a.insert(Individual {
                id: e.id,
                genome: Genome::new(e.genome.clone()),
                objective: e.objective,
                features: Arc::from(Vec::new()),
                gt_measures: e.gt_measures.clone(),
                latent_measures: e.latent_measures.clone(),
            })?;
        }
        Ok(a)
    }
}

/// Makes `dir` usable as an output directory.
pub fn prepare_output(dir: &Path, force: bool) -> Result<(), RunnerError> {
    if dir.exists() {
        let occupied = fs::read_dir(dir)?.next().is_some();
        if occupied && !force {
            return Err(RunnerError::OutputNotEmpty(dir.to_path_buf()));
        }
    }
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), RunnerError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_config(dir: &Path, cfg: &ExperimentConfig) -> Result<(), RunnerError> {
    write_json(&dir.join("config.json"), &cfg.to_flat())
}

pub fn write_archive(path: &Path, archive: &Archive) -> Result<(), RunnerError> {
    write_json(path, &ArchiveRecord::from_archive(archive))
}

pub fn read_archive(path: &Path) -> Result<Archive, RunnerError> {
    let text = fs::read_to_string(path)?;
    let rec: ArchiveRecord = serde_json::from_str(&text)?;
    rec.to_archive()
}

pub fn write_judgments(path: &Path, judgments: &[Judgment]) -> Result<(), RunnerError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for j in judgments {
        serde_json::to_writer(&mut w, j)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_judgments(path: &Path) -> Result<Vec<Judgment>, RunnerError> {
    fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(RunnerError::from))
        .collect()
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<(), RunnerError> {
    fs::write(path, metrics_csv(rows))?;
    Ok(())
}

/// Writes everything but `config.json`, which goes out before the run.
pub fn write_result(dir: &Path, result: &RunResult) -> Result<(), RunnerError> {
    write_metrics(&dir.join("metrics.csv"), &result.metrics)?;
    write_archive(&dir.join("archive.json"), &result.final_archive)?;
    write_archive(&dir.join("all_solutions.json"), &result.eval.all_solutions)?;
    write_json(&dir.join("model.json"), &result.model)?;
    write_judgments(&dir.join("judgments.jsonl"), &result.judgments)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct CheckpointState<'a> {
    iteration: usize,
    budget: &'a Budget,
}

pub fn write_checkpoint(dir: &Path, cp: &Checkpoint) -> Result<(), RunnerError> {
    let dir = dir.join("checkpoint");
    fs::create_dir_all(&dir)?;
    write_archive(&dir.join("archive.json"), cp.archive)?;
    write_json(&dir.join("model.json"), &cp.model)?;
    write_json(
        &dir.join("state.json"),
        &CheckpointState {
            iteration: cp.iteration,
            budget: cp.budget,
        },
    )?;
    write_judgments(&dir.join("judgments.jsonl"), cp.judgments)?;
    Ok(())
}

/// Reads `model.json` back; `None` for ground-truth runs.
pub fn read_model(path: &Path) -> Result<Option<LatentModel>, RunnerError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Writes a checkpoint at every model update.
pub struct CheckpointWriter<'a> {
    pub dir: &'a Path,
}

impl RunObserver for CheckpointWriter<'_> {
    fn on_update(&mut self, cp: &Checkpoint) -> qdhf_core::Result<()> {
        write_checkpoint(self.dir, cp).map_err(|e| match e {
            RunnerError::Core(c) => c,
            RunnerError::Io(io) => io.into(),
            other => qdhf_core::QdError::Io(std::io::Error::other(other.to_string())),
        })
    }
}
