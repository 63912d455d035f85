//! Ground-truth evaluation archives, QD score / coverage, trial
//! aggregation, budget sweeps and heatmap export.

mod heatmap;
mod stats;
mod sweep;

pub use heatmap::{export_heatmap, heatmap_csv, heatmap_svg};
pub use stats::{aggregate_trials, mean_std, spearman, MetricStat, TrialRecord, TrialSummary, SUMMARY_METRICS};
pub use sweep::{sweep_budget, SweepRow, SWEEP_HEADER, SWEEP_STRATEGIES};

use serde::{Deserialize, Serialize};

use crate::engine::{Archive, MeasureBounds, MeasureKind};
use crate::error::Result;

/// `100 * sum(objectives) / total_cells`.
pub fn qd_score(archive: &Archive) -> f64 {
    let sum: f64 = archive.individuals().map(|i| i.objective).sum();
    100.0 * sum / archive.total_cells() as f64
}

/// Percentage of filled cells.
pub fn coverage(archive: &Archive) -> f64 {
    100.0 * archive.len() as f64 / archive.total_cells() as f64
}

/// Archives indexed by ground-truth measures, used only for scoring.
#[derive(Debug, Clone)]
pub struct EvalArchives {
    /// Every evaluated individual, never rebuilt.
    pub all_solutions: Archive,
    /// The working archive's elites re-inserted by ground-truth measures.
    pub final_archive_view: Archive,
}

/// Re-inserts `working`'s elites into a fresh ground-truth archive.
pub fn ground_truth_view(working: &Archive, shape: &[usize], bounds: &MeasureBounds) -> Result<Archive> {
    let mut view = Archive::new(shape.to_vec(), bounds.clone(), MeasureKind::GroundTruth)?;
    for ind in working.individuals() {
        view.insert(ind.clone())?;
    }
    Ok(view)
}

/// One line of `metrics.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub iteration: usize,
    pub qd_score_archive: f64,
    pub coverage_archive: f64,
    pub qd_score_all: f64,
    pub coverage_all: f64,
    pub judgments_used: usize,
    pub val_acc: Option<f64>,
}

pub const METRICS_HEADER: &str =
    "iteration,qd_score_archive,coverage_archive,qd_score_all,coverage_all,judgments_used,val_acc";

impl MetricsRow {
    pub fn from_archives(iteration: usize, view: &Archive, all: &Archive, judgments_used: usize, val_acc: Option<f64>) -> Self {
        Self {
            iteration,
            qd_score_archive: qd_score(view),
            coverage_archive: coverage(view),
            qd_score_all: qd_score(all),
            coverage_all: coverage(all),
            judgments_used,
            val_acc,
        }
    }

    /// CSV line without trailing newline; floats use shortest round-trip
    /// formatting and an absent accuracy is an empty field.
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.iteration,
            self.qd_score_archive,
            self.coverage_archive,
            self.qd_score_all,
            self.coverage_all,
            self.judgments_used,
            self.val_acc.map(|v| v.to_string()).unwrap_or_default()
        )
    }
}

/// Full `metrics.csv` contents including header.
pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}
