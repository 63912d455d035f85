use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricsRow;
use crate::engine::Strategy;
use crate::error::{QdError, Result};

pub const SUMMARY_METRICS: [&str; 4] = ["qd_score_archive", "coverage_archive", "qd_score_all", "coverage_all"];

/// Final metrics of one trial plus what identifies its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub strategy: Strategy,
    pub task: String,
    /// Serialized configuration with the seed removed; trials aggregate
    /// only when these agree.
    pub fingerprint: String,
    pub seed: u64,
    pub final_metrics: MetricsRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStat {
    pub mean: f64,
    pub std: f64,
}

/// `summary.json` for one strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub strategy: Strategy,
    pub task: String,
    pub trials: usize,
    pub metrics: BTreeMap<String, MetricStat>,
}

/// Mean and sample (n - 1) standard deviation; the std of a single value
/// is 0. Values are summed in sorted order so the result does not depend
/// on input order.
pub fn mean_std(values: &[f64]) -> MetricStat {
    if values.is_empty() {
        return MetricStat { mean: f64::NAN, std: f64::NAN };
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v[0] + v.iter().map(|x| x - v[0]).sum::<f64>() / n;
    let mut dev: Vec<f64> = v.iter().map(|x| (x - mean).powi(2)).collect();
    dev.sort_by(f64::total_cmp);
    let std = if v.len() > 1 {
        (dev.iter().sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    MetricStat { mean, std }
}

pub fn aggregate_trials(runs: &[TrialRecord]) -> Result<TrialSummary> {
    let first = runs.first().ok_or(QdError::EmptyData)?;
    if let Some(bad) = runs
        .iter()
        .find(|r| r.strategy != first.strategy || r.task != first.task || r.fingerprint != first.fingerprint)
    {
        return Err(QdError::MismatchedTrials(format!(
            "seed {} ({}/{}) differs from seed {} ({}/{})",
            bad.seed, bad.task, bad.strategy, first.seed, first.task, first.strategy
        )));
    }
    let pick = |name: &str, r: &MetricsRow| match name {
        "qd_score_archive" => r.qd_score_archive,
        "coverage_archive" => r.coverage_archive,
        "qd_score_all" => r.qd_score_all,
        _ => r.coverage_all,
    };
    let metrics = SUMMARY_METRICS
        .iter()
        .map(|&name| {
            let vals: Vec<f64> = runs.iter().map(|r| pick(name, &r.final_metrics)).collect();
            (name.to_string(), mean_std(&vals))
        })
        .collect();
    Ok(TrialSummary {
        strategy: first.strategy,
        task: first.task.clone(),
        trials: runs.len(),
        metrics,
    })
}

/// Ranks starting at 1 with ties sharing their average rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of average ranks).
/// `None` when either side is constant or the lengths differ.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}
