use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{run_qd, NoopObserver, RunSettings, Strategy};
use crate::error::Result;
use crate::feedback::OracleJudge;
use crate::tasks::Task;

pub const SWEEP_HEADER: &str = "budget,strategy,qd_score_all,val_acc";
pub const SWEEP_STRATEGIES: [Strategy; 2] = [Strategy::QdhfOffline, Strategy::QdhfOnline];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub budget: usize,
    pub strategy: Strategy,
    pub seed: u64,
    pub qd_score_all: f64,
    pub val_acc: Option<f64>,
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{}",
            self.budget,
            self.strategy,
            self.qd_score_all,
            self.val_acc.map(|v| v.to_string()).unwrap_or_default()
        )
    }
}

/// Runs offline and online judgment-learned strategies for every budget
/// and trial with the oracle judge. Trial `t` uses seed `base.seed + t`
/// for every budget, so budgets are compared on paired seeds.
pub fn sweep_budget(task: &dyn Task, base: &RunSettings, budgets: &[usize], trials: usize) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(usize, Strategy, u64)> = budgets
        .iter()
        .flat_map(|&b| {
            SWEEP_STRATEGIES
                .iter()
                .flat_map(move |&s| (0..trials as u64).map(move |t| (b, s, t)))
        })
        .map(|(b, s, t)| (b, s, base.seed + t))
        .collect();

    jobs.par_iter()
        .map(|&(budget, strategy, seed)| {
            let settings = RunSettings {
                seed,
                strategy,
                budget,
                ..base.clone()
            };
            let result = run_qd(task, &mut OracleJudge::new(), &settings, &mut NoopObserver)?;
            let last = result.metrics.last();
            Ok(SweepRow {
                budget,
                strategy,
                seed,
                qd_score_all: last.map_or(0.0, |r| r.qd_score_all),
                val_acc: last.and_then(|r| r.val_acc),
            })
        })
        .collect()
}
