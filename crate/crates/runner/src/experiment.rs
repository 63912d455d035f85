//! Running configured experiments.

use std::fs;
use std::path::Path;

use log::info;
use qdhf_core::engine::{run_qd, NoopObserver, RunResult, Strategy};
use qdhf_core::eval::{aggregate_trials, sweep_budget, SweepRow, TrialRecord, TrialSummary, SWEEP_HEADER};
use qdhf_core::feedback::OracleJudge;
use qdhf_core::tasks::{ArmTask, MazeTask, Task, TaskKind};

use crate::artifacts::{prepare_output, write_config, write_result, CheckpointWriter};
use crate::config::{ExperimentConfig, JudgeKind};
use crate::RunnerError;

pub fn build_task(cfg: &ExperimentConfig) -> Result<Box<dyn Task>, RunnerError> {
    Ok(match cfg.task {
        TaskKind::Arm => Box::new(ArmTask::default()),
        TaskKind::Maze => match &cfg.maze.layout {
            Some(path) => Box::new(MazeTask::from_layout_file(path)?),
            None => Box::new(MazeTask::default()),
        },
    })
}

/// One run with the in-process oracle judge, written to `cfg.output.dir`.
pub fn run_with_oracle(cfg: &ExperimentConfig, force: bool) -> Result<RunResult, RunnerError> {
    if cfg.judge.kind != JudgeKind::Oracle {
        return Err(RunnerError::Config("a human judge needs the service; use `serve`".into()));
    }
    let out = &cfg.output.dir;
    let task = build_task(cfg)?;
    prepare_output(out, force)?;
    write_config(out, cfg)?;
    info!("running {} / {} seed {} into {}", cfg.task, cfg.strategy, cfg.seed, out.display());
    let result = run_qd(
        task.as_ref(),
        &mut OracleJudge::new(),
        &cfg.run_settings(),
        &mut CheckpointWriter { dir: out },
    )?;
    write_result(out, &result)?;
    Ok(result)
}

/// Runs `trials` seeds of one strategy without writing run directories.
pub fn trial_records(cfg: &ExperimentConfig, trials: usize) -> Result<Vec<TrialRecord>, RunnerError> {
    let task = build_task(cfg)?;
    (0..trials as u64)
        .map(|t| {
            let mut c = cfg.clone();
            c.seed = cfg.seed + t;
            let result = run_qd(task.as_ref(), &mut OracleJudge::new(), &c.run_settings(), &mut NoopObserver)?;
            let last = result
                .metrics
                .last()
                .cloned()
                .ok_or_else(|| RunnerError::Config("schedule has no iterations".into()))?;
            info!(
                "{} seed {}: qd {:.2} cov {:.2} qd_all {:.2}",
                c.strategy, c.seed, last.qd_score_archive, last.coverage_archive, last.qd_score_all
            );
            Ok(TrialRecord {
                strategy: c.strategy,
                task: c.task.to_string(),
                fingerprint: c.fingerprint(),
                seed: c.seed,
                final_metrics: last,
            })
        })
        .collect()
}

/// Every listed strategy over `trials` seeds, writing `summary.json` and
/// `trials.json`. `make_config` resolves the configuration per strategy so
/// strategy-dependent defaults apply.
pub fn bench(
    make_config: impl Fn(Strategy) -> Result<ExperimentConfig, RunnerError>,
    strategies: &[Strategy],
    trials: usize,
    out: &Path,
    force: bool,
) -> Result<Vec<TrialSummary>, RunnerError> {
    if trials == 0 {
        return Err(RunnerError::Config("trials must be at least 1".into()));
    }
    let configs = strategies.iter().map(|&s| make_config(s)).collect::<Result<Vec<_>, _>>()?;
    prepare_output(out, force)?;
    let mut summaries = Vec::new();
    let mut all = Vec::new();
    for cfg in &configs {
        let records = trial_records(cfg, trials)?;
        summaries.push(aggregate_trials(&records)?);
        all.extend(records);
    }
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summaries)? + "\n")?;
    fs::write(out.join("trials.json"), serde_json::to_string_pretty(&all)? + "\n")?;
    Ok(summaries)
}

pub fn sweep(cfg: &ExperimentConfig, budgets: &[usize], trials: usize, force: bool) -> Result<Vec<SweepRow>, RunnerError> {
    if budgets.is_empty() {
        return Err(RunnerError::Config("at least one budget is required".into()));
    }
    if trials == 0 {
        return Err(RunnerError::Config("trials must be at least 1".into()));
    }
    let task = build_task(cfg)?;
    let out = &cfg.output.dir;
    prepare_output(out, force)?;
    write_config(out, cfg)?;
    let rows = sweep_budget(task.as_ref(), &cfg.run_settings(), budgets, trials)?;
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.to_csv_line());
        csv.push('\n');
    }
    fs::write(out.join("sweep.csv"), csv)?;
    Ok(rows)
}
