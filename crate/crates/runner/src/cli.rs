//! `qdhf` command line.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::info;
use qdhf_core::engine::Strategy;
use qdhf_core::eval::export_heatmap;
use serde_json::Value;

use crate::artifacts::read_archive;
use crate::config::{ConfigLayers, ExperimentConfig};
use crate::experiment::{bench, run_with_oracle, sweep};
use crate::service;
use crate::RunnerError;

#[derive(Debug, Parser)]
#[command(name = "qdhf", version, about = "Quality diversity with learned diversity measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One run with the simulated judge (or the service for a human judge).
    Run(RunArgs),
    /// Repeated trials of several strategies, aggregated into summary.json.
    Bench {
        #[command(flatten)]
        common: RunArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Comma-separated strategies; all seven by default.
        #[arg(long, value_delimiter = ',')]
        strategies: Vec<String>,
    },
    /// Judgment-budget sweep for the offline and online strategies.
    Sweep {
        #[command(flatten)]
        common: RunArgs,
        /// Comma-separated budgets, e.g. 100,300,1000,3000.
        #[arg(long, value_delimiter = ',')]
        budgets: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Run with a human judge behind the HTTP service.
    Serve(RunArgs),
    /// Write heatmap.csv and heatmap.svg for a finished run.
    ExportHeatmap {
        /// Run directory.
        #[arg(long)]
        run: PathBuf,
        /// Which archive file to draw.
        #[arg(long, default_value = "archive")]
        archive: String,
        /// Destination directory; the run directory by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON file of flat dotted keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Total judgment budget.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// oracle or human.
    #[arg(long)]
    pub judge: Option<String>,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overwrite a non-empty output directory.
    #[arg(long)]
    pub force: bool,
    /// Any config key, e.g. --set train.epochs=50. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl RunArgs {
    /// Config file, then `QDHF_SEED`, then flags, then `--set`.
    pub fn layers(&self) -> Result<ConfigLayers, RunnerError> {
        let mut l = ConfigLayers::new();
        if let Some(path) = &self.config {
            l.load_file(path)?;
        }
        if let Ok(seed) = std::env::var("QDHF_SEED") {
            let seed: u64 = seed
                .trim()
                .parse()
                .map_err(|_| RunnerError::Config(format!("QDHF_SEED must be an unsigned integer, got '{seed}'")))?;
            l.set("seed", Value::from(seed));
        }
        let path = |p: &PathBuf| Value::from(p.to_string_lossy().into_owned());
        let flags: [(&str, Option<Value>); 10] = [
            ("task", self.task.clone().map(Value::from)),
            ("strategy", self.strategy.clone().map(Value::from)),
            ("seed", self.seed.map(Value::from)),
            ("budget.total", self.budget.map(Value::from)),
            ("schedule.total_iterations", self.iterations.map(Value::from)),
            ("schedule.batch_size", self.batch_size.map(Value::from)),
            ("judge.kind", self.judge.clone().map(Value::from)),
            ("service.port", self.port.map(Value::from)),
            ("service.ui_dir", self.ui_dir.as_ref().map(path)),
            ("output.dir", self.out.as_ref().map(path)),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                l.set(k, v);
            }
        }
        for a in &self.overrides {
            l.push_assignment(a)?;
        }
        Ok(l)
    }

    pub fn resolve(&self) -> Result<ExperimentConfig, RunnerError> {
        self.layers()?.resolve()
    }
}

pub fn execute(cli: Cli) -> Result<(), RunnerError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let result = if cfg.judge.kind == crate::config::JudgeKind::Human || cfg.service.enabled {
                let handle = service::start(&cfg, args.force, true)?;
                println!("serving on http://{}", handle.addr);
                handle.wait()?
            } else {
                run_with_oracle(&cfg, args.force)?
            };
            if let Some(last) = result.metrics.last() {
                println!(
                    "qd_score_archive {:.3} coverage_archive {:.3} qd_score_all {:.3} coverage_all {:.3} judgments_used {}",
                    last.qd_score_archive, last.coverage_archive, last.qd_score_all, last.coverage_all, last.judgments_used
                );
            }
            println!("wrote {}", cfg.output.dir.display());
            Ok(())
        }
        Command::Serve(args) => {
            let mut layers = args.layers()?;
            layers.set("judge.kind", Value::from("human"));
            let cfg = layers.resolve()?;
            let handle = service::start(&cfg, args.force, true)?;
            println!("serving on http://{}", handle.addr);
            handle.wait()?;
            println!("run complete; wrote {}", cfg.output.dir.display());
            Ok(())
        }
        Command::Bench {
            common,
            trials,
            strategies,
        } => {
            let base = common.layers()?;
            let strategies: Vec<Strategy> = if strategies.is_empty() {
                Strategy::ALL.to_vec()
            } else {
                strategies
                    .iter()
                    .map(|s| s.trim().parse().map_err(RunnerError::Config))
                    .collect::<Result<_, _>>()?
            };
            let out = base.resolve()?.output.dir;
            let summaries = bench(
                |s| {
                    let mut l = base.clone();
                    l.set("strategy", Value::from(s.as_str()));
                    l.resolve()
                },
                &strategies,
                trials,
                &out,
                common.force,
            )?;
            for s in &summaries {
                let m = |k: &str| s.metrics[k];
                println!(
                    "{:<24} qd {:7.2} ± {:5.2}  cov {:6.2} ± {:5.2}  qd_all {:7.2} ± {:5.2}  cov_all {:6.2} ± {:5.2}",
                    s.strategy.as_str(),
                    m("qd_score_archive").mean,
                    m("qd_score_archive").std,
                    m("coverage_archive").mean,
                    m("coverage_archive").std,
                    m("qd_score_all").mean,
                    m("qd_score_all").std,
                    m("coverage_all").mean,
                    m("coverage_all").std,
                );
            }
            println!("wrote {}", out.join("summary.json").display());
            Ok(())
        }
        Command::Sweep {
            common,
            budgets,
            trials,
        } => {
            let cfg = common.resolve()?;
            let rows = sweep(&cfg, &budgets, trials, common.force)?;
            info!("{} sweep runs", rows.len());
            println!("wrote {}", cfg.output.dir.join("sweep.csv").display());
            Ok(())
        }
        Command::ExportHeatmap { run, archive, out } => {
            let file = match archive.as_str() {
                "archive" => "archive.json",
                "all" | "all_solutions" => "all_solutions.json",
                other => return Err(RunnerError::Config(format!("--archive must be archive or all_solutions, got '{other}'"))),
            };
            let a = read_archive(&run.join(file))?;
            let dest = out.unwrap_or(run);
            export_heatmap(&a, &dest)?;
            println!("wrote {}", dest.join("heatmap.svg").display());
            Ok(())
        }
    }
}
