//! Experiment configuration.
//!
//! On disk a config is one JSON object with flat dotted keys
//! (`"schedule.batch_size": 100`) that mirror the CLI flags. Any subset of
//! keys may be given; the rest resolve from the task and strategy.

use std::path::{Path, PathBuf};

use qdhf_core::engine::{RunSettings, Schedule, Strategy};
use qdhf_core::learn::{AeConfig, TrainConfig};
use qdhf_core::tasks::TaskKind;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::RunnerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JudgeKind {
    Oracle,
    Human,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveConfig {
    pub shape: Vec<usize>,
    pub bounds_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetConfig {
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeConfig {
    pub kind: JudgeKind,
    /// Seconds to wait for a human answer; `null` waits forever.
    pub timeout_secs: Option<f64>,
    pub max_resamples_per_judgment: usize,
    pub validation_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MazeConfig {
    /// Wall layout file; `null` uses the built-in maze.
    pub layout: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceConfig {
    /// Serve the status endpoint during oracle runs too.
    pub enabled: bool,
    pub host: String,
    pub port: u16,
    pub ui_dir: Option<PathBuf>,
}

/// Fully resolved configuration of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub strategy: Strategy,
    pub seed: u64,
    pub schedule: Schedule,
    pub archive: ArchiveConfig,
    pub budget: BudgetConfig,
    pub train: TrainConfig,
    pub autoencoder: AeConfig,
    pub judge: JudgeConfig,
    pub maze: MazeConfig,
    pub output: OutputConfig,
    pub service: ServiceConfig,
}

impl ExperimentConfig {
    pub fn defaults(task: TaskKind, strategy: Strategy) -> Self {
        let s = RunSettings::defaults(task, strategy);
        Self {
            task,
            strategy,
            seed: s.seed,
            schedule: s.schedule,
            archive: ArchiveConfig {
                shape: s.archive_shape,
                bounds_margin: s.bounds_margin,
            },
            budget: BudgetConfig { total: s.budget },
            train: s.train,
            autoencoder: s.autoencoder,
            judge: JudgeConfig {
                kind: JudgeKind::Oracle,
                timeout_secs: None,
                max_resamples_per_judgment: s.max_resamples_per_judgment,
                validation_size: s.validation_size,
            },
            maze: MazeConfig { layout: None },
            output: OutputConfig {
                dir: PathBuf::from(format!("runs/{}-{}", task, strategy)),
            },
            service: ServiceConfig {
                enabled: false,
                host: "127.0.0.1".into(),
                port: 8080,
                ui_dir: None,
            },
        }
    }

    pub fn run_settings(&self) -> RunSettings {
        RunSettings {
            seed: self.seed,
            strategy: self.strategy,
            schedule: self.schedule.clone(),
            archive_shape: self.archive.shape.clone(),
            budget: self.budget.total,
            train: self.train.clone(),
            autoencoder: self.autoencoder.clone(),
            bounds_margin: self.archive.bounds_margin,
            validation_size: self.judge.validation_size,
            max_resamples_per_judgment: self.judge.max_resamples_per_judgment,
        }
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        self.run_settings()
            .validate()
            .map_err(|e| RunnerError::Config(e.to_string()))?;
        if let Some(t) = self.judge.timeout_secs {
            if !(t > 0.0 && t.is_finite()) {
                return Err(RunnerError::Config("judge.timeout_secs must be positive".into()));
            }
        }
        Ok(())
    }

    /// Flat dotted-key form, as written to `config.json`.
    pub fn to_flat(&self) -> Map<String, Value> {
        let nested = serde_json::to_value(self).expect("config serializes");
        let mut out = Map::new();
        flatten("", &nested, &mut out);
        out
    }

    /// Canonical identity of the configuration apart from seed and output
    /// location, used to check that trials are comparable.
    pub fn fingerprint(&self) -> String {
        let mut flat = self.to_flat();
        flat.remove("seed");
        flat.remove("output.dir");
        Value::Object(flat).to_string()
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, child) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        _ => {
            out.insert(prefix.to_string(), v.clone());
        }
    }
}

fn set_path(root: &mut Value, key: &str, v: Value) {
    let mut cur = root;
    let mut parts = key.split('.').peekable();
    while let Some(p) = parts.next() {
        let obj = cur.as_object_mut().expect("config node is an object");
        if parts.peek().is_none() {
            obj.insert(p.to_string(), v);
            return;
        }
        cur = obj.entry(p.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
}

/// Ordered layers of flat overrides; later layers win.
#[derive(Debug, Default, Clone)]
pub struct ConfigLayers {
    layers: Vec<Map<String, Value>>,
}

impl ConfigLayers {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, layer: Map<String, Value>) {
        self.layers.push(layer);
    }

    /// Adds one `key=value` override. The value is read as JSON when it
    /// parses, else as a plain string.
    pub fn push_assignment(&mut self, assignment: &str) -> Result<(), RunnerError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| RunnerError::Config(format!("expected key=value, got '{assignment}'")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        self.set(k.trim(), value);
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: Value) {
        let mut m = Map::new();
        m.insert(key.to_string(), value);
        self.layers.push(m);
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), RunnerError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunnerError::Config(format!("cannot read {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(m)) => {
                self.push(m);
                Ok(())
            }
            Ok(_) => Err(RunnerError::Config(format!("{} must hold a JSON object", path.display()))),
            Err(e) => Err(RunnerError::Config(format!("{}: {e}", path.display()))),
        }
    }

    fn latest(&self, key: &str) -> Option<&Value> {
        self.layers.iter().rev().find_map(|l| l.get(key))
    }

    /// Resolves defaults for the chosen task and strategy, then applies
    /// every layer in order. Unknown keys are rejected.
    pub fn resolve(&self) -> Result<ExperimentConfig, RunnerError> {
        let pick = |key: &str, default: &str| -> Result<String, RunnerError> {
            match self.latest(key) {
                None => Ok(default.to_string()),
                Some(Value::String(s)) => Ok(s.clone()),
                Some(other) => Err(RunnerError::Config(format!("{key} must be a string, got {other}"))),
            }
        };
        let task: TaskKind = pick("task", "arm")?.parse().map_err(RunnerError::Config)?;
        let strategy: Strategy = pick("strategy", "qdhf-online")?.parse().map_err(RunnerError::Config)?;
        let defaults = ExperimentConfig::defaults(task, strategy);
        let known = defaults.to_flat();

        let mut nested = serde_json::to_value(&defaults).expect("config serializes");
        for layer in &self.layers {
            for (k, v) in layer {
                if !known.contains_key(k) {
                    return Err(RunnerError::Config(format!("unknown config key '{k}'")));
                }
                set_path(&mut nested, k, v.clone());
            }
        }
        // the strategy string may have used an alias
        set_path(&mut nested, "strategy", serde_json::to_value(strategy).expect("strategy serializes"));
        let cfg: ExperimentConfig =
            serde_json::from_value(nested).map_err(|e| RunnerError::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Reads a flat config file back into a resolved config.
pub fn load_resolved(path: &Path) -> Result<ExperimentConfig, RunnerError> {
    let mut layers = ConfigLayers::new();
    layers.load_file(path)?;
    layers.resolve()
}
