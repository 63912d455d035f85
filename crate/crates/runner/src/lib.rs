//! Configuration, artifacts, the judgment service and CLI commands for
//! `qdhf-core` experiments.

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod experiment;
pub mod service;

use std::path::PathBuf;

use qdhf_core::QdError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("output directory {0} is not empty (use --force to overwrite)")]
    OutputNotEmpty(PathBuf),

    #[error(transparent)]
    Core(#[from] QdError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("service error: {0}")]
    Service(String),

    #[error("interrupted")]
    Interrupted,
}

impl RunnerError {
    /// Process exit status: 2 for bad configuration or flags, 3 when the
    /// feedback budget runs out, 130 on interrupt, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Config(_) | RunnerError::OutputNotEmpty(_) => 2,
            RunnerError::Core(QdError::InvalidConfig(_) | QdError::InvalidSchedule(_)) => 2,
            RunnerError::Core(QdError::BudgetExhausted { .. }) => 3,
            RunnerError::Interrupted => 130,
            _ => 1,
        }
    }
}
