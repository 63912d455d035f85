use serde::{Deserialize, Serialize};

use crate::error::{QdError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub total_iterations: usize,
    /// Iterations at which online / incremental strategies refit their
    /// latent model and rebuild the archive.
    pub update_iterations: Vec<usize>,
    pub batch_size: usize,
    pub mutation_sigma: f64,
}

impl Schedule {
    pub fn arm() -> Self {
        Self {
            total_iterations: 1000,
            update_iterations: vec![0, 100, 250, 500],
            batch_size: 100,
            mutation_sigma: 0.1,
        }
    }

    pub fn maze() -> Self {
        Self {
            batch_size: 200,
            mutation_sigma: 0.2,
            ..Self::arm()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.update_iterations.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QdError::InvalidSchedule("update iterations must be strictly increasing".into()));
        }
        if self.total_iterations > 0 {
            if let Some(&last) = self.update_iterations.last() {
                if last >= self.total_iterations {
                    return Err(QdError::InvalidSchedule(format!(
                        "update iteration {last} is outside [0, {})",
                        self.total_iterations
                    )));
                }
            }
        }
        if self.batch_size == 0 {
            return Err(QdError::InvalidSchedule("batch size must be positive".into()));
        }
        if !(self.mutation_sigma >= 0.0) {
            return Err(QdError::InvalidSchedule("mutation sigma must be non-negative".into()));
        }
        Ok(())
    }
}

/// How the working archive's measures are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[serde(alias = "gt")]
    GroundTruth,
    QdhfOffline,
    QdhfOnline,
    AuroraPcaPretrained,
    AuroraPcaIncremental,
    AuroraAePretrained,
    AuroraAeIncremental,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::AuroraAePretrained,
        Strategy::AuroraAeIncremental,
        Strategy::AuroraPcaPretrained,
        Strategy::AuroraPcaIncremental,
        Strategy::QdhfOffline,
        Strategy::QdhfOnline,
        Strategy::GroundTruth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::GroundTruth => "ground-truth",
            Strategy::QdhfOffline => "qdhf-offline",
            Strategy::QdhfOnline => "qdhf-online",
            Strategy::AuroraPcaPretrained => "aurora-pca-pretrained",
            Strategy::AuroraPcaIncremental => "aurora-pca-incremental",
            Strategy::AuroraAePretrained => "aurora-ae-pretrained",
            Strategy::AuroraAeIncremental => "aurora-ae-incremental",
        }
    }

    pub fn uses_judgments(self) -> bool {
        matches!(self, Strategy::QdhfOffline | Strategy::QdhfOnline)
    }

    pub fn is_learned(self) -> bool {
        self != Strategy::GroundTruth
    }

    /// Whether the model is refit at every scheduled update rather than
    /// only at iteration 0.
    pub fn is_incremental(self) -> bool {
        matches!(
            self,
            Strategy::QdhfOnline | Strategy::AuroraPcaIncremental | Strategy::AuroraAeIncremental
        )
    }

    pub fn is_aurora(self) -> bool {
        self.is_learned() && !self.uses_judgments()
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "gt" {
            return Ok(Strategy::GroundTruth);
        }
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown strategy '{s}'"))
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
