use serde::{Deserialize, Serialize};

use crate::error::{QdError, Result};

/// Judgment budget shared across metric updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub total: usize,
    pub used: usize,
    pub per_update: usize,
}

impl Budget {
    /// Splits `total` evenly over `updates` metric updates.
    pub fn new(total: usize, updates: usize) -> Self {
        Self {
            total,
            used: 0,
            per_update: if updates == 0 { total } else { total / updates },
        }
    }

    pub fn remaining(&self) -> usize {
        self.total - self.used
    }

    pub fn ensure(&self, requested: usize) -> Result<()> {
        if requested > self.remaining() {
            return Err(QdError::BudgetExhausted {
                requested,
                remaining: self.remaining(),
                total: self.total,
            });
        }
        Ok(())
    }

    pub fn charge(&mut self, n: usize) -> Result<()> {
        self.ensure(n)?;
        self.used += n;
        Ok(())
    }
}
