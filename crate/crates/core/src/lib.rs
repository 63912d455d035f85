//! Quality-diversity optimization with diversity measures learned from
//! two-alternative forced-choice (2AFC) similarity judgments.
//!
//! The crate is organised around a MAP-Elites loop ([`engine`]) whose
//! measure space is either the task's ground-truth descriptor or a latent
//! space produced by a [`learn::LatentModel`]. Latent models are fitted
//! either from triplet judgments ([`feedback`]) with a contrastive hinge
//! loss, or without supervision (PCA / auto-encoder baselines).
//! [`eval`] scores every run against a separate ground-truth archive.

pub mod engine;
pub mod error;
pub mod eval;
pub mod feedback;
pub mod learn;
pub mod tasks;

pub use error::{QdError, Result};
