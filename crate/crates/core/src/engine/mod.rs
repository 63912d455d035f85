//! MAP-Elites loop, grid archive and the metric-update scheduler.

mod archive;
mod emitter;
mod run;
mod schedule;

pub use archive::{cell_index, Archive, Elite, Genome, Individual, InsertOutcome, MeasureBounds, MeasureKind};
pub use emitter::emit_batch;
pub use run::{
    rebuild_archive, run_qd, Checkpoint, NoopObserver, RunObserver, RunResult, RunSettings,
};
pub use schedule::{Schedule, Strategy};
