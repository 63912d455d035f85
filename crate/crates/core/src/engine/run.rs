use std::collections::HashMap;
use std::sync::Arc;

use log::{debug, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::archive::{Archive, Genome, Individual, MeasureBounds, MeasureKind};
use super::emitter::emit_batch;
use super::schedule::{Schedule, Strategy};
use crate::error::{QdError, Result};
use crate::eval::{ground_truth_view, EvalArchives, MetricsRow};
use crate::feedback::{
    oracle_verdict, sample_triplets, validate_accuracy, Budget, Judge, Judgment, JudgmentSource, Verdict,
};
use crate::learn::{
    fit_autoencoder, fit_pca, train_projection, AeConfig, LatentModel, LinearProjection, TrainConfig,
};
use crate::tasks::{Task, TaskKind};

/// Everything `run_qd` needs besides the task and the judge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub seed: u64,
    pub strategy: Strategy,
    pub schedule: Schedule,
    pub archive_shape: Vec<usize>,
    /// Total judgment budget (judgment-learned strategies only).
    pub budget: usize,
    pub train: TrainConfig,
    pub autoencoder: AeConfig,
    /// Fraction of the latent span added on each side of adaptive bounds.
    pub bounds_margin: f64,
    /// Oracle judgments per validation-accuracy estimate (never charged).
    pub validation_size: usize,
    /// Replacement triplets allowed per requested judgment before an
    /// update gives up on the remainder.
    pub max_resamples_per_judgment: usize,
}

impl RunSettings {
    pub fn defaults(task: TaskKind, strategy: Strategy) -> Self {
        let (schedule, budget) = match task {
            TaskKind::Arm => (Schedule::arm(), 1000),
            TaskKind::Maze => (Schedule::maze(), 200),
        };
        Self {
            seed: 0,
            strategy,
            schedule,
            archive_shape: vec![50, 50],
            budget,
            train: TrainConfig::default(),
            autoencoder: AeConfig::default(),
            bounds_margin: 0.05,
            validation_size: 200,
            max_resamples_per_judgment: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        self.train.validate()?;
        if self.archive_shape.is_empty() || self.archive_shape.contains(&0) {
            return Err(QdError::InvalidConfig("archive shape entries must be positive".into()));
        }
        if self.strategy.is_learned() && self.archive_shape.len() != self.train.latent_dim {
            return Err(QdError::InvalidConfig(format!(
                "archive has {} dimensions but the latent space has {}",
                self.archive_shape.len(),
                self.train.latent_dim
            )));
        }
        if self.autoencoder.latent_dim != self.train.latent_dim {
            return Err(QdError::InvalidConfig("autoencoder and projection latent sizes differ".into()));
        }
        if !(self.bounds_margin >= 0.0) {
            return Err(QdError::InvalidConfig("bounds margin must be non-negative".into()));
        }
        Ok(())
    }

    /// Number of metric updates the judgment budget is split over.
    pub fn budget_updates(&self) -> usize {
        if self.strategy.is_incremental() {
            self.schedule.update_iterations.len().max(1)
        } else {
            1
        }
    }
}

/// State handed to observers after each metric update.
pub struct Checkpoint<'a> {
    pub iteration: usize,
    pub archive: &'a Archive,
    pub model: Option<&'a LatentModel>,
    pub budget: &'a Budget,
    pub judgments: &'a [Judgment],
}

pub trait RunObserver {
    fn on_iteration(&mut self, _row: &MetricsRow) {}

    fn on_update(&mut self, _checkpoint: &Checkpoint<'_>) -> Result<()> {
        Ok(())
    }
}

pub struct NoopObserver;

impl RunObserver for NoopObserver {}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_archive: Archive,
    pub eval: EvalArchives,
    pub metrics: Vec<MetricsRow>,
    pub model: Option<LatentModel>,
    pub judgments: Vec<Judgment>,
    pub budget: Budget,
}

fn project_all(model: &LatentModel, individuals: &mut [Individual]) -> Result<()> {
    for ind in individuals {
        ind.latent_measures = Some(model.project(&ind.features)?);
    }
    Ok(())
}

fn latent_archive(population: Vec<Individual>, shape: &[usize], bounds: MeasureBounds) -> Result<Archive> {
    let mut archive = Archive::new(shape.to_vec(), bounds, MeasureKind::Latent)?;
    for ind in population {
        archive.insert(ind)?;
    }
    Ok(archive)
}

/// Re-measures every elite of `old` through `model` and inserts it into a
/// fresh latent archive with `new_bounds`; collisions keep the better
/// objective.
pub fn rebuild_archive(old: &Archive, model: &LatentModel, new_bounds: MeasureBounds) -> Result<Archive> {
    let mut population: Vec<Individual> = old.individuals().cloned().collect();
    project_all(model, &mut population)?;
    latent_archive(population, old.shape(), new_bounds)
}

struct Loop<'a> {
    task: &'a dyn Task,
    settings: &'a RunSettings,
    rng: ChaCha8Rng,
    validation_rng: ChaCha8Rng,
    budget: Budget,
    model: Option<LatentModel>,
    judgments: Vec<Judgment>,
    judged_features: HashMap<u64, Arc<[f64]>>,
}

impl Loop<'_> {
    /// Requests `n` judgments over triplets drawn from `population`. Each
    /// `Resample` answer is replaced by a fresh triplet, up to the
    /// configured cap.
    fn collect_judgments(&mut self, judge: &mut dyn Judge, population: &[Individual], n: usize) -> Result<Vec<Judgment>> {
        self.budget.ensure(n)?;
        if n == 0 {
            // an update the budget cannot fund even one judgment for
            return Err(QdError::BudgetExhausted {
                requested: 1,
                remaining: self.budget.remaining(),
                total: self.budget.total,
            });
        }
        let ids: Vec<u64> = population.iter().map(|i| i.id).collect();
        let by_id: HashMap<u64, &Individual> = population.iter().map(|i| (i.id, i)).collect();
        let items = |t: &crate::feedback::Triplet| t.ids().map(|id| by_id[&id]);

        for t in sample_triplets(&ids, n, &mut self.rng)? {
            judge.enqueue(t, items(&t), self.task)?;
        }
        let cap = n * self.settings.max_resamples_per_judgment;
        let mut resamples = 0;
        let mut in_flight = n;
        let mut out = Vec::with_capacity(n);
        while in_flight > 0 {
            let (triplet, verdict) = judge.next_verdict()?;
            in_flight -= 1;
            match verdict {
                Verdict::Choice(choice) => {
                    self.budget.charge(1)?;
                    out.push(Judgment {
                        triplet,
                        choice,
                        source: judge.source(),
                    });
                }
                Verdict::Resample if resamples < cap => {
                    resamples += 1;
                    let t = sample_triplets(&ids, 1, &mut self.rng)?[0];
                    judge.enqueue(t, items(&t), self.task)?;
                    in_flight += 1;
                }
                Verdict::Resample => warn!("resample cap reached; update proceeds with fewer judgments"),
            }
        }
        for j in &out {
            for id in j.triplet.ids() {
                self.judged_features
                    .entry(id)
                    .or_insert_with(|| by_id[&id].features.clone());
            }
        }
        Ok(out)
    }

    fn fit_model(&mut self, judge: &mut dyn Judge, population: &[Individual]) -> Result<LatentModel> {
        let s = self.settings;
        let previous = self.model.take();
        match s.strategy {
            Strategy::QdhfOffline | Strategy::QdhfOnline => {
                let n = if s.strategy.is_incremental() {
                    self.budget.per_update
                } else {
                    self.budget.total
                };
                let fresh = self.collect_judgments(judge, population, n)?;
                self.judgments.extend(fresh);
                let init = match previous {
                    Some(LatentModel::Linear(m)) => Some(m),
                    _ => None,
                };
                if self.judgments.is_empty() {
                    warn!("no judgments available; using an untrained projection");
                    return Ok(LatentModel::Linear(init.unwrap_or_else(|| {
                        LinearProjection::random(
                            self.task.feature_dim(),
                            s.train.latent_dim,
                            vec![0.0; self.task.feature_dim()],
                            &mut self.rng,
                        )
                    })));
                }
                let cfg = TrainConfig {
                    epochs: if init.is_some() { s.train.finetune_epochs } else { s.train.epochs },
                    ..s.train.clone()
                };
                let m = train_projection(&self.judged_features, &self.judgments, &cfg, init.as_ref(), &mut self.rng)?;
                Ok(LatentModel::Linear(m))
            }
            Strategy::AuroraPcaPretrained | Strategy::AuroraPcaIncremental => {
                let rows: Vec<&[f64]> = population.iter().map(|i| &i.features[..]).collect();
                Ok(LatentModel::Pca(fit_pca(&rows, s.train.latent_dim)?))
            }
            Strategy::AuroraAePretrained | Strategy::AuroraAeIncremental => {
                let rows: Vec<&[f64]> = population.iter().map(|i| &i.features[..]).collect();
                let init = match previous {
                    Some(LatentModel::AutoEncoder(m)) => Some(m),
                    _ => None,
                };
                let epochs = if init.is_some() {
                    s.autoencoder.finetune_epochs
                } else {
                    s.autoencoder.epochs
                };
                let ae = fit_autoencoder(&rows, &s.autoencoder, epochs, init.as_ref(), &mut self.rng)?;
                Ok(LatentModel::AutoEncoder(ae))
            }
            Strategy::GroundTruth => unreachable!("ground truth has no latent model"),
        }
    }

    /// Oracle judgment-prediction accuracy of the current model on fresh
    /// triplets from `population`, drawn from a dedicated stream.
    fn validation_accuracy(&mut self, population: &[Individual]) -> Result<Option<f64>> {
        let Some(model) = &self.model else {
            return Ok(None);
        };
        let n = self.settings.validation_size;
        if population.len() < 3 || n == 0 {
            return Ok(None);
        }
        let ids: Vec<u64> = population.iter().map(|i| i.id).collect();
        let by_id: HashMap<u64, &Individual> = population.iter().map(|i| (i.id, i)).collect();
        let mut judgments = Vec::with_capacity(n);
        let mut attempts = 0;
        while judgments.len() < n && attempts < n * self.settings.max_resamples_per_judgment {
            attempts += 1;
            let t = sample_triplets(&ids, 1, &mut self.validation_rng)?[0];
            let [r, a, b] = t.ids().map(|id| by_id[&id]);
            if let Verdict::Choice(choice) = oracle_verdict(&r.gt_measures, &a.gt_measures, &b.gt_measures) {
                judgments.push(Judgment {
                    triplet: t,
                    choice,
                    source: JudgmentSource::Oracle,
                });
            }
        }
        if judgments.is_empty() {
            return Ok(None);
        }
        let features: HashMap<u64, Arc<[f64]>> = population.iter().map(|i| (i.id, i.features.clone())).collect();
        validate_accuracy(model, &features, &judgments).map(Some)
    }
}

/// Runs MAP-Elites for `settings.schedule.total_iterations` iterations.
///
/// Learned strategies fit their model at iteration 0 on the first batch;
/// incremental ones refit at every scheduled update on the working
/// archive's elites plus the current batch, then rebuild the archive with
/// adaptive bounds. Every evaluated individual also goes into a
/// ground-truth archive used only for scoring.
pub fn run_qd(
    task: &dyn Task,
    judge: &mut dyn Judge,
    settings: &RunSettings,
    observer: &mut dyn RunObserver,
) -> Result<RunResult> {
    settings.validate()?;
    let strategy = settings.strategy;
    let schedule = &settings.schedule;
    let shape = settings.archive_shape.clone();
    let gt_bounds = task.measure_bounds();
    if strategy == Strategy::GroundTruth && gt_bounds.dims() != shape.len() {
        return Err(QdError::DimensionMismatch {
            expected: gt_bounds.dims(),
            got: shape.len(),
        });
    }
    let domain = task.genome_domain();

    let mut validation_rng = ChaCha8Rng::seed_from_u64(settings.seed);
    validation_rng.set_stream(1);
    let budget_total = if strategy.uses_judgments() { settings.budget } else { 0 };
    let mut state = Loop {
        task,
        settings,
        rng: ChaCha8Rng::seed_from_u64(settings.seed),
        validation_rng,
        budget: Budget::new(budget_total, settings.budget_updates()),
        model: None,
        judgments: Vec::new(),
        judged_features: HashMap::new(),
    };

    let mut all = Archive::new(shape.clone(), gt_bounds.clone(), MeasureKind::GroundTruth)?;
    let mut working = if strategy.is_learned() {
        // placeholder until the first model exists
        Archive::new(shape.clone(), MeasureBounds::new(vec![(0.0, 1.0); shape.len()])?, MeasureKind::Latent)?
    } else {
        all.empty_like()
    };
    let oracle_validation = strategy.is_learned() && judge.source() == JudgmentSource::Oracle;
    let mut val_acc = None;
    let mut metrics = Vec::with_capacity(schedule.total_iterations);
    let mut next_id = 0u64;
    let mut evaluated: Vec<Arc<[f64]>> = Vec::new();

    for it in 0..schedule.total_iterations {
        let genomes = emit_batch(&working, &domain, schedule.batch_size, schedule.mutation_sigma, &mut state.rng);
        let evals: Vec<_> = genomes.par_iter().map(|g| task.evaluate(g)).collect();
        let mut batch: Vec<Individual> = genomes
            .into_iter()
            .zip(evals)
            .map(|(genome, e)| {
                next_id += 1;
                Individual {
                    id: next_id - 1,
                    genome: Genome(genome.0),
                    objective: e.objective,
                    features: e.features.into(),
                    gt_measures: e.gt_measures,
                    latent_measures: None,
                }
            })
            .collect();
        for ind in &batch {
            all.insert(ind.clone())?;
            if strategy.is_learned() {
                evaluated.push(ind.features.clone());
            }
        }

        let update = strategy.is_learned()
            && (state.model.is_none() || (strategy.is_incremental() && schedule.update_iterations.contains(&it)));
        if update {
            let mut population: Vec<Individual> = working.individuals().cloned().collect();
            population.append(&mut batch);
            let model = state.fit_model(judge, &population)?;
            project_all(&model, &mut population)?;
            state.model = Some(model);
            let model = state.model.as_ref().expect("model was just fitted");
            let latent = evaluated.iter().map(|f| model.project(f)).collect::<Result<Vec<_>>>()?;
            let bounds = MeasureBounds::fit(latent.iter().map(Vec::as_slice), settings.bounds_margin)
                .ok_or(QdError::EmptyData)?;
            debug!("iteration {it}: rebuilt archive with bounds {:?}", bounds.as_slice());
            if oracle_validation {
                val_acc = state.validation_accuracy(&population)?;
            }
            working = latent_archive(population, &shape, bounds)?;
            observer.on_update(&Checkpoint {
                iteration: it,
                archive: &working,
                model: state.model.as_ref(),
                budget: &state.budget,
                judgments: &state.judgments,
            })?;
        } else {
            if let Some(model) = &state.model {
                project_all(model, &mut batch)?;
            }
            for ind in batch {
                working.insert(ind)?;
            }
        }

        if oracle_validation && it + 1 == schedule.total_iterations && !working.is_empty() {
            let elites: Vec<Individual> = working.individuals().cloned().collect();
            val_acc = state.validation_accuracy(&elites)?;
        }

        let view = ground_truth_view(&working, &shape, &gt_bounds)?;
        let row = MetricsRow::from_archives(it, &view, &all, state.budget.used, val_acc);
        observer.on_iteration(&row);
        metrics.push(row);
    }

    let final_archive_view = ground_truth_view(&working, &shape, &gt_bounds)?;
    Ok(RunResult {
        final_archive: working,
        eval: EvalArchives {
            all_solutions: all,
            final_archive_view,
        },
        metrics,
        model: state.model,
        judgments: state.judgments,
        budget: state.budget,
    })
}
