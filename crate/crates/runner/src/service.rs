//! Embedded HTTP service: judgment endpoints, run status and static UI.
//!
//! The optimizer runs on its own thread and blocks on the judgment queue;
//! handlers resolve into that queue and read a status snapshot refreshed
//! once per iteration.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use log::{info, warn};
use qdhf_core::engine::{run_qd, Checkpoint, RunObserver, RunResult};
use qdhf_core::eval::MetricsRow;
use qdhf_core::feedback::{Budget, Choice, HumanJudge, Judge, JudgmentQueue, OracleJudge, Triplet, Verdict};
use qdhf_core::QdError;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::artifacts::{prepare_output, write_checkpoint, write_config, write_result};
use crate::config::{ExperimentConfig, JudgeKind};
use crate::experiment::build_task;
use crate::RunnerError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatus {
    /// Iterations completed so far.
    pub iteration: usize,
    pub budget: Budget,
    pub pending: usize,
    pub finished: bool,
    pub error: Option<String>,
}

struct Shared {
    status: Mutex<RunStatus>,
    queue: Option<Arc<JudgmentQueue>>,
}

impl Shared {
    fn snapshot(&self) -> RunStatus {
        let mut s = self.status.lock().expect("status lock").clone();
        s.pending = self.queue.as_ref().map_or(0, |q| q.pending_count());
        s
    }

    fn update(&self, f: impl FnOnce(&mut RunStatus)) {
        f(&mut self.status.lock().expect("status lock"));
    }
}

fn error(code: StatusCode, msg: impl Into<String>) -> Response {
    (code, Json(json!({ "error": msg.into() }))).into_response()
}

async fn status(State(shared): State<Arc<Shared>>) -> Json<RunStatus> {
    Json(shared.snapshot())
}

async fn next_triplet(State(shared): State<Arc<Shared>>) -> Response {
    match shared.queue.as_ref().and_then(|q| q.next_pending()) {
        Some(req) => Json(req).into_response(),
        None => Json(json!({ "request_id": null, "finished": shared.snapshot().finished })).into_response(),
    }
}

#[derive(Debug, Deserialize)]
struct ChoiceBody {
    choice: String,
}

async fn answer(
    State(shared): State<Arc<Shared>>,
    Path(id): Path<String>,
    body: Result<Json<ChoiceBody>, JsonRejection>,
) -> Response {
    let Json(body) = match body {
        Ok(b) => b,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.body_text()),
    };
    let verdict = match body.choice.as_str() {
        "A" => Verdict::Choice(Choice::ACloser),
        "B" => Verdict::Choice(Choice::BCloser),
        "skip" => Verdict::Resample,
        other => return error(StatusCode::BAD_REQUEST, format!("choice must be A, B or skip, got '{other}'")),
    };
    let (Some(queue), Ok(id)) = (shared.queue.as_ref(), id.parse::<u64>()) else {
        return error(StatusCode::NOT_FOUND, format!("unknown request {id}"));
    };
    match queue.resolve(id, verdict) {
        Ok(()) => Json(json!({ "request_id": id, "accepted": true })).into_response(),
        Err(e @ QdError::UnknownRequest(_)) => error(StatusCode::NOT_FOUND, e.to_string()),
        Err(e @ QdError::AlreadyResolved(_)) => error(StatusCode::CONFLICT, e.to_string()),
        Err(QdError::JudgeDisconnected) => error(StatusCode::CONFLICT, "the run has finished"),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

fn router(shared: Arc<Shared>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/v1/status", get(status))
        .route("/api/v1/triplets/next", get(next_triplet))
        .route("/api/v1/triplets/{id}", post(answer))
        .with_state(shared);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Keeps the status snapshot current and checkpoints at every update.
struct ServiceObserver {
    shared: Arc<Shared>,
    out: PathBuf,
}

impl RunObserver for ServiceObserver {
    fn on_iteration(&mut self, row: &MetricsRow) {
        self.shared.update(|s| {
            s.iteration = row.iteration + 1;
            s.budget.used = row.judgments_used;
        });
    }

    fn on_update(&mut self, cp: &Checkpoint) -> qdhf_core::Result<()> {
        self.shared.update(|s| s.budget = *cp.budget);
        write_checkpoint(&self.out, cp).map_err(|e| QdError::Io(std::io::Error::other(e.to_string())))
    }
}

enum Event {
    Finished,
    Interrupted,
    ServerFailed(String),
}

/// A run in service mode.
pub struct ServiceHandle {
    pub addr: SocketAddr,
    shared: Arc<Shared>,
    out: PathBuf,
    events: mpsc::Receiver<Event>,
    optimizer: Option<JoinHandle<Result<RunResult, RunnerError>>>,
    server: Option<JoinHandle<()>>,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
}

/// Starts the optimizer and the HTTP service. With a human judge the
/// optimizer immediately blocks on its first batch of requests. Port 0
/// picks a free port; see [`ServiceHandle::addr`].
pub fn start(cfg: &ExperimentConfig, force: bool, handle_signals: bool) -> Result<ServiceHandle, RunnerError> {
    if cfg.judge.kind == JudgeKind::Human && !cfg.strategy.uses_judgments() {
        return Err(RunnerError::Config(format!(
            "strategy {} does not use judgments; serve needs qdhf-online or qdhf-offline",
            cfg.strategy
        )));
    }
    let out = cfg.output.dir.clone();
    let task = build_task(cfg)?;
    prepare_output(&out, force)?;
    write_config(&out, cfg)?;

    let settings = cfg.run_settings();
    let (mut judge, queue): (Box<dyn Judge>, Option<Arc<JudgmentQueue>>) = match cfg.judge.kind {
        JudgeKind::Human => {
            let (j, q) = HumanJudge::new(cfg.judge.timeout_secs.map(Duration::from_secs_f64));
            (Box::new(j), Some(q))
        }
        JudgeKind::Oracle => (Box::new(OracleJudge::new()), None),
    };
    let budget_total = if settings.strategy.uses_judgments() { settings.budget } else { 0 };
    let shared = Arc::new(Shared {
        status: Mutex::new(RunStatus {
            iteration: 0,
            budget: Budget::new(budget_total, settings.budget_updates()),
            pending: 0,
            finished: false,
            error: None,
        }),
        queue,
    });

    let listener = std::net::TcpListener::bind((cfg.service.host.as_str(), cfg.service.port))
        .map_err(|e| RunnerError::Service(format!("cannot bind {}:{}: {e}", cfg.service.host, cfg.service.port)))?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let (events_tx, events) = mpsc::channel();
    let (shutdown, shutdown_rx) = tokio::sync::oneshot::channel::<()>();

    let app = router(shared.clone(), cfg.service.ui_dir.clone());
    let server_events = events_tx.clone();
    let interrupt_events = events_tx.clone();
    let server = std::thread::spawn(move || {
        let served = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .and_then(|rt| {
                rt.block_on(async move {
                    let listener = tokio::net::TcpListener::from_std(listener)?;
                    let stop = async move {
                        if handle_signals {
                            tokio::select! {
                                _ = shutdown_rx => {}
                                _ = tokio::signal::ctrl_c() => {
                                    let _ = interrupt_events.send(Event::Interrupted);
                                }
                            }
                        } else {
                            let _ = shutdown_rx.await;
                        }
                    };
                    axum::serve(listener, app).with_graceful_shutdown(stop).await
                })
            });
        if let Err(e) = served {
            let _ = server_events.send(Event::ServerFailed(e.to_string()));
        }
    });
    info!("serving on http://{addr}");

    let opt_shared = shared.clone();
    let opt_out = out.clone();
    let optimizer = std::thread::spawn(move || {
        let mut observer = ServiceObserver {
            shared: opt_shared.clone(),
            out: opt_out.clone(),
        };
        let result = run_qd(task.as_ref(), judge.as_mut(), &settings, &mut observer)
            .map_err(RunnerError::from)
            .and_then(|r| write_result(&opt_out, &r).map(|()| r));
        opt_shared.update(|s| {
            s.finished = true;
            if let Err(e) = &result {
                s.error = Some(e.to_string());
            }
        });
        let _ = events_tx.send(Event::Finished);
        result
    });

    Ok(ServiceHandle {
        addr,
        shared,
        out,
        events,
        optimizer: Some(optimizer),
        server: Some(server),
        shutdown: Some(shutdown),
    })
}

#[derive(Serialize)]
struct AnsweredRequest {
    request_id: u64,
    triplet: Triplet,
    verdict: Verdict,
}

impl ServiceHandle {
    pub fn status(&self) -> RunStatus {
        self.shared.snapshot()
    }

    fn stop_server(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(h) = self.server.take() {
            let _ = h.join();
        }
    }

    /// Writes the status and every answer received so far to
    /// `checkpoint/interrupted.json`. Model, archive and budget as of the
    /// last update are already in `checkpoint/`.
    pub fn checkpoint_now(&self) -> Result<(), RunnerError> {
        let answered: Vec<AnsweredRequest> = self
            .shared
            .queue
            .as_ref()
            .map(|q| q.resolved())
            .unwrap_or_default()
            .into_iter()
            .map(|(request_id, triplet, verdict)| AnsweredRequest {
                request_id,
                triplet,
                verdict,
            })
            .collect();
        let dir = self.out.join("checkpoint");
        std::fs::create_dir_all(&dir)?;
        let body = json!({ "status": self.status(), "answered": answered });
        std::fs::write(dir.join("interrupted.json"), serde_json::to_string_pretty(&body)? + "\n")?;
        Ok(())
    }

    /// Blocks until the run finishes (returning its result) or the process
    /// is interrupted (checkpointing first).
    pub fn wait(mut self) -> Result<RunResult, RunnerError> {
        let event = self.events.recv().unwrap_or(Event::Finished);
        match event {
            Event::Finished => {
                let result = self
                    .optimizer
                    .take()
                    .expect("optimizer joined once")
                    .join()
                    .map_err(|_| RunnerError::Service("optimizer thread panicked".into()))?;
                self.stop_server();
                result
            }
            Event::Interrupted => {
                warn!("interrupted; checkpointing into {}", self.out.display());
                self.checkpoint_now()?;
                self.stop_server();
                Err(RunnerError::Interrupted)
            }
            Event::ServerFailed(msg) => Err(RunnerError::Service(msg)),
        }
    }

    /// Stops serving without waiting for the run, checkpointing first. A
    /// human-judged optimizer stays blocked on its queue.
    pub fn shutdown(mut self) -> Result<(), RunnerError> {
        self.checkpoint_now()?;
        self.stop_server();
        Ok(())
    }
}
