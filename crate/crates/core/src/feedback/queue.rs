use std::collections::{BTreeMap, VecDeque};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::Serialize;

use super::{Judge, JudgmentSource, RenderPayload, Triplet, Verdict};
use crate::engine::Individual;
use crate::error::{QdError, Result};
use crate::tasks::Task;

/// A triplet waiting for a human answer, with what to draw for it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PendingRequest {
    pub request_id: u64,
    #[serde(skip)]
    pub triplet: Triplet,
    #[serde(rename = "ref")]
    pub reference: RenderPayload,
    pub a: RenderPayload,
    pub b: RenderPayload,
}

#[derive(Debug, Default)]
struct QueueState {
    next_id: u64,
    requests: BTreeMap<u64, (PendingRequest, Option<Verdict>)>,
    unresolved: VecDeque<u64>,
}

/// Requests shared between the optimizer and whoever answers them.
///
/// Each request resolves at most once; resolutions are forwarded to the
/// blocked [`HumanJudge`] in the order they arrive.
#[derive(Debug)]
pub struct JudgmentQueue {
    state: Mutex<QueueState>,
    answers: Sender<(Triplet, Verdict)>,
}

impl JudgmentQueue {
    pub fn push(&self, triplet: Triplet, payloads: [RenderPayload; 3]) -> u64 {
        let mut st = self.state.lock().expect("queue lock");
        let id = st.next_id;
        st.next_id += 1;
        let [reference, a, b] = payloads;
        let req = PendingRequest {
            request_id: id,
            triplet,
            reference,
            a,
            b,
        };
        st.requests.insert(id, (req, None));
        st.unresolved.push_back(id);
        id
    }

    /// Oldest unresolved request.
    pub fn next_pending(&self) -> Option<PendingRequest> {
        let st = self.state.lock().expect("queue lock");
        st.unresolved.front().map(|id| st.requests[id].0.clone())
    }

    pub fn pending_count(&self) -> usize {
        self.state.lock().expect("queue lock").unresolved.len()
    }

    /// Answered requests in request order.
    pub fn resolved(&self) -> Vec<(u64, Triplet, Verdict)> {
        let st = self.state.lock().expect("queue lock");
        st.requests
            .iter()
            .filter_map(|(&id, (req, v))| v.map(|v| (id, req.triplet, v)))
            .collect()
    }

    pub fn resolve(&self, request_id: u64, verdict: Verdict) -> Result<()> {
        let mut st = self.state.lock().expect("queue lock");
        let (req, slot) = st
            .requests
            .get_mut(&request_id)
            .ok_or(QdError::UnknownRequest(request_id))?;
        if slot.is_some() {
            return Err(QdError::AlreadyResolved(request_id));
        }
        *slot = Some(verdict);
        let triplet = req.triplet;
        st.unresolved.retain(|&id| id != request_id);
        self.answers
            .send((triplet, verdict))
            .map_err(|_| QdError::JudgeDisconnected)
    }
}

/// Judge backed by a [`JudgmentQueue`] that blocks until answers arrive.
pub struct HumanJudge {
    queue: Arc<JudgmentQueue>,
    answers: Receiver<(Triplet, Verdict)>,
    timeout: Option<Duration>,
}

impl HumanJudge {
    pub fn new(timeout: Option<Duration>) -> (Self, Arc<JudgmentQueue>) {
        let (tx, rx) = channel();
        let queue = Arc::new(JudgmentQueue {
            state: Mutex::new(QueueState::default()),
            answers: tx,
        });
        (
            Self {
                queue: queue.clone(),
                answers: rx,
                timeout,
            },
            queue,
        )
    }
}

impl Judge for HumanJudge {
    fn source(&self) -> JudgmentSource {
        JudgmentSource::Human
    }

    fn enqueue(&mut self, triplet: Triplet, items: [&Individual; 3], task: &dyn Task) -> Result<()> {
        let payloads = items.map(|ind| task.render(&ind.genome));
        self.queue.push(triplet, payloads);
        Ok(())
    }

    fn next_verdict(&mut self) -> Result<(Triplet, Verdict)> {
        match self.timeout {
            None => self.answers.recv().map_err(|_| QdError::JudgeDisconnected),
            Some(t) => self.answers.recv_timeout(t).map_err(|e| match e {
                RecvTimeoutError::Timeout => QdError::JudgeTimeout,
                RecvTimeoutError::Disconnected => QdError::JudgeDisconnected,
            }),
        }
    }
}
