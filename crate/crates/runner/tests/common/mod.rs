#![allow(dead_code)]

use std::net::SocketAddr;
use std::time::Duration;

use qdhf_core::feedback::{oracle_verdict, Choice, Verdict};
use serde_json::Value;

pub fn agent() -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(30)))
        .build()
        .into()
}

pub fn get(agent: &ureq::Agent, addr: SocketAddr, path: &str) -> (u16, Value) {
    let mut resp = agent.get(&format!("http://{addr}{path}")).call().expect("request");
    let status = resp.status().as_u16();
    (status, resp.body_mut().read_json().expect("json body"))
}

pub fn post_raw(agent: &ureq::Agent, addr: SocketAddr, path: &str, body: &str) -> (u16, Value) {
    let mut resp = agent
        .post(&format!("http://{addr}{path}"))
        .header("content-type", "application/json")
        .send(body)
        .expect("request");
    let status = resp.status().as_u16();
    (status, resp.body_mut().read_json().expect("json body"))
}

pub fn post_choice(agent: &ureq::Agent, addr: SocketAddr, id: u64, choice: &str) -> (u16, Value) {
    post_raw(agent, addr, &format!("/api/v1/triplets/{id}"), &format!(r#"{{"choice":"{choice}"}}"#))
}

/// Position a render payload encodes: the arm's last joint or the maze
/// robot's final pose.
pub fn payload_position(p: &Value) -> [f64; 2] {
    let pt = match p["kind"].as_str() {
        Some("arm") => p["joints"].as_array().and_then(|j| j.last()).cloned().expect("joints"),
        Some("maze") => p["pose"].clone(),
        other => panic!("unexpected payload kind {other:?}"),
    };
    [pt[0].as_f64().unwrap(), pt[1].as_f64().unwrap()]
}

/// Answers every request the way the simulated judge would, until the run
/// reports it has finished. Returns the number of answers sent.
pub fn replay_oracle(addr: SocketAddr) -> usize {
    let agent = agent();
    let mut sent = 0;
    loop {
        let (status, next) = get(&agent, addr, "/api/v1/triplets/next");
        assert_eq!(status, 200);
        let Some(id) = next["request_id"].as_u64() else {
            if next["finished"].as_bool() == Some(true) {
                return sent;
            }
            std::thread::sleep(Duration::from_millis(10));
            continue;
        };
        let [r, a, b] = [&next["ref"], &next["a"], &next["b"]].map(payload_position);
        let choice = match oracle_verdict(&r, &a, &b) {
            Verdict::Choice(Choice::ACloser) => "A",
            Verdict::Choice(Choice::BCloser) => "B",
            Verdict::Resample => "skip",
        };
        let (status, body) = post_choice(&agent, addr, id, choice);
        assert_eq!(status, 200, "{body}");
        sent += 1;
    }
}
