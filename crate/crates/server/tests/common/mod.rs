#![allow(dead_code)]

use std::path::PathBuf;

use axum::body::Body;
use axum::http::{header, HeaderMap, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use stepwise_server::{router, AppState, Config};
use tower::ServiceExt;

pub fn sample_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn app_with(config: Config) -> (Router, AppState) {
    let state = AppState::new(config);
    (router(state.clone()), state)
}

pub fn app() -> Router {
    app_with(Config::with_sample_dir(sample_dir())).0
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("{e}: {}", self.text))
    }
}

pub async fn send(
    app: &Router,
    method: Method,
    uri: &str,
    body: Option<Value>,
    extra: &[(&str, &str)],
) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    for (k, v) in extra {
        req = req.header(*k, *v);
    }
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        headers,
        text: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    send(app, Method::GET, uri, None, &[]).await
}

pub async fn post(app: &Router, uri: &str, body: Value) -> Reply {
    send(app, Method::POST, uri, Some(body), &[]).await
}

/// Creates a session from a bundled sample and returns its token.
pub async fn create(app: &Router, workflow: &str, sample: &str) -> (String, Value) {
    let r = post(
        app,
        "/sessions",
        serde_json::json!({"workflow_id": workflow, "dataset": {"sample": sample}}),
    )
    .await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
    let v = r.json();
    (v["token"].as_str().unwrap().to_string(), v)
}

pub fn statuses(view: &Value) -> Vec<String> {
    view["session"]["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["status"].as_str().unwrap().to_string())
        .collect()
}

/// The lifecycle invariants, checked on a serialised step-state list.
pub fn check_lifecycle(view: &Value) -> Result<(), String> {
    let steps = view["session"]["steps"].as_array().ok_or("no step list")?;
    let mut awaiting = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        let status = s["status"].as_str().ok_or("status missing")?;
        if !["pending", "active", "done", "invalidated"].contains(&status) {
            return Err(format!("unknown status {status}"));
        }
        if s["outputs"].is_null() == (status == "done") {
            return Err(format!("step {i}: outputs and status `{status}` disagree"));
        }
        if status == "invalidated" && s["error"].is_null() {
            return Err(format!("step {i} invalidated without a reason"));
        }
        if matches!(status, "active" | "invalidated") {
            awaiting.push(i);
        }
    }
    let active = &view["session"]["active_step"];
    match awaiting.as_slice() {
        [] => {
            if steps.iter().any(|s| s["status"] != "done") || !active.is_null() {
                return Err("nothing awaits input yet the workflow is incomplete".into());
            }
        }
        [a] => {
            if steps[..*a].iter().any(|s| s["status"] != "done") {
                return Err("a step before the active one is not done".into());
            }
            if steps[a + 1..].iter().any(|s| s["status"] != "pending") {
                return Err("a step after the active one is not pending".into());
            }
            if active != &steps[*a]["def_id"] {
                return Err("active_step does not name the awaiting step".into());
            }
        }
        _ => return Err(format!("several steps await input: {awaiting:?}")),
    }
    Ok(())
}
