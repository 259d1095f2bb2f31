//! Replay of mutating requests that carry an `Idempotency-Key` header.
//!
//! The first response for a key is stored together with a fingerprint of the
//! request (method, path, body). A retry with the same fingerprint receives
//! the stored response without touching the session again; reusing a key for
//! a different request is rejected. Requests sharing a key are serialised, so
//! a retry racing the original waits for it instead of running twice.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use axum::body::{to_bytes, Body, Bytes};
use axum::extract::{Request, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::middleware::Next;
use axum::response::{IntoResponse, Response};
use sha2::{Digest, Sha256};

use crate::error::ApiError;
use crate::AppState;

pub const HEADER: &str = "idempotency-key";
pub const REPLAYED_HEADER: &str = "idempotent-replayed";

struct Stored {
    fingerprint: [u8; 32],
    status: StatusCode,
    content_type: Option<HeaderValue>,
    body: Bytes,
}

type Slot = Arc<tokio::sync::Mutex<Option<Stored>>>;

pub struct IdempotencyCache {
    inner: Mutex<(HashMap<String, Slot>, VecDeque<String>)>,
    capacity: usize,
}

impl IdempotencyCache {
    pub fn new(capacity: usize) -> Self {
        IdempotencyCache {
            inner: Mutex::new((HashMap::new(), VecDeque::new())),
            capacity,
        }
    }

    fn slot(&self, key: &str) -> Slot {
        let mut guard = self.inner.lock().unwrap();
        let (map, order) = &mut *guard;
        if let Some(s) = map.get(key) {
            return s.clone();
        }
        while map.len() >= self.capacity {
            match order.pop_front() {
                Some(old) => {
                    map.remove(&old);
                }
                None => break,
            }
        }
        let slot = Slot::default();
        map.insert(key.to_string(), slot.clone());
        order.push_back(key.to_string());
        slot
    }
}

fn fingerprint(method: &Method, path: &str, body: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(method.as_str());
    h.update([0]);
    h.update(path);
    h.update([0]);
    h.update(body);
    h.finalize().into()
}

fn stored_response(s: &Stored, replayed: bool) -> Response {
    let mut resp = (s.status, s.body.clone()).into_response();
    if let Some(ct) = &s.content_type {
        resp.headers_mut().insert(header::CONTENT_TYPE, ct.clone());
    }
    if replayed {
        resp.headers_mut()
            .insert(REPLAYED_HEADER, HeaderValue::from_static("true"));
    }
    resp
}

pub async fn middleware(State(app): State<AppState>, req: Request, next: Next) -> Response {
    if req.method() != Method::POST {
        return next.run(req).await;
    }
    let key = match req.headers().get(HEADER) {
        None => return next.run(req).await,
        Some(v) => match v.to_str() {
            Ok(k) if !k.is_empty() && k.len() <= 255 => k.to_string(),
            _ => {
                return ApiError::bad_request(
                    "invalid_idempotency_key",
                    "the idempotency key must be 1 to 255 visible ASCII characters",
                )
                .into_response()
            }
        },
    };

    let (parts, body) = req.into_parts();
    let bytes = match to_bytes(body, app.config.max_body_bytes).await {
        Ok(b) => b,
        Err(_) => return crate::too_large(app.config.max_body_bytes).into_response(),
    };
    let fp = fingerprint(&parts.method, parts.uri.path(), &bytes);

    let slot = app.idempotency.slot(&key);
    let mut stored = slot.lock().await;
    if let Some(s) = stored.as_ref() {
        if s.fingerprint == fp {
            return stored_response(s, true);
        }
        return ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "idempotency_key_reused",
            format!("idempotency key `{key}` was already used for a different request"),
        )
        .into_response();
    }

    let resp = next
        .run(Request::from_parts(parts, Body::from(bytes)))
        .await;
    let (rparts, rbody) = resp.into_parts();
    let Ok(rbytes) = to_bytes(rbody, usize::MAX).await else {
        return StatusCode::INTERNAL_SERVER_ERROR.into_response();
    };
    let s = Stored {
        fingerprint: fp,
        status: rparts.status,
        content_type: rparts.headers.get(header::CONTENT_TYPE).cloned(),
        body: rbytes,
    };
    // Server faults are worth retrying for real, so they are not pinned.
    let resp = stored_response(&s, false);
    if !s.status.is_server_error() {
        *stored = Some(s);
    }
    resp
}
