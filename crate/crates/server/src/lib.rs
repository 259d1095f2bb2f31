//! HTTP/JSON front end for stepwise analysis sessions.
//!
//! Every mutating endpoint answers with the complete, refreshed session view
//! so clients never have to merge partial updates. Errors share one body
//! shape, `{code, message, details[]}`.

mod error;
mod handlers;
pub mod idempotency;
pub mod registry;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::DefaultBodyLimit;
use axum::http::{HeaderValue, Method, StatusCode};
use axum::routing::{get, post};
use axum::Router;
use clap::Parser;
use serde_json::json;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::services::ServeDir;

pub use error::{ApiError, ErrorBody};
use idempotency::IdempotencyCache;
use registry::Registry;

pub const DEFAULT_MAX_BODY: usize = 100 * 1024 * 1024;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "stepwise-server",
    about = "Serve stepwise analysis sessions over HTTP"
)]
pub struct Config {
    /// Address to listen on.
    #[arg(long, env = "STEPWISE_LISTEN", default_value = "127.0.0.1:8787")]
    pub listen: SocketAddr,
    /// Directory holding the bundled sample datasets (`<name>.csv`).
    #[arg(long, env = "STEPWISE_SAMPLE_DIR", default_value = "data")]
    pub sample_dir: PathBuf,
    /// Sessions unused for this long are discarded, e.g. `2h` or `30m`.
    #[arg(long, env = "STEPWISE_IDLE_EXPIRY", default_value = "2h", value_parser = humantime::parse_duration)]
    pub idle_expiry: Duration,
    /// Origin allowed by CORS; any origin when unset.
    #[arg(long, env = "STEPWISE_UI_ORIGIN")]
    pub ui_origin: Option<String>,
    /// Static files (the built web UI) served for unmatched paths.
    #[arg(long, env = "STEPWISE_STATIC_DIR")]
    pub static_dir: Option<PathBuf>,
    /// On shutdown, write every live session to this directory as JSON.
    #[arg(long, env = "STEPWISE_SNAPSHOT_DIR")]
    pub snapshot_dir: Option<PathBuf>,
    /// Largest accepted request body in bytes.
    #[arg(long, env = "STEPWISE_MAX_BODY", default_value_t = DEFAULT_MAX_BODY)]
    pub max_body_bytes: usize,
}

impl Config {
    /// Defaults with a given sample directory; convenient for embedding.
    pub fn with_sample_dir(dir: impl Into<PathBuf>) -> Self {
        let mut c = Config::parse_from(["stepwise-server"]);
        c.sample_dir = dir.into();
        c
    }
}

#[derive(Clone)]
pub struct AppState {
    pub config: Arc<Config>,
    pub registry: Arc<Registry>,
    idempotency: Arc<IdempotencyCache>,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        AppState {
            registry: Arc::new(Registry::new(config.idle_expiry)),
            config: Arc::new(config),
            idempotency: Arc::new(IdempotencyCache::new(10_000)),
        }
    }

    /// Writes one `<token>.json` per live session: the session view, the
    /// event log and the report. Returns the number of files written.
    pub async fn write_snapshots(&self, dir: &Path) -> std::io::Result<usize> {
        std::fs::create_dir_all(dir)?;
        let entries = self.registry.entries();
        for (token, entry) in &entries {
            let session = entry.session.lock().await;
            let doc = json!({
                "token": token,
                "created": humantime::format_rfc3339_seconds(entry.created).to_string(),
                "session": session.view(),
                "events": session.events(),
                "report": stepwise_engine::build_report(&session),
            });
            let text = serde_json::to_string_pretty(&doc).expect("snapshot serialises");
            std::fs::write(dir.join(format!("{token}.json")), text)?;
        }
        Ok(entries.len())
    }
}

pub(crate) fn too_large(limit: usize) -> ApiError {
    ApiError::new(
        StatusCode::PAYLOAD_TOO_LARGE,
        "payload_too_large",
        format!("request bodies are limited to {limit} bytes"),
    )
}

fn cors(config: &Config) -> CorsLayer {
    let origin = match config.ui_origin.as_deref().map(HeaderValue::from_str) {
        Some(Ok(o)) => AllowOrigin::exact(o),
        _ => AllowOrigin::any(),
    };
    CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
        .allow_headers(Any)
}

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/workflows", get(handlers::list_workflows))
        .route("/samples", get(handlers::list_samples))
        .route("/sessions", post(handlers::create_session))
        .route("/sessions/{token}", get(handlers::get_session))
        .route(
            "/sessions/{token}/steps/{step}/inputs",
            post(handlers::submit_inputs),
        )
        .route(
            "/sessions/{token}/steps/{step}/edit",
            post(handlers::edit_step),
        )
        .route("/sessions/{token}/dataset", post(handlers::replace_dataset))
        .route(
            "/sessions/{token}/steps/{step}/actions/{suggestion}",
            post(handlers::apply_action),
        )
        .route(
            "/sessions/{token}/steps/{step}/explanation",
            get(handlers::explanation),
        )
        .route("/sessions/{token}/report", get(handlers::report))
        .route("/sessions/{token}/export/model", get(handlers::model));
    let api = match &state.config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(handlers::not_found),
    };
    api.layer(axum::middleware::from_fn_with_state(
        state.clone(),
        idempotency::middleware,
    ))
    .layer(DefaultBodyLimit::max(state.config.max_body_bytes))
    .layer(cors(&state.config))
    .with_state(state)
}

/// Runs until Ctrl-C, then writes snapshots when configured.
pub async fn serve(config: Config) -> anyhow::Result<()> {
    let state = AppState::new(config.clone());
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(dir) = &config.snapshot_dir {
        let n = state.write_snapshots(dir).await?;
        tracing::info!("wrote {n} session snapshots to {}", dir.display());
    }
    Ok(())
}
