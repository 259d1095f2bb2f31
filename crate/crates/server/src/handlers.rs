use axum::body::Bytes;
use axum::extract::{FromRequest, Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use stepwise_core::data::{load_csv_str, CsvOptions, Dataset};
use stepwise_engine::{
    build_report, builtin_workflow, builtin_workflows, render_text, ActionEffect, Session,
    SessionView, StepKind,
};

use crate::error::ApiError;
use crate::AppState;

/// JSON body whose rejections use the shared error shape.
pub struct JsonBody<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for JsonBody<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        let bytes = Bytes::from_request(req, state).await.map_err(|rej| {
            if rej.status() == StatusCode::PAYLOAD_TOO_LARGE {
                ApiError::new(rej.status(), "payload_too_large", rej.body_text())
            } else {
                ApiError::new(rej.status(), "bad_request", rej.body_text())
            }
        })?;
        serde_json::from_slice(&bytes).map(JsonBody).map_err(|e| {
            ApiError::bad_request("invalid_json", format!("invalid request body: {e}"))
        })
    }
}

#[derive(Serialize)]
pub struct StepSummary {
    id: String,
    title: String,
    kind: StepKind,
}

#[derive(Serialize)]
pub struct WorkflowSummary {
    id: String,
    name: String,
    description: String,
    steps: Vec<StepSummary>,
}

pub async fn list_workflows() -> Json<Vec<WorkflowSummary>> {
    Json(
        builtin_workflows()
            .iter()
            .map(|w| WorkflowSummary {
                id: w.id.clone(),
                name: w.name.clone(),
                description: w.description.clone(),
                steps: w
                    .steps
                    .iter()
                    .map(|s| StepSummary {
                        id: s.id.clone(),
                        title: s.title.clone(),
                        kind: s.kind,
                    })
                    .collect(),
            })
            .collect(),
    )
}

pub async fn list_samples(State(app): State<AppState>) -> Json<Vec<String>> {
    let mut names: Vec<String> = std::fs::read_dir(&app.config.sample_dir)
        .into_iter()
        .flatten()
        .flatten()
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            name.strip_suffix(".csv").map(str::to_string)
        })
        .collect();
    names.sort();
    Json(names)
}

pub async fn not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

/// A dataset given either inline as CSV text or by sample name.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetUpload {
    #[serde(default)]
    sample: Option<String>,
    #[serde(default)]
    csv: Option<String>,
    /// Label for inline uploads; defaults to `upload.csv`.
    #[serde(default)]
    name: Option<String>,
}

fn valid_sample_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl DatasetUpload {
    fn load(&self, app: &AppState) -> Result<(Dataset, String), ApiError> {
        match (&self.sample, &self.csv) {
            (Some(sample), None) => {
                if !valid_sample_name(sample) {
                    return Err(ApiError::not_found(format!("unknown sample `{sample}`")));
                }
                let file = format!("{sample}.csv");
                let text = std::fs::read_to_string(app.config.sample_dir.join(&file))
                    .map_err(|_| ApiError::not_found(format!("unknown sample `{sample}`")))?;
                let d = load_csv_str(&text, &CsvOptions::default()).map_err(ApiError::parse)?;
                Ok((d, file))
            }
            (None, Some(csv)) => {
                let d = load_csv_str(csv, &CsvOptions::default()).map_err(ApiError::parse)?;
                Ok((d, self.name.clone().unwrap_or_else(|| "upload.csv".into())))
            }
            _ => Err(ApiError::bad_request(
                "invalid_dataset",
                "give exactly one of `sample` or `csv`",
            )),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    workflow_id: String,
    dataset: DatasetUpload,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputsRequest {
    #[serde(default)]
    inputs: Map<String, Value>,
}

#[derive(Serialize)]
pub struct SessionResponse {
    token: String,
    session: SessionView,
}

#[derive(Serialize)]
pub struct ActionResponse {
    token: String,
    effect: ActionEffect,
    session: SessionView,
}

fn respond(token: String, session: &Session) -> Json<SessionResponse> {
    Json(SessionResponse {
        token,
        session: session.view(),
    })
}

pub async fn create_session(
    State(app): State<AppState>,
    JsonBody(req): JsonBody<CreateRequest>,
) -> Result<(StatusCode, Json<SessionResponse>), ApiError> {
    let workflow = builtin_workflow(&req.workflow_id)
        .ok_or_else(|| ApiError::not_found(format!("unknown workflow `{}`", req.workflow_id)))?;
    let (dataset, source) = req.dataset.load(&app)?;
    let session = Session::create(workflow, dataset, &source)?;
    let view = session.view();
    let token = app.registry.insert(session);
    Ok((
        StatusCode::CREATED,
        Json(SessionResponse {
            token,
            session: view,
        }),
    ))
}

pub async fn get_session(
    State(app): State<AppState>,
    Path(token): Path<String>,
) -> Result<Json<SessionResponse>, ApiError> {
    let entry = app.registry.get(&token)?;
    let session = entry.session.lock().await;
    Ok(respond(token, &session))
}

pub async fn submit_inputs(
    State(app): State<AppState>,
    Path((token, step)): Path<(String, String)>,
    JsonBody(req): JsonBody<InputsRequest>,
) -> Result<Json<SessionResponse>, ApiError> {
    let entry = app.registry.get(&token)?;
    let mut session = entry.session.lock().await;
    session.submit_inputs(&step, req.inputs)?;
    Ok(respond(token, &session))
}

pub async fn edit_step(
    State(app): State<AppState>,
    Path((token, step)): Path<(String, String)>,
    JsonBody(req): JsonBody<InputsRequest>,
) -> Result<Json<SessionResponse>, ApiError> {
    let entry = app.registry.get(&token)?;
    let mut session = entry.session.lock().await;
    session.edit_step(&step, req.inputs)?;
    Ok(respond(token, &session))
}

pub async fn replace_dataset(
    State(app): State<AppState>,
    Path(token): Path<String>,
    JsonBody(upload): JsonBody<DatasetUpload>,
) -> Result<Json<SessionResponse>, ApiError> {
    let entry = app.registry.get(&token)?;
    let (dataset, _) = upload.load(&app)?;
    if dataset.row_count() == 0 {
        return Err(stepwise_engine::EngineError::EmptyDataset.into());
    }
    let mut session = entry.session.lock().await;
    session.replace_dataset(dataset);
    Ok(respond(token, &session))
}

pub async fn apply_action(
    State(app): State<AppState>,
    Path((token, step, suggestion)): Path<(String, String, String)>,
) -> Result<Json<ActionResponse>, ApiError> {
    let entry = app.registry.get(&token)?;
    let mut session = entry.session.lock().await;
    let effect = session.apply_action(&step, &suggestion)?;
    Ok(Json(ActionResponse {
        token,
        effect,
        session: session.view(),
    }))
}

pub async fn explanation(
    State(app): State<AppState>,
    Path((token, step)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let entry = app.registry.get(&token)?;
    let session = entry.session.lock().await;
    Ok(Json(session.get_explanation(&step)?).into_response())
}

#[derive(Deserialize)]
pub struct ReportQuery {
    #[serde(default)]
    format: Option<String>,
}

pub async fn report(
    State(app): State<AppState>,
    Path(token): Path<String>,
    Query(q): Query<ReportQuery>,
) -> Result<Response, ApiError> {
    let entry = app.registry.get(&token)?;
    let session = entry.session.lock().await;
    let report = build_report(&session);
    match q.format.as_deref() {
        None | Some("json") => Ok(Json(report).into_response()),
        Some("text") => Ok((
            [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
            render_text(&report),
        )
            .into_response()),
        Some(other) => Err(ApiError::bad_request(
            "invalid_format",
            format!("unknown report format `{other}`; use `json` or `text`"),
        )),
    }
}

pub async fn model(
    State(app): State<AppState>,
    Path(token): Path<String>,
) -> Result<Response, ApiError> {
    let entry = app.registry.get(&token)?;
    let session = entry.session.lock().await;
    let model = stepwise_engine::export_model(&session)?;
    Ok(Json(model).into_response())
}
