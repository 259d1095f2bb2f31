use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::{json, Value};
use stepwise_core::data::DataError;
use stepwise_engine::EngineError;

/// Error body shared by every endpoint: `{code, message, details[]}`.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    pub details: Vec<Value>,
}

#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code,
                message: message.into(),
                details: Vec::new(),
            },
        }
    }

    pub fn with_details(mut self, details: Vec<Value>) -> Self {
        self.body.details = details;
        self
    }

    pub fn not_found(what: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", what)
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, code, message)
    }

    /// CSV problems; the message names the offending line when known.
    pub fn parse(err: DataError) -> Self {
        let mut details = json!({ "message": err.to_string() });
        if let DataError::RaggedRow {
            line,
            expected,
            found,
        } = err
        {
            details = json!({ "line": line, "expected_fields": expected, "found_fields": found });
        }
        ApiError::bad_request(
            "csv_parse_error",
            format!("could not read the dataset: {err}"),
        )
        .with_details(vec![details])
    }
}

impl From<EngineError> for ApiError {
    fn from(err: EngineError) -> Self {
        let message = err.to_string();
        match err {
            EngineError::UnknownWorkflow(_)
            | EngineError::UnknownStep(_)
            | EngineError::UnknownSuggestion { .. } => ApiError::not_found(message),
            EngineError::Lifecycle(_) => ApiError::new(StatusCode::CONFLICT, "lifecycle", message),
            EngineError::Schema(e) => {
                let details = e
                    .violations
                    .iter()
                    .map(|v| json!({ "step": e.step_id, "param": v.param, "reason": v.reason }))
                    .collect();
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "schema", message)
                    .with_details(details)
            }
            EngineError::Compute {
                step_id,
                message: reason,
            } => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "computation_failed",
                message,
            )
            .with_details(vec![json!({ "step": step_id, "reason": reason })]),
            EngineError::EmptyDataset => ApiError::bad_request("empty_dataset", message),
            EngineError::Snippet(_) | EngineError::Replay(_) => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
