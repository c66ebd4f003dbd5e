use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use retro_core::{ScenarioError, ValidationReport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDetail {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    pub message: String,
}

/// Body of every 4xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub details: Vec<ErrorDetail>,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, error: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: error.into(),
                details: Vec::new(),
            },
        }
    }

    pub fn not_found(what: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("{what} not found"))
    }

    pub fn invalid(report: &ValidationReport) -> Self {
        let mut err = ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "scenario failed validation",
        );
        err.body.details = report
            .violations
            .iter()
            .map(|v| ErrorDetail {
                location: Some(v.location.clone()),
                message: v.to_string(),
            })
            .collect();
        err
    }
}

impl From<ScenarioError> for ApiError {
    fn from(err: ScenarioError) -> Self {
        match &err {
            ScenarioError::Invalid(report) => ApiError::invalid(report),
            ScenarioError::Syntax { message, .. } => {
                let mut api = ApiError::new(StatusCode::BAD_REQUEST, "malformed JSON");
                api.body.details.push(ErrorDetail {
                    location: err.location(),
                    message: message.clone(),
                });
                api
            }
            ScenarioError::Schema { message, .. } => {
                let mut api = ApiError::new(StatusCode::BAD_REQUEST, "schema violation");
                api.body.details.push(ErrorDetail {
                    location: err.location(),
                    message: message.clone(),
                });
                api
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
