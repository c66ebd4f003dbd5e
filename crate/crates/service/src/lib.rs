//! Session-scoped HTTP API over the retrospection engine.
//!
//! Each session holds one scenario document and a revision counter that
//! increments on every effective edit. Runs are never triggered by edits;
//! the stored result carries the revision it was computed from so clients
//! can tell when it is stale.

mod error;

use std::collections::HashMap;
use std::io;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use retro_core::scenario::{parse_document, parse_ethics};
use retro_core::{retrospect, EngineError, GraphDocument, ScenarioDocument};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use uuid::Uuid;

pub use error::{ApiError, ErrorBody, ErrorDetail};

#[derive(Debug, Clone)]
pub struct Session {
    pub document: ScenarioDocument,
    pub revision: u64,
    pub last_result: Option<StoredResult>,
}

#[derive(Debug, Clone)]
pub struct StoredResult {
    pub revision: u64,
    pub graph: GraphDocument,
}

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Target directory for `POST /sessions/{id}/snapshot`; snapshots are
    /// refused when unset.
    pub snapshot_dir: Option<PathBuf>,
}

#[derive(Debug, Default)]
struct Store {
    sessions: RwLock<HashMap<Uuid, Arc<Mutex<Session>>>>,
    config: ServiceConfig,
}

#[derive(Debug, Clone, Default)]
pub struct AppState {
    store: Arc<Store>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            store: Arc::new(Store {
                sessions: RwLock::default(),
                config,
            }),
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let id = Uuid::parse_str(id).map_err(|_| ApiError::not_found("session"))?;
        self.store
            .sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("session"))
    }
}

fn lock(session: &Mutex<Session>) -> MutexGuard<'_, Session> {
    session.lock().unwrap_or_else(|e| e.into_inner())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Created {
    pub id: Uuid,
    pub revision: u64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Revision {
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResponse {
    #[serde(flatten)]
    pub graph: GraphDocument,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultResponse {
    #[serde(flatten)]
    pub graph: GraphDocument,
    pub revision: u64,
    /// The document has been edited since this result was computed.
    pub stale: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub path: String,
    pub revision: u64,
}

fn utf8(body: &Bytes) -> Result<&str, ApiError> {
    std::str::from_utf8(body).map_err(|e| {
        let mut err = ApiError::new(StatusCode::BAD_REQUEST, "request body is not UTF-8");
        err.body.details.push(ErrorDetail {
            location: Some(format!("byte {}", e.valid_up_to())),
            message: e.to_string(),
        });
        err
    })
}

/// Parses and validates a document under its own validation mode.
fn accept(body: &Bytes) -> Result<(ScenarioDocument, Vec<String>), ApiError> {
    let document = parse_document::<f64>(utf8(body)?)?;
    let scenario = document.clone().into_scenario()?;
    let warnings = scenario.report.warnings().map(|w| w.to_string()).collect();
    Ok((document, warnings))
}

pub fn run_document(document: &ScenarioDocument) -> Result<GraphDocument, ApiError> {
    let scenario = document.clone().into_scenario()?;
    match retrospect(&scenario.problem, scenario.config) {
        Ok(result) => Ok(GraphDocument::from_result(&result)),
        Err(EngineError::Invalid(report)) => Err(ApiError::invalid(&report)),
        Err(EngineError::Semantics(e)) => Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            e.to_string(),
        )),
    }
}

async fn create_session(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let (document, warnings) = accept(&body)?;
    let id = Uuid::new_v4();
    let session = Session {
        document,
        revision: 0,
        last_result: None,
    };
    state
        .store
        .sessions
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((
        StatusCode::CREATED,
        Json(Created {
            id,
            revision: 0,
            warnings,
        }),
    ))
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<([(&'static str, String); 1], Json<ScenarioDocument>), ApiError> {
    let session = state.session(&id)?;
    let session = lock(&session);
    Ok((
        [("x-revision", session.revision.to_string())],
        Json(session.document.clone()),
    ))
}

async fn delete_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<StatusCode, ApiError> {
    let key = Uuid::parse_str(&id).map_err(|_| ApiError::not_found("session"))?;
    state
        .store
        .sessions
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .remove(&key)
        .map(|_| StatusCode::NO_CONTENT)
        .ok_or_else(|| ApiError::not_found("session"))
}

async fn update_ethics(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Revision>, ApiError> {
    let patch = parse_ethics::<f64>(utf8(&body)?)?;
    let session = state.session(&id)?;
    let mut session = lock(&session);
    if patch.is_empty() {
        return Ok(Json(Revision {
            revision: session.revision,
        }));
    }
    let mut edited = session.document.clone();
    edited.apply_ethics(&patch);
    edited.clone().into_scenario()?;
    session.document = edited;
    session.revision += 1;
    Ok(Json(Revision {
        revision: session.revision,
    }))
}

async fn replace_scenario(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Revision>, ApiError> {
    let session = state.session(&id)?;
    let (document, _) = accept(&body)?;
    let mut session = lock(&session);
    session.document = document;
    session.revision += 1;
    Ok(Json(Revision {
        revision: session.revision,
    }))
}

async fn run(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<RunResponse>, ApiError> {
    let session = state.session(&id)?;
    let mut session = lock(&session);
    let graph = run_document(&session.document)?;
    let revision = session.revision;
    session.last_result = Some(StoredResult {
        revision,
        graph: graph.clone(),
    });
    Ok(Json(RunResponse { graph, revision }))
}

async fn last_result(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<ResultResponse>, ApiError> {
    let session = state.session(&id)?;
    let session = lock(&session);
    let stored = session
        .last_result
        .as_ref()
        .ok_or_else(|| ApiError::not_found("result"))?;
    Ok(Json(ResultResponse {
        graph: stored.graph.clone(),
        revision: stored.revision,
        stale: stored.revision != session.revision,
    }))
}

async fn snapshot(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Snapshot>, ApiError> {
    let Some(dir) = state.store.config.snapshot_dir.clone() else {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "snapshots are disabled on this server",
        ));
    };
    let session = state.session(&id)?;
    let (text, revision) = {
        let session = lock(&session);
        (session.document.to_canonical_json(), session.revision)
    };
    let path = dir.join(format!("{id}-r{revision}.json"));
    tokio::fs::write(&path, text).await.map_err(|e| {
        ApiError::new(
            StatusCode::INSUFFICIENT_STORAGE,
            format!("cannot write snapshot: {e}"),
        )
    })?;
    Ok(Json(Snapshot {
        path: path.display().to_string(),
        revision,
    }))
}

async fn fallback() -> ApiError {
    ApiError::not_found("route")
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/ethics", put(update_ethics))
        .route("/sessions/{id}/scenario", put(replace_scenario))
        .route("/sessions/{id}/run", post(run))
        .route("/sessions/{id}/result", get(last_result))
        .route("/sessions/{id}/snapshot", post(snapshot))
        .fallback(fallback)
        .with_state(state)
}

pub async fn serve(listener: TcpListener, config: ServiceConfig) -> io::Result<()> {
    axum::serve(listener, router(AppState::new(config))).await
}
