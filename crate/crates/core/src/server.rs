//! JSON-over-HTTP front end for [`crate::session`].
//!
//! Every request loads the session from disk, applies one transition and
//! writes it back before answering. Requests to a session that is already
//! being served get a `409 busy` instead of waiting.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::consistency::ConsistencyMethod;
use crate::dsl::GRAMMAR_VERSION;
use crate::session::{Next, Session, SessionDomainSpec, SessionError, SessionStore, StoreError};
use crate::trip::Route;

/// Environment variable naming the session directory.
pub const DATA_DIR_ENV: &str = "COACTIVE_DATA_DIR";

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            detail: Value::Null,
        }
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let msg = e.to_string();
        match e {
            SessionError::WrongStatus(s) => ApiError::new(StatusCode::CONFLICT, "conflict", msg)
                .with_detail(json!({ "status": s })),
            SessionError::Infeasible(problems) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "infeasible", msg)
                    .with_detail(json!({ "violations": problems }))
            }
            SessionError::Dsl(d) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_critique", msg)
                    .with_detail(json!(d))
            }
            SessionError::DuplicateCritique(name) => {
                ApiError::new(StatusCode::CONFLICT, "duplicate_critique", msg)
                    .with_detail(json!({ "feature": name }))
            }
            SessionError::TripData(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_domain", msg)
            }
            SessionError::Domain(_) => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", msg)
            }
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let msg = e.to_string();
        match e {
            StoreError::NotFound(id) => ApiError::new(StatusCode::NOT_FOUND, "not_found", msg)
                .with_detail(json!({ "id": id })),
            StoreError::InvalidId(id) => ApiError::new(StatusCode::NOT_FOUND, "not_found", msg)
                .with_detail(json!({ "id": id })),
            StoreError::Corrupt { id, reason } => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "corrupt_session", msg)
                    .with_detail(json!({ "id": id, "reason": reason }))
            }
            StoreError::Io { .. } => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "io", msg),
        }
    }
}

fn bad_body(e: JsonRejection) -> ApiError {
    ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text())
}

fn from_body<T: serde::de::DeserializeOwned>(body: Value) -> Result<T, ApiError> {
    serde_json::from_value(body).map_err(|e| {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid_body",
            e.to_string(),
        )
    })
}

#[derive(Clone)]
pub struct AppState {
    store: SessionStore,
    busy: Arc<Mutex<HashMap<String, ()>>>,
}

impl AppState {
    pub fn new(store: SessionStore) -> Self {
        AppState {
            store,
            busy: Arc::default(),
        }
    }
}

/// Marks a session busy for as long as it lives.
struct Claim {
    busy: Arc<Mutex<HashMap<String, ()>>>,
    id: String,
}

impl Drop for Claim {
    fn drop(&mut self) {
        self.busy.lock().unwrap().remove(&self.id);
    }
}

impl AppState {
    fn claim(&self, id: &str) -> Result<Claim, ApiError> {
        let mut busy = self.busy.lock().unwrap();
        if busy.insert(id.to_string(), ()).is_some() {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "busy",
                format!("session {id} is handling another request"),
            ));
        }
        Ok(Claim {
            busy: self.busy.clone(),
            id: id.to_string(),
        })
    }

    /// Runs `f` on the stored session with exclusive access, persisting
    /// the result when `f` succeeds.
    async fn with_session<T, F>(&self, id: String, write: bool, f: F) -> Result<T, ApiError>
    where
        T: Send + 'static,
        F: FnOnce(&mut Session) -> Result<T, ApiError> + Send + 'static,
    {
        let claim = self.claim(&id)?;
        let store = self.store.clone();
        let out = tokio::task::spawn_blocking(move || {
            let _claim = claim;
            let mut session = store.load(&id)?;
            let before = write.then(|| session.clone());
            let out = f(&mut session)?;
            if before.is_some_and(|b| b != session) {
                store.save(&session)?;
            }
            Ok(out)
        })
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
        out
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create).get(list))
        .route("/sessions/:id", get(summary))
        .route("/sessions/:id/suggestion", get(suggestion))
        .route("/sessions/:id/improvement", post(improvement))
        .route("/sessions/:id/critique", post(critique))
        .route("/sessions/:id/preview", post(preview))
        .route("/sessions/:id/trace", get(trace))
        .route("/grammar", get(grammar))
        .with_state(state)
}

/// Serves on `addr` until the process stops.
pub async fn serve(addr: SocketAddr, data_dir: PathBuf) -> anyhow::Result<()> {
    let store = SessionStore::open(data_dir)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(store))).await?;
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub domain: SessionDomainSpec,
    #[serde(default)]
    pub consistency: Option<ConsistencyMethod>,
}

async fn create(
    State(state): State<AppState>,
    body: Result<Json<Value>, JsonRejection>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let Json(body) = body.map_err(bad_body)?;
    // Either a bare domain spec or {domain, consistency}.
    let req = if body.get("domain").is_some() {
        from_body::<CreateRequest>(body)?
    } else {
        CreateRequest {
            domain: from_body(body)?,
            consistency: None,
        }
    };
    let store = state.store.clone();
    let session = tokio::task::spawn_blocking(move || -> Result<Session, ApiError> {
        let domain = req.domain.build()?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::new(id, domain, req.consistency.unwrap_or_default());
        store.save(&session)?;
        Ok(session)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "id": session.id, "status": session.status })),
    ))
}

async fn list(State(state): State<AppState>) -> Result<Json<Value>, ApiError> {
    Ok(Json(json!({ "sessions": state.store.list()? })))
}

fn describe(session: &Session) -> Value {
    let features: Vec<Value> = session
        .view_features()
        .into_iter()
        .map(|(i, f)| json!({ "index": i, "name": f.name() }))
        .collect();
    json!({
        "id": session.id,
        "status": session.status,
        "iteration": session.iteration,
        "horizon": session.domain.horizon(),
        "season": session.domain.season(),
        "cities": session.domain.cities(),
        "features": features,
        "weights": session.weights,
        "grammar_version": GRAMMAR_VERSION,
    })
}

async fn summary(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    state
        .with_session(id, false, |s| Ok(describe(s)))
        .await
        .map(Json)
}

async fn suggestion(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    state
        .with_session(id, true, |s| {
            let route = s.suggest()?;
            Ok(json!({
                "iteration": s.iteration,
                "route": route,
                "slots": s.domain.describe(&route),
                "utility": s.utility(&route)?,
                "status": s.status,
            }))
        })
        .await
        .map(Json)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImprovementRequest {
    pub route: Route,
}

async fn improvement(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<Value>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let Json(body) = body.map_err(bad_body)?;
    // Either a bare route or {route}.
    let req = if body.is_array() {
        ImprovementRequest {
            route: from_body(body)?,
        }
    } else {
        from_body::<ImprovementRequest>(body)?
    };
    state
        .with_session(id, true, move |s| {
            let next: Next = s.submit_improvement(req.route)?;
            Ok(json!({ "next": next, "status": s.status }))
        })
        .await
        .map(Json)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CritiqueRequest {
    pub expression: String,
}

async fn critique(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<CritiqueRequest>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let Json(req) = body.map_err(bad_body)?;
    state
        .with_session(id, true, move |s| {
            let index = s.submit_critique(&req.expression)?;
            Ok(json!({
                "next": Next::SuggestionReady,
                "status": s.status,
                "feature": { "index": index, "name": s.domain.features()[index].name() },
                "features": s.view.len(),
            }))
        })
        .await
        .map(Json)
}

async fn preview(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<CritiqueRequest>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let Json(req) = body.map_err(bad_body)?;
    state
        .with_session(id, false, move |s| Ok(json!(s.preview(&req.expression)?)))
        .await
        .map(Json)
}

async fn trace(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    state
        .with_session(id, false, |s| Ok(json!(s.trace())))
        .await
        .map(Json)
}

async fn grammar() -> Json<Value> {
    Json(json!({
        "version": GRAMMAR_VERSION,
        "ebnf": include_str!("../../../docs/critique-grammar.ebnf"),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concurrent_access_to_one_session_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let state = AppState::new(SessionStore::open(dir.path()).unwrap());
        let first = state.claim("a").unwrap();
        let err = state.claim("a").err().unwrap();
        assert_eq!((err.status, err.code), (StatusCode::CONFLICT, "busy"));
        let other = state.claim("b");
        assert!(other.is_ok());
        drop(first);
        assert!(state.claim("a").is_ok());
    }
}
