//! HTTP API over the session engine.
//!
//! | Method | Path                 | Body                      |
//! |--------|----------------------|---------------------------|
//! | GET    | `/variants`          |                           |
//! | POST   | `/games`             | `{n, d, mode, seed?}`     |
//! | GET    | `/games/{id}`        |                           |
//! | POST   | `/games/{id}/moves`  | `{number, player?}`       |
//! | GET    | `/games/{id}/events` |                           |
//!
//! Errors come back as `{"code": ..., "message": ...}`. Response shapes are
//! described by `schema/api.schema.json` at the repository root.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use zahlenschlacht::game::{GameConfig, Player};
use zahlenschlacht::registry::{registry, RULE};
use zahlenschlacht::session::{Event, Mode, SessionError, SessionStore, SessionView};

pub const PORT_ENV: &str = "ZAHL_PORT";
pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(skip)]
    pub status: u16,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
            status: status.as_u16(),
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let message = e.to_string();
        let (status, code) = match e {
            SessionError::InvalidConfig { .. } => (StatusCode::BAD_REQUEST, "invalid_config"),
            SessionError::UnknownVariant { .. } => (StatusCode::BAD_REQUEST, "unknown_variant"),
            SessionError::IllegalMove { .. } => (StatusCode::BAD_REQUEST, "illegal_move"),
            SessionError::NotYourTurn { .. } => (StatusCode::CONFLICT, "not_your_turn"),
            SessionError::SessionFinished => (StatusCode::CONFLICT, "session_finished"),
            SessionError::SessionNotFound(_) => (StatusCode::NOT_FOUND, "session_not_found"),
            SessionError::Log(_) | SessionError::CorruptLog { .. } => {
                log::error!("{message}");
                (StatusCode::INTERNAL_SERVER_ERROR, "internal_error")
            }
        };
        Self::new(status, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HotSeatRule {
    pub min_n: u32,
    pub min_d: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariantsResponse {
    pub rule: String,
    pub count: usize,
    pub vs_bot: Vec<GameConfig>,
    pub hot_seat: HotSeatRule,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateGame {
    pub n: u32,
    pub d: u32,
    pub mode: Mode,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmitMove {
    pub number: u32,
    pub player: Option<Player>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoveResponse {
    pub events: Vec<Event>,
    pub view: SessionView,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventsResponse {
    pub id: String,
    pub events: Vec<Event>,
}

type AppState = Arc<SessionStore>;

pub fn router(store: AppState) -> Router {
    Router::new()
        .route("/variants", get(variants))
        .route("/games", post(create_game))
        .route("/games/{id}", get(game_view))
        .route("/games/{id}/moves", post(submit_move))
        .route("/games/{id}/events", get(game_events))
        .with_state(store)
}

/// Serves the API on `listener` until the process ends.
pub async fn serve(listener: TcpListener, store: AppState) -> std::io::Result<()> {
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(store)).await
}

async fn variants() -> Json<VariantsResponse> {
    let r = registry();
    Json(VariantsResponse {
        rule: RULE.to_string(),
        count: r.count,
        vs_bot: r.variants.clone(),
        hot_seat: HotSeatRule { min_n: 4, min_d: 2 },
    })
}

async fn create_game(
    State(store): State<AppState>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let Json(req) =
        body.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_config", e.body_text()))?;
    let view = store.create(req.n, req.d, req.mode, req.seed)?;
    log::info!("created {} Z({}, {}) {:?}", view.id, req.n, req.d, req.mode);
    Ok((StatusCode::CREATED, Json(view)))
}

async fn game_view(
    State(store): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(store.view(&id)?))
}

async fn submit_move(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<SubmitMove>, JsonRejection>,
) -> Result<Json<MoveResponse>, ApiError> {
    let Json(req) =
        body.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "illegal_move", e.body_text()))?;
    let (events, view) = store.submit_move(&id, req.number, req.player)?;
    Ok(Json(MoveResponse { events, view }))
}

async fn game_events(
    State(store): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<EventsResponse>, ApiError> {
    let events = store.events(&id)?;
    Ok(Json(EventsResponse { id, events }))
}
