//! HTTP/JSON front end over an [`Explorer`].
//!
//! Graph and index are shared read-only by every handler. Each session is
//! a separately locked profile; rankings run on a clone taken under the lock,
//! so a slow ranking never holds up another request for the same session.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::explorer::{render_json, Explorer, Precision, RankRequest, DEFAULT_K};
use crate::graph::NodeId;
use crate::profile::SessionProfile;
use crate::ranking::RankMode;
use crate::weights::{BlendWeights, FeatureWeights};

pub const DEFAULT_SEARCH_LIMIT: usize = 20;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match &e {
            Error::UnknownNode(_) | Error::UnknownExternalId(_) => (StatusCode::NOT_FOUND, "not_found"),
            Error::ColdProfile { .. } => (StatusCode::CONFLICT, "cold_profile"),
            Error::InvalidWeights(_) => (StatusCode::BAD_REQUEST, "invalid_weights"),
            Error::UnknownFeature(_) | Error::InvalidArgument(_) | Error::Json(_) => {
                (StatusCode::BAD_REQUEST, "invalid_request")
            }
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: ErrorDetail {
                code: self.code,
                message: &self.message,
            },
        };
        let text = serde_json::to_string(&body).unwrap_or_default();
        (self.status, [(header::CONTENT_TYPE, "application/json")], text).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

pub struct AppState {
    explorer: Explorer,
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionProfile>>>>,
}

impl AppState {
    pub fn new(explorer: Explorer) -> Self {
        AppState {
            explorer,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    pub fn explorer(&self) -> &Explorer {
        &self.explorer
    }

    /// The session's profile, created on first use.
    fn session(&self, sid: &str) -> Arc<Mutex<SessionProfile>> {
        if let Some(s) = self.sessions.read().get(sid) {
            return s.clone();
        }
        self.sessions
            .write()
            .entry(sid.to_string())
            .or_insert_with(|| Arc::new(Mutex::new(self.explorer.new_session(sid))))
            .clone()
    }

    /// A copy of the session's profile, or a fresh one if it was never
    /// written to. Read paths never create sessions.
    fn snapshot(&self, sid: &str) -> SessionProfile {
        match self.sessions.read().get(sid) {
            Some(s) => s.lock().clone(),
            None => self.explorer.new_session(sid),
        }
    }
}

pub fn router(explorer: Explorer) -> Router {
    router_with_state(Arc::new(AppState::new(explorer)))
}

pub fn router_with_state(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/graph/summary", get(graph_summary))
        .route("/nodes/{id}", get(node))
        .route("/nodes/{id}/neighborhood-summary", get(neighborhood_summary))
        .route("/sessions/{sid}", get(session_summary))
        .route("/sessions/{sid}/rank", post(rank))
        .route("/sessions/{sid}/visits", post(visit))
        .route("/sessions/{sid}/weights", put(weights))
        .route("/search", get(search))
        .fallback(|| async { ApiError::not_found("no such route") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "method_not_allowed", "method not allowed")
        })
        .with_state(state)
}

/// Binds `addr` and serves until interrupted.
pub async fn serve(explorer: Explorer, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(explorer))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

type Params = Query<HashMap<String, String>>;

fn precision(params: &HashMap<String, String>) -> Result<Precision, ApiError> {
    match params.get("precision") {
        None => Ok(Precision::Rounded),
        Some(p) => p.parse().map_err(|e: Error| ApiError::bad_request(e.to_string())),
    }
}

fn json<T: Serialize>(body: &T, precision: Precision) -> ApiResult {
    let text = render_json(body, precision)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}

fn parse_body<'a, T: Deserialize<'a>>(body: &'a [u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

fn node_id(explorer: &Explorer, raw: &str) -> Result<NodeId, ApiError> {
    raw.parse::<u32>()
        .ok()
        .map(NodeId)
        .filter(|&n| explorer.graph().contains(n))
        .ok_or_else(|| ApiError::not_found(format!("unknown node {raw:?}")))
}

fn param<T: std::str::FromStr>(params: &HashMap<String, String>, key: &str) -> Result<Option<T>, ApiError> {
    params
        .get(key)
        .map(|v| v.parse().map_err(|_| ApiError::bad_request(format!("invalid {key} {v:?}"))))
        .transpose()
}

async fn graph_summary(State(state): State<Arc<AppState>>) -> ApiResult {
    json(&state.explorer.graph_summary(), Precision::Full)
}

async fn node(State(state): State<Arc<AppState>>, Path(id): Path<String>, Query(params): Params) -> ApiResult {
    let node = node_id(&state.explorer, &id)?;
    json(&state.explorer.node_view(node)?, precision(&params)?)
}

async fn neighborhood_summary(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(params): Params,
) -> ApiResult {
    let explorer = &state.explorer;
    let node = node_id(explorer, &id)?;
    let exclude = match params.get("exclude").filter(|s| !s.is_empty()) {
        None => Vec::new(),
        Some(list) => list
            .split(',')
            .map(|s| node_id(explorer, s.trim()))
            .collect::<Result<_, _>>()?,
    };
    let request = RankRequest {
        focus: node,
        k: param(&params, "k")?.unwrap_or(DEFAULT_K),
        mode: param::<RankMode>(&params, "mode")?.unwrap_or(RankMode::Combined),
        exclude,
    };
    let profile = match params.get("session") {
        Some(sid) => state.snapshot(sid),
        None => explorer.new_session(""),
    };
    json(&explorer.neighborhood_summary(&profile, &request)?, precision(&params)?)
}

async fn session_summary(State(state): State<Arc<AppState>>, Path(sid): Path<String>, Query(params): Params) -> ApiResult {
    let profile = state.snapshot(&sid);
    json(&profile.summary(state.explorer.index()), precision(&params)?)
}

async fn rank(
    State(state): State<Arc<AppState>>,
    Path(sid): Path<String>,
    Query(params): Params,
    body: Bytes,
) -> ApiResult {
    let request: RankRequest = parse_body(&body)?;
    let profile = state.snapshot(&sid);
    json(&state.explorer.rank_view(&profile, &request)?, precision(&params)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VisitBody {
    node: NodeId,
}

async fn visit(
    State(state): State<Arc<AppState>>,
    Path(sid): Path<String>,
    Query(params): Params,
    body: Bytes,
) -> ApiResult {
    let VisitBody { node } = parse_body(&body)?;
    state.explorer.graph().check(node)?;
    let session = state.session(&sid);
    let summary = {
        let mut profile = session.lock();
        state.explorer.record_visit(&mut profile, node)?;
        profile.summary(state.explorer.index())
    };
    json(&summary, precision(&params)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsBody {
    #[serde(default)]
    lambda: BTreeMap<String, f64>,
    w_s: Option<f64>,
    w_r: Option<f64>,
}

#[derive(Serialize)]
struct WeightsAck {
    session: String,
    updated: bool,
    lambda: BTreeMap<String, f64>,
    blend: BlendWeights,
}

async fn weights(State(state): State<Arc<AppState>>, Path(sid): Path<String>, body: Bytes) -> ApiResult {
    let body: WeightsBody = parse_body(&body)?;
    let schema = state.explorer.graph().schema();
    let session = state.session(&sid);
    let mut profile = session.lock();

    let mut lambda = profile.lambda().as_slice().to_vec();
    for (name, &w) in &body.lambda {
        let j = schema.index_of(name).ok_or_else(|| Error::UnknownFeature(name.clone()))?;
        lambda[j] = w;
    }
    let lambda = FeatureWeights::new(lambda)?;
    let blend = match (body.w_s, body.w_r) {
        (None, None) => profile.blend(),
        (Some(s), Some(r)) => BlendWeights::new(s, r)?,
        _ => return Err(ApiError::new(StatusCode::BAD_REQUEST, "invalid_weights", "w_s and w_r must be set together")),
    };
    // validated both before touching the profile so a bad request changes nothing
    profile.set_lambda(lambda)?;
    profile.set_blend(blend);

    let ack = WeightsAck {
        session: sid,
        updated: true,
        lambda: schema
            .names()
            .map(str::to_string)
            .zip(profile.lambda().as_slice().iter().copied())
            .collect(),
        blend,
    };
    json(&ack, Precision::Full)
}

async fn search(State(state): State<Arc<AppState>>, Query(params): Params) -> ApiResult {
    let q = params.get("q").map(String::as_str).unwrap_or("");
    let limit = param(&params, "limit")?.unwrap_or(DEFAULT_SEARCH_LIMIT);
    json(&state.explorer.search(q, limit), precision(&params)?)
}
