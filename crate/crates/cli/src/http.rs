//! Session-scoped JSON API used by the web planner.
//!
//! Every session holds one network behind its own lock: mutations take the
//! write lock briefly, reads clone an `Arc` snapshot, and expensive work
//! (complexes, coverage estimates) runs on the blocking pool against that
//! snapshot so other sessions are never held up.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post, put};
use axum::{Json, Router};
use covertop_core::interface::{
    complex_json, default_network, load_csv, load_json, parse_document, save_json, CsvOptions,
    FormatError, ParamsUpdate, SessionState, SessionStore, SharedSession,
};
use covertop_core::probability::DEFAULT_SAMPLES;
use covertop_core::{
    build_probabilistic_complex, estimate_global_coverage, generate_random, union_point_coverage,
    ComplexKind, Domain, Edit, NetworkConfig, NetworkError, NodeId, Point2, TopologyError,
};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

#[derive(Clone)]
struct AppState {
    store: Arc<SessionStore>,
    seed: u64,
}

/// The API routes over `store`. New sessions start from the default random
/// network drawn with `seed`.
pub fn router(store: Arc<SessionStore>, seed: u64) -> Router {
    Router::new()
        .route("/api/session", post(create_session))
        .route("/api/session/{id}/network", get(get_network).put(put_network))
        .route("/api/session/{id}/network/random", post(random_network))
        .route("/api/session/{id}/network/csv", post(csv_network))
        .route("/api/session/{id}/nodes", post(add_node))
        .route("/api/session/{id}/nodes/{nid}", patch(move_node).delete(delete_node))
        .route("/api/session/{id}/params", put(put_params))
        .route("/api/session/{id}/complex", get(get_complex))
        .route("/api/session/{id}/coverage", get(get_coverage))
        .route("/api/session/{id}/point", get(get_point))
        .with_state(AppState { store, seed })
}

/// [`router`] plus static files from `static_dir` for every other path.
pub fn app(store: Arc<SessionStore>, seed: u64, static_dir: Option<&Path>) -> Router {
    let api = router(store, seed);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    error: String,
    field: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        ApiError { status, error: error.into(), field: None }
    }

    fn bad_field(field: &str, error: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, error: error.into(), field: Some(field.into()) }
    }

    fn internal(error: impl std::fmt::Display) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, error.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: self.error, field: self.field })).into_response()
    }
}

impl From<NetworkError> for ApiError {
    fn from(e: NetworkError) -> Self {
        let status = if e.is_config_error() { StatusCode::UNPROCESSABLE_ENTITY } else { StatusCode::NOT_FOUND };
        ApiError::new(status, e.to_string())
    }
}

impl From<FormatError> for ApiError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Network(e) => e.into(),
            FormatError::Schema { field, message } => ApiError::bad_field(&field, message),
            other => ApiError::new(StatusCode::BAD_REQUEST, other.to_string()),
        }
    }
}

impl From<TopologyError> for ApiError {
    fn from(e: TopologyError) -> Self {
        match e {
            TopologyError::InvalidResolution { .. } => ApiError::bad_field("resolution", e.to_string()),
            TopologyError::InvalidSampleCount => ApiError::bad_field("samples", e.to_string()),
            TopologyError::Network(e) => e.into(),
            other => ApiError::internal(other),
        }
    }
}

type ApiResult = Result<Response, ApiError>;

fn json_text(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn network_response(config: &NetworkConfig) -> Response {
    json_text(StatusCode::OK, save_json(config))
}

fn session(state: &AppState, id: &str) -> Result<SharedSession, ApiError> {
    state
        .store
        .get(id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session `{id}`")))
}

fn node_id(raw: &str) -> Result<NodeId, ApiError> {
    raw.parse()
        .map(NodeId)
        .map_err(|_| ApiError::new(StatusCode::NOT_FOUND, format!("unknown node `{raw}`")))
}

fn body_json<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let text = std::str::from_utf8(body).map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "body is not UTF-8"))?;
    Ok(parse_document(text)?)
}

fn query_param<T: FromStr>(query: &HashMap<String, String>, name: &str) -> Result<Option<T>, ApiError> {
    query
        .get(name)
        .map(|raw| raw.parse().map_err(|_| ApiError::bad_field(name, format!("invalid value `{raw}` for `{name}`"))))
        .transpose()
}

/// Applies `edit` under the session's write lock and returns the new network.
fn mutate(
    state: &AppState,
    id: &str,
    edit: impl FnOnce(&mut SessionState) -> Result<(), NetworkError>,
) -> ApiResult {
    let shared = session(state, id)?;
    let mut guard = shared.write().expect("session lock poisoned");
    edit(&mut guard)?;
    Ok(network_response(guard.config()))
}

fn snapshot(shared: &SharedSession) -> (Arc<NetworkConfig>, u64) {
    let guard = shared.read().expect("session lock poisoned");
    (guard.config().clone(), guard.version())
}

#[derive(Serialize)]
struct Created {
    id: String,
}

async fn create_session(State(state): State<AppState>) -> ApiResult {
    let id = uuid::Uuid::new_v4().to_string();
    state.store.insert(SessionState::new(id.clone(), default_network(state.seed)));
    Ok((StatusCode::CREATED, Json(Created { id })).into_response())
}

async fn get_network(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let (config, _) = snapshot(&session(&state, &id)?);
    Ok(network_response(&config))
}

async fn put_network(State(state): State<AppState>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult {
    let shared = session(&state, &id)?;
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "body is not UTF-8"))?;
    let config = load_json(text)?;
    shared.write().expect("session lock poisoned").replace(config.clone());
    Ok(network_response(&config))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomBody {
    n: Option<usize>,
    k: Option<usize>,
    rc: Option<f64>,
    eps: Option<f64>,
    seed: Option<u64>,
    width: Option<f64>,
    height: Option<f64>,
}

/// Missing fields keep the session's current settings; `n` keeps the node
/// count and the domain keeps its size.
async fn random_network(State(state): State<AppState>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult {
    let req: RandomBody = body_json(&body)?;
    let shared = session(&state, &id)?;
    let (current, _) = snapshot(&shared);
    let d = current.domain();
    let domain = Domain::new(d.x, d.y, req.width.unwrap_or(d.width), req.height.unwrap_or(d.height))?;
    let config = generate_random(
        req.n.unwrap_or(current.len()),
        req.k.unwrap_or(current.k()),
        req.rc.unwrap_or(current.rc()),
        req.eps.unwrap_or(current.eps()),
        domain,
        req.seed.unwrap_or(current.seed()),
    )?;
    shared.write().expect("session lock poisoned").replace(config.clone());
    Ok(network_response(&config))
}

#[derive(Serialize)]
struct CsvResult {
    nodes: usize,
    warnings: Vec<String>,
}

/// CSV anchors in the body; `k`, `eps` and `seed` query parameters default
/// to the session's current values.
async fn csv_network(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<HashMap<String, String>>,
    body: Bytes,
) -> ApiResult {
    let shared = session(&state, &id)?;
    let (current, _) = snapshot(&shared);
    let options = CsvOptions {
        k: query_param(&query, "k")?.unwrap_or(current.k()),
        eps: query_param(&query, "eps")?.unwrap_or(current.eps()),
        seed: query_param(&query, "seed")?.unwrap_or(current.seed()),
        rc: query_param(&query, "rc")?,
    };
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "body is not UTF-8"))?;
    let load = load_csv(text, &options)?;
    let nodes = load.config.len();
    shared.write().expect("session lock poisoned").replace(load.config);
    Ok(Json(CsvResult { nodes, warnings: load.warnings }).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveBody {
    dx: f64,
    dy: f64,
}

async fn move_node(
    State(state): State<AppState>,
    UrlPath((id, nid)): UrlPath<(String, String)>,
    body: Bytes,
) -> ApiResult {
    let req: MoveBody = body_json(&body)?;
    let nid = node_id(&nid)?;
    mutate(&state, &id, |s| s.apply(&Edit::Move { id: nid, dx: req.dx, dy: req.dy }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AddBody {
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct Added {
    id: NodeId,
}

async fn add_node(State(state): State<AppState>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult {
    let req: AddBody = body_json(&body)?;
    let anchor = Point2::try_new(req.x, req.y).map_err(|e| ApiError::bad_field("x", e.to_string()))?;
    let shared = session(&state, &id)?;
    let mut guard = shared.write().expect("session lock poisoned");
    let new_id = guard.config().next_id();
    guard.apply(&Edit::Add { anchor })?;
    Ok((StatusCode::CREATED, Json(Added { id: new_id })).into_response())
}

async fn delete_node(State(state): State<AppState>, UrlPath((id, nid)): UrlPath<(String, String)>) -> ApiResult {
    let nid = node_id(&nid)?;
    mutate(&state, &id, |s| s.apply(&Edit::Delete { id: nid }))?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsBody {
    rc: Option<f64>,
    eps: Option<f64>,
    k: Option<usize>,
    seed: Option<u64>,
}

async fn put_params(State(state): State<AppState>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult {
    let req: ParamsBody = body_json(&body)?;
    let update = ParamsUpdate { rc: req.rc, eps: req.eps, k: req.k, seed: req.seed };
    mutate(&state, &id, |s| s.apply_params(&update))
}

async fn get_complex(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult {
    let kind: ComplexKind = query_param(&query, "kind")?.unwrap_or(ComplexKind::Rips);
    let shared = session(&state, &id)?;
    let (config, version, cached) = {
        let guard = shared.read().expect("session lock poisoned");
        (guard.config().clone(), guard.version(), guard.cached(kind))
    };
    let complex = match cached {
        Some(c) => c,
        None => {
            let cfg = config.clone();
            let built = tokio::task::spawn_blocking(move || build_probabilistic_complex(&cfg, kind))
                .await
                .map_err(ApiError::internal)?;
            let built = Arc::new(built);
            // Dropped silently if the network changed while computing.
            shared.write().expect("session lock poisoned").store(kind, version, built.clone());
            built
        }
    };
    Ok(json_text(StatusCode::OK, complex_json(&config, &complex)))
}

async fn get_coverage(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult {
    let samples = query_param(&query, "samples")?.unwrap_or(DEFAULT_SAMPLES);
    let resolution: Option<f64> = query_param(&query, "resolution")?;
    let seed = query_param(&query, "seed")?.unwrap_or(0);
    let (config, _) = snapshot(&session(&state, &id)?);
    let resolution = resolution.unwrap_or(config.rc() / 4.0);
    let estimate = tokio::task::spawn_blocking(move || estimate_global_coverage(&config, samples, resolution, seed))
        .await
        .map_err(ApiError::internal)??;
    Ok(json_text(StatusCode::OK, serde_json::to_string_pretty(&estimate).expect("estimates serialize")))
}

#[derive(Serialize)]
struct PointCoverage {
    x: f64,
    y: f64,
    value: f64,
}

async fn get_point(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult {
    let require = |name: &str| -> Result<f64, ApiError> {
        query_param::<f64>(&query, name)?
            .filter(|v| v.is_finite())
            .ok_or_else(|| ApiError::bad_field(name, format!("query parameter `{name}` is required")))
    };
    let (x, y) = (require("x")?, require("y")?);
    let (config, _) = snapshot(&session(&state, &id)?);
    let value = union_point_coverage(&config, Point2::new(x, y));
    Ok(Json(PointCoverage { x, y, value }).into_response())
}
