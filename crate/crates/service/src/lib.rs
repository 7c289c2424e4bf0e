//! HTTP front end for the explorer.
//!
//! Routes (all JSON unless noted):
//!
//! | method | path                          | body                               |
//! |--------|-------------------------------|------------------------------------|
//! | GET    | `/api/meta`                   | graph stats, layout kinds, goal    |
//! | GET    | `/api/layout/{kind}`          | 8PLY buffer (octet-stream)         |
//! | GET    | `/api/state/{id}`             | cells, labelled neighbors, h       |
//! | POST   | `/api/session`                | session handle                     |
//! | GET    | `/api/session/{id}`           | session handle                     |
//! | POST   | `/api/session/{id}/step`      | next `count` trace events          |
//! | POST   | `/api/session/{id}/run`       | search result with full path       |
//! | DELETE | `/api/session/{id}`           | empty (204)                        |
//!
//! Anything else falls through to the static explorer assets, if configured.

mod error;
mod sessions;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::OnceCell;
use tower_http::services::ServeDir;

use atlas_core::format::{encode_layout, load_graph};
use atlas_core::layout::compute_layout;
use atlas_core::puzzle::successors;
use atlas_core::{
    compute_stats, manhattan, rank, unrank, GraphStats, LayoutKind, LayoutParams, MoveDir,
    PuzzleState, SearchAlgo, SearchResult, SearchSession, StateGraph, StateId, TraceEvent,
};

pub use error::ApiError;
pub use sessions::{SessionHandle, SessionStore};

pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(30 * 60);

type ApiResult<T> = Result<T, ApiError>;

struct Loaded {
    graph: Arc<StateGraph>,
    stats: GraphStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct LayoutKey {
    kind: LayoutKind,
    seed: u64,
    iterations: u32,
    root: Option<StateId>,
}

/// Shared service state. Cheap to clone.
#[derive(Clone)]
pub struct AppState {
    loaded: Arc<OnceLock<Loaded>>,
    layouts: Arc<Mutex<HashMap<LayoutKey, Arc<OnceCell<Bytes>>>>>,
    sessions: Arc<SessionStore>,
}

impl AppState {
    pub fn new(session_ttl: Duration) -> Self {
        AppState {
            loaded: Arc::new(OnceLock::new()),
            layouts: Arc::default(),
            sessions: Arc::new(SessionStore::new(session_ttl)),
        }
    }

    pub fn with_graph(graph: Arc<StateGraph>, session_ttl: Duration) -> Self {
        let state = AppState::new(session_ttl);
        state.install_graph(graph);
        state
    }

    /// Publishes the graph; requests before this point get 503.
    pub fn install_graph(&self, graph: Arc<StateGraph>) {
        let stats = compute_stats(&graph);
        let _ = self.loaded.set(Loaded { graph, stats });
    }

    pub fn sessions(&self) -> &SessionStore {
        &self.sessions
    }

    fn loaded(&self) -> ApiResult<&Loaded> {
        self.loaded.get().ok_or_else(ApiError::unavailable)
    }

    fn graph(&self) -> ApiResult<Arc<StateGraph>> {
        Ok(self.loaded()?.graph.clone())
    }
}

pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/meta", get(meta))
        .route("/api/layout/{kind}", get(layout))
        .route("/api/state/{id}", get(state_info))
        .route("/api/session", post(create_session))
        .route("/api/session/{id}", get(session_info).delete(delete_session))
        .route("/api/session/{id}/step", post(step_session))
        .route("/api/session/{id}/run", post(run_session))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub struct ServeConfig {
    pub graph_path: PathBuf,
    pub bind: SocketAddr,
    pub session_ttl: Duration,
    pub static_dir: Option<PathBuf>,
}

/// Binds, loads the graph in the background and serves until the process exits.
pub async fn serve(config: ServeConfig) -> std::io::Result<()> {
    let state = AppState::new(config.session_ttl);
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);

    let loader = state.clone();
    let path = config.graph_path.clone();
    tokio::task::spawn_blocking(move || match load_graph(&path) {
        Ok(g) => {
            loader.install_graph(Arc::new(g));
            eprintln!("graph loaded from {}", path.display());
        }
        Err(e) => {
            eprintln!("failed to load {}: {e}", path.display());
            std::process::exit(1);
        }
    });

    let sweeper = state.clone();
    let period = (config.session_ttl / 4).clamp(Duration::from_secs(1), Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            sweeper.sessions().expire_idle();
        }
    });

    axum::serve(listener, router(state, config.static_dir)).await
}

#[derive(Serialize)]
struct Meta<'a> {
    #[serde(flatten)]
    stats: &'a GraphStats,
    goal: String,
    goal_id: StateId,
    layouts: Vec<LayoutKind>,
    algorithms: Vec<SearchAlgo>,
}

async fn meta(State(app): State<AppState>) -> ApiResult<Json<serde_json::Value>> {
    let loaded = app.loaded()?;
    let goal = unrank(loaded.graph.goal_id())?;
    let meta = Meta {
        stats: &loaded.stats,
        goal: goal.to_string(),
        goal_id: loaded.graph.goal_id(),
        layouts: LayoutKind::ALL.to_vec(),
        algorithms: SearchAlgo::ALL.to_vec(),
    };
    Ok(Json(serde_json::to_value(meta).map_err(|e| ApiError::internal(e.to_string()))?))
}

/// A state given either as a dense id or as nine-digit cell text.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum StateRef {
    Id(u32),
    Text(String),
}

impl StateRef {
    fn resolve(&self, g: &StateGraph) -> Result<StateId, atlas_core::Error> {
        let id = match self {
            StateRef::Id(id) => StateId(*id),
            StateRef::Text(text) if text.len() == 9 => rank(&text.parse::<PuzzleState>()?)?,
            StateRef::Text(text) => StateId(
                text.parse()
                    .map_err(|_| atlas_core::Error::InvalidState(format!("{text:?} is neither an id nor a state")))?,
            ),
        };
        g.check_id(id)?;
        Ok(id)
    }
}

#[derive(Deserialize)]
struct LayoutQuery {
    seed: Option<u64>,
    root: Option<String>,
    iterations: Option<u32>,
}

async fn layout(
    State(app): State<AppState>,
    Path(kind): Path<String>,
    Query(q): Query<LayoutQuery>,
) -> ApiResult<Response> {
    let graph = app.graph()?;
    let kind: LayoutKind = kind.parse().map_err(|e: atlas_core::Error| ApiError::bad_request(e.to_string()))?;
    let defaults = LayoutParams::default();
    let root = match &q.root {
        Some(root) => Some(StateRef::Text(root.clone()).resolve(&graph)?),
        None => None,
    };
    let root = root.filter(|_| kind == LayoutKind::Depth);
    let key = LayoutKey {
        kind,
        seed: if kind == LayoutKind::Force { q.seed.unwrap_or(defaults.seed) } else { 0 },
        iterations: if kind == LayoutKind::Force { q.iterations.unwrap_or(defaults.iterations) } else { 0 },
        root,
    };
    let params = LayoutParams { seed: key.seed, iterations: key.iterations, root: key.root, ..defaults };

    let cell = app.layouts.lock().unwrap().entry(key).or_default().clone();
    let bytes = cell
        .get_or_try_init(|| async move {
            tokio::task::spawn_blocking(move || compute_layout(&graph, kind, &params).map(|l| Bytes::from(encode_layout(&l))))
                .await
                .map_err(|e| ApiError::internal(e.to_string()))?
                .map_err(ApiError::from)
        })
        .await?
        .clone();
    Ok(([(header::CONTENT_TYPE, "application/octet-stream")], bytes).into_response())
}

#[derive(Serialize)]
struct NeighborInfo {
    id: StateId,
    #[serde(rename = "move")]
    dir: MoveDir,
}

#[derive(Serialize)]
struct StateInfo {
    id: StateId,
    cells: String,
    neighbors: Vec<NeighborInfo>,
    h: u32,
}

async fn state_info(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<StateInfo>> {
    let graph = app.graph()?;
    let id = match StateRef::Text(id).resolve(&graph) {
        Ok(id) => id,
        Err(e @ atlas_core::Error::IdOutOfRange { .. }) => return Err(ApiError::not_found(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let state = unrank(id)?;
    let goal = unrank(graph.goal_id())?;
    let neighbors = successors(&state)
        .map(|(dir, next)| Ok(NeighborInfo { id: rank(&next)?, dir }))
        .collect::<Result<Vec<_>, atlas_core::Error>>()?;
    Ok(Json(StateInfo { id, cells: state.to_string(), neighbors, h: manhattan(&state, &goal) }))
}

#[derive(Deserialize)]
struct CreateSession {
    algo: SearchAlgo,
    start: StateRef,
    goal: Option<StateRef>,
}

async fn create_session(
    State(app): State<AppState>,
    Json(req): Json<CreateSession>,
) -> ApiResult<(StatusCode, Json<SessionHandle>)> {
    let graph = app.graph()?;
    let start = req.start.resolve(&graph)?;
    let goal = match &req.goal {
        Some(goal) => goal.resolve(&graph)?,
        None => graph.goal_id(),
    };
    let session = SearchSession::new(graph, req.algo, start, goal)?;
    let (id, entry) = app.sessions.insert(session);
    let handle = entry.lock().unwrap().handle(&id);
    Ok((StatusCode::CREATED, Json(handle)))
}

fn lookup(app: &AppState, id: &str) -> ApiResult<Arc<Mutex<sessions::Entry>>> {
    app.sessions.get(id).ok_or_else(|| ApiError::not_found(format!("no session {id}")))
}

async fn session_info(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionHandle>> {
    let entry = lookup(&app, &id)?;
    let handle = entry.lock().unwrap().handle(&id);
    Ok(Json(handle))
}

async fn delete_session(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    if app.sessions.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::not_found(format!("no session {id}")))
    }
}

#[derive(Deserialize)]
struct StepQuery {
    count: Option<u64>,
}

async fn step_session(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<StepQuery>,
) -> ApiResult<Json<Vec<TraceEvent>>> {
    let count = q.count.unwrap_or(1);
    if count == 0 {
        return Err(ApiError::bad_request("count must be at least 1"));
    }
    let entry = lookup(&app, &id)?;
    let events = tokio::task::spawn_blocking(move || {
        let mut entry = entry.lock().unwrap();
        let session = &mut entry.session;
        if !session.is_running() {
            return Err(atlas_core::Error::SessionTerminated);
        }
        let mut events = Vec::new();
        while events.len() < count as usize && session.is_running() {
            events.push(session.step()?);
        }
        Ok(events)
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(events))
}

async fn run_session(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SearchResult>> {
    let entry = lookup(&app, &id)?;
    let result = tokio::task::spawn_blocking(move || entry.lock().unwrap().session.run_to_completion())
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(result))
}
