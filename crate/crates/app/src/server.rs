//! JSON-over-HTTP service for game sessions and simulation jobs.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use monty_core::noise::{semiclassical_noise_curve, NoiseCurvePoint};
use monty_core::stats::{
    noise_sweep, random_expectation, strategy_expectation, surface_scan, ExpectationPair, Method,
    StrategyExpectation, SurfaceGrid, SweepPoint, SweepQuantity, DEFAULT_NODES,
};
use monty_core::{Action, Error as CoreError, GameModel, GameSession, PublicSessionView};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::{Mutex, RwLock, Semaphore};

type SessionHandle = Arc<Mutex<GameSession>>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "not-found",
            format!("no {what} with id {id}"),
        )
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::IllegalPhaseTransition { .. } => {
                return Self::new(
                    StatusCode::CONFLICT,
                    "illegal-phase-transition",
                    e.to_string(),
                )
            }
            CoreError::InvalidAngle { .. } => "invalid-angle",
            CoreError::InvalidDoorRegion { .. } => "invalid-door-region",
            CoreError::DegenerateDoorOpening { .. } => "degenerate-door-opening",
            CoreError::InvalidWeights { .. } => "invalid-weights",
            CoreError::InvalidBoxCount { .. } => "invalid-box-count",
            CoreError::InvalidParameter(_) => "invalid-parameter",
        };
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(json!({ "error": self.code, "message": self.message })),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    let text: &[u8] = if body.is_empty() { b"{}" } else { body };
    serde_json::from_slice(text).map_err(|e| {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid-request",
            e.to_string(),
        )
    })
}

/// Computation requested through `POST /simulations`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SimulationRequest {
    RandomExpectation {
        #[serde(default)]
        entangled: bool,
        #[serde(default)]
        noise_p: f64,
        #[serde(default)]
        method: Method,
    },
    StrategyExpectation {
        phi1: f64,
        phi2: f64,
        #[serde(default)]
        entangled: bool,
        #[serde(default)]
        noise_p: f64,
        #[serde(default)]
        method: Method,
    },
    StrategySurface {
        step: f64,
        #[serde(default)]
        entangled: bool,
        #[serde(default)]
        noise_p: f64,
        #[serde(default = "default_nodes")]
        nodes: usize,
    },
    NoiseSweep {
        quantity: SweepQuantity,
        p_grid: Vec<f64>,
        #[serde(default)]
        entangled: bool,
    },
    Semiclassical {
        p_grid: Vec<f64>,
        #[serde(default = "default_door")]
        door: usize,
    },
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

fn default_door() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum SimulationResult {
    RandomExpectation(ExpectationPair),
    StrategyExpectation(StrategyExpectation),
    StrategySurface(SurfaceGrid),
    NoiseSweep(Vec<SweepPoint>),
    Semiclassical(Vec<NoiseCurvePoint>),
}

impl SimulationRequest {
    /// Cheap checks run before a job is queued.
    fn validate(&self) -> monty_core::Result<()> {
        match self {
            SimulationRequest::RandomExpectation {
                noise_p, method, ..
            } => {
                GameModel::with_noise(false, *noise_p)?;
                method.validate()
            }
            SimulationRequest::StrategyExpectation {
                phi1,
                phi2,
                noise_p,
                method,
                ..
            } => {
                monty_core::DoorAngles::new(*phi1, *phi2)?;
                GameModel::with_noise(false, *noise_p)?;
                method.validate()
            }
            SimulationRequest::StrategySurface { noise_p, nodes, .. } => {
                GameModel::with_noise(false, *noise_p)?;
                Method::Quadrature { nodes: *nodes }.validate()
            }
            SimulationRequest::NoiseSweep { p_grid, .. }
            | SimulationRequest::Semiclassical { p_grid, .. } => p_grid
                .iter()
                .try_for_each(|&p| GameModel::with_noise(false, p).map(drop)),
        }
    }

    pub fn run(&self) -> monty_core::Result<SimulationResult> {
        Ok(match self {
            SimulationRequest::RandomExpectation {
                entangled,
                noise_p,
                method,
            } => SimulationResult::RandomExpectation(random_expectation(
                &GameModel::with_noise(*entangled, *noise_p)?,
                method,
            )?),
            SimulationRequest::StrategyExpectation {
                phi1,
                phi2,
                entangled,
                noise_p,
                method,
            } => SimulationResult::StrategyExpectation(strategy_expectation(
                *phi1,
                *phi2,
                &GameModel::with_noise(*entangled, *noise_p)?,
                method,
            )?),
            SimulationRequest::StrategySurface {
                step,
                entangled,
                noise_p,
                nodes,
            } => SimulationResult::StrategySurface(surface_scan(
                *step,
                &GameModel::with_noise(*entangled, *noise_p)?,
                *nodes,
            )?),
            SimulationRequest::NoiseSweep {
                quantity,
                p_grid,
                entangled,
            } => SimulationResult::NoiseSweep(noise_sweep(quantity, p_grid, *entangled)?),
            SimulationRequest::Semiclassical { p_grid, door } => {
                SimulationResult::Semiclassical(semiclassical_noise_curve(p_grid, *door)?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Pending,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationJob {
    pub id: String,
    pub status: JobStatus,
    pub request: SimulationRequest,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<SimulationResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Saved on shutdown and restored on start.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct Snapshot {
    pub sessions: Vec<GameSession>,
}

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, SessionHandle>>>,
    jobs: Arc<RwLock<HashMap<String, SimulationJob>>>,
    workers: Arc<Semaphore>,
}

impl AppState {
    pub fn new(workers: usize) -> Self {
        Self {
            sessions: Arc::default(),
            jobs: Arc::default(),
            workers: Arc::new(Semaphore::new(workers.max(1))),
        }
    }

    pub async fn restore(&self, snapshot: Snapshot) {
        let mut sessions = self.sessions.write().await;
        for s in snapshot.sessions {
            sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
        }
    }

    pub async fn snapshot(&self) -> Snapshot {
        let handles: Vec<SessionHandle> = self.sessions.read().await.values().cloned().collect();
        let mut sessions = Vec::with_capacity(handles.len());
        for h in handles {
            sessions.push(h.lock().await.clone());
        }
        sessions.sort_by(|a, b| a.id.cmp(&b.id));
        Snapshot { sessions }
    }

    async fn session(&self, id: &str) -> ApiResult<SessionHandle> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("session", id))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/actions", post(session_action))
        .route("/sessions/{id}/score", get(get_score))
        .route("/simulations", post(create_simulation))
        .route("/simulations/{id}", get(get_simulation))
        .with_state(state)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    #[serde(default)]
    entangled: bool,
    #[serde(default)]
    noise_p: f64,
    seed: Option<u64>,
}

async fn create_session(
    State(state): State<AppState>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<PublicSessionView>)> {
    let req: CreateSession = parse_body(&body)?;
    let id = uuid::Uuid::new_v4().to_string();
    let session = GameSession::new(
        id.clone(),
        req.entangled,
        req.noise_p,
        req.seed.unwrap_or_else(rand::random),
    )?;
    let view = session.public_view();
    state
        .sessions
        .write()
        .await
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<PublicSessionView>> {
    let handle = state.session(&id).await?;
    let view = handle.lock().await.public_view();
    Ok(Json(view))
}

async fn session_action(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<PublicSessionView>> {
    let action: Action = parse_body(&body)?;
    let handle = state.session(&id).await?;
    let mut session = handle.lock().await;
    session.advance(action)?;
    Ok(Json(session.public_view()))
}

async fn get_score(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<serde_json::Value>> {
    let handle = state.session(&id).await?;
    let score = handle.lock().await.score();
    Ok(Json(json!({
        "id": id,
        "stay": score.stay,
        "switch": score.switch,
        "stay_frequency": score.stay.frequency(),
        "switch_frequency": score.switch.frequency(),
    })))
}

async fn set_job(state: &AppState, id: &str, update: impl FnOnce(&mut SimulationJob)) {
    if let Some(job) = state.jobs.write().await.get_mut(id) {
        update(job);
    }
}

async fn create_simulation(
    State(state): State<AppState>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<SimulationJob>)> {
    let request: SimulationRequest = parse_body(&body)?;
    request.validate()?;
    let id = uuid::Uuid::new_v4().to_string();
    let job = SimulationJob {
        id: id.clone(),
        status: JobStatus::Pending,
        request: request.clone(),
        result: None,
        error: None,
    };
    state.jobs.write().await.insert(id.clone(), job.clone());
    tokio::spawn(async move {
        let _permit = state
            .workers
            .clone()
            .acquire_owned()
            .await
            .expect("worker pool is never closed");
        set_job(&state, &id, |j| j.status = JobStatus::Running).await;
        let outcome = tokio::task::spawn_blocking(move || request.run()).await;
        set_job(&state, &id, |j| match outcome {
            Ok(Ok(result)) => {
                j.status = JobStatus::Done;
                j.result = Some(result);
            }
            Ok(Err(e)) => {
                j.status = JobStatus::Failed;
                j.error = Some(e.to_string());
            }
            Err(e) => {
                j.status = JobStatus::Failed;
                j.error = Some(format!("worker crashed: {e}"));
            }
        })
        .await;
    });
    Ok((StatusCode::ACCEPTED, Json(job)))
}

async fn get_simulation(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<SimulationJob>> {
    state
        .jobs
        .read()
        .await
        .get(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::not_found("simulation", &id))
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub host: String,
    pub port: u16,
    pub workers: usize,
    pub snapshot: Option<PathBuf>,
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}

/// Runs the service until interrupted, then writes the snapshot if one is
/// configured.
pub async fn serve(config: ServeConfig) -> crate::error::AppResult<()> {
    let state = AppState::new(config.workers);
    if let Some(path) = config.snapshot.as_ref().filter(|p| p.exists()) {
        let snapshot: Snapshot = crate::io::read_json(std::fs::File::open(path)?)?;
        eprintln!(
            "restored {} sessions from {}",
            snapshot.sessions.len(),
            path.display()
        );
        state.restore(snapshot).await;
    }
    let listener = tokio::net::TcpListener::bind((config.host.as_str(), config.port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(shutdown_signal())
        .await?;
    if let Some(path) = &config.snapshot {
        let snapshot = state.snapshot().await;
        crate::io::write_json(&snapshot, std::fs::File::create(path)?)?;
        eprintln!(
            "saved {} sessions to {}",
            snapshot.sessions.len(),
            path.display()
        );
    }
    Ok(())
}
