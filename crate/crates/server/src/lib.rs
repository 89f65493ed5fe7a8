//! HTTP front end: many concurrent sessions over one shared knowledge base.
//!
//! ```text
//! POST   /api/sessions              {"home_city"?}  -> {"session_id"}
//! POST   /api/sessions/{id}/turns   {"text"}        -> {"answer", "trace"}
//! GET    /api/sessions/{id}                          -> {"transcript"}
//! DELETE /api/sessions/{id}
//! ```

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use coopq_core::api::{ApiError, CreateSession, SessionCreated, Transcript, TranscriptItem, TurnRequest, TurnResponse};
use coopq_core::kb::{load_kb, KbError, KnowledgeBase};
use coopq_core::parser::SessionDefaults;
use coopq_core::session::Session;
use coopq_core::trace::TraceDoc;
use tokio::net::TcpListener;
use tokio::sync::{Mutex, RwLock};

type SessionMap = HashMap<String, Arc<Mutex<Session>>>;

#[derive(Clone)]
pub struct AppState {
    kb: Arc<KnowledgeBase>,
    defaults: SessionDefaults,
    sessions: Arc<RwLock<SessionMap>>,
}

impl AppState {
    pub fn new(kb: Arc<KnowledgeBase>, defaults: SessionDefaults) -> Self {
        AppState {
            kb,
            defaults,
            sessions: Arc::default(),
        }
    }

    async fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }
}

enum ServiceError {
    NotFound(String),
    UnknownCity(String),
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let (status, error, message) = match self {
            ServiceError::NotFound(id) => (
                StatusCode::NOT_FOUND,
                "session_not_found",
                format!("no session with id {id:?}"),
            ),
            ServiceError::UnknownCity(city) => (
                StatusCode::BAD_REQUEST,
                "unknown_city",
                format!("unknown home city {city:?}"),
            ),
        };
        let body = ApiError {
            error: error.to_string(),
            message,
        };
        (status, Json(body)).into_response()
    }
}

async fn create_session(
    State(state): State<AppState>,
    body: Option<Json<CreateSession>>,
) -> Result<(StatusCode, Json<SessionCreated>), ServiceError> {
    let home_city = body.and_then(|Json(b)| b.home_city);
    let defaults = match home_city {
        Some(home_city) => SessionDefaults { home_city },
        None => state.defaults.clone(),
    };
    let session = Session::new(state.kb.clone(), defaults).map_err(|e| ServiceError::UnknownCity(e.0))?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    state
        .sessions
        .write()
        .await
        .insert(id.clone(), Arc::new(Mutex::new(session)));
    tracing::debug!(session = %id, "created");
    Ok((StatusCode::CREATED, Json(SessionCreated { session_id: id })))
}

async fn post_turn(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Json(request): Json<TurnRequest>,
) -> Result<Json<TurnResponse>, ServiceError> {
    let session = state.session(&id).await?;
    // the per-session lock keeps one turn in flight per session
    let mut session = session.lock().await;
    let (answer, trace) = session.run_turn(&request.text);
    Ok(Json(TurnResponse {
        answer,
        trace: TraceDoc::from(&trace),
    }))
}

async fn get_transcript(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<Transcript>, ServiceError> {
    let session = state.session(&id).await?;
    let session = session.lock().await;
    Ok(Json(Transcript {
        transcript: session.transcript().iter().map(TranscriptItem::from).collect(),
    }))
}

async fn delete_session(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<StatusCode, ServiceError> {
    match state.sessions.write().await.remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ServiceError::NotFound(id)),
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_transcript).delete(delete_session))
        .route("/api/sessions/{id}/turns", post(post_turn))
        .with_state(state)
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Kb { path: PathBuf, source: KbError },
    #[error("cannot bind port {port}: {source}")]
    Bind { port: u16, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn load_kb_file(path: &Path) -> Result<KnowledgeBase, ServeError> {
    let source = std::fs::read_to_string(path).map_err(|source| ServeError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    load_kb(&source).map_err(|source| ServeError::Kb {
        path: path.to_path_buf(),
        source,
    })
}

/// Serve on an already bound listener until `shutdown` resolves.
pub async fn serve_on(
    listener: TcpListener,
    state: AppState,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Load the KB, bind `0.0.0.0:port`, and serve until Ctrl-C.
pub async fn serve(kb_path: &Path, port: u16, defaults: SessionDefaults) -> Result<(), ServeError> {
    let kb = Arc::new(load_kb_file(kb_path)?);
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    let listener = TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { port, source })?;
    tracing::info!("listening on {}", listener.local_addr()?);
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    serve_on(listener, AppState::new(kb, defaults), shutdown).await?;
    Ok(())
}
