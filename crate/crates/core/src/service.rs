//! HTTP/JSON teaching service over a single knowledge-base profile.
//!
//! Reads share the session; every mutation takes the write lock, persists the
//! new knowledge base to disk, and only then swaps it in and answers. The
//! on-disk file therefore always matches what the service serves.

use std::future::Future;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::RwLock;
use tower_http::services::ServeDir;

use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, GridDims};
use crate::knowledge::{KnowledgeBase, Label};
use crate::recognition::{classify, Decision, DecisionKind, LabelScore, Quotient};
use crate::store;

#[derive(Debug)]
pub struct Session {
    kb_path: PathBuf,
    kb: KnowledgeBase,
    version: u64,
}

impl Session {
    /// Loads the profile at `kb_path`, or creates and persists an empty one
    /// with `grid` dims (32x32 when `None`) if the file does not exist.
    /// An existing profile whose dims differ from `grid` is refused.
    pub fn open(kb_path: impl Into<PathBuf>, grid: Option<GridDims>) -> Result<Self> {
        let kb_path = kb_path.into();
        let kb = open_or_create(&kb_path, grid)?;
        Ok(Session {
            kb_path,
            kb,
            version: 0,
        })
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    fn commit(&mut self, next: KnowledgeBase) -> Result<u64> {
        store::save_kb(&next, &self.kb_path)?;
        self.kb = next;
        self.version += 1;
        Ok(self.version)
    }
}

pub(crate) fn open_or_create(path: &Path, grid: Option<GridDims>) -> Result<KnowledgeBase> {
    if path.exists() {
        let kb = store::load_kb(path)?;
        if let Some(want) = grid {
            if want != kb.dims() {
                return Err(Error::DimsMismatch {
                    expected: kb.dims(),
                    found: want,
                });
            }
        }
        Ok(kb)
    } else {
        let kb = KnowledgeBase::new(grid.unwrap_or_default());
        store::save_kb(&kb, path)?;
        Ok(kb)
    }
}

pub type SharedSession = Arc<RwLock<Session>>;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScoreBody {
    pub label: String,
    pub psi: i64,
    pub mu: u64,
    pub q_num: i64,
    pub q_den: u64,
    pub q_display: String,
}

impl From<&LabelScore> for ScoreBody {
    fn from(s: &LabelScore) -> Self {
        ScoreBody {
            label: s.label.to_string(),
            psi: s.psi,
            mu: s.mu,
            q_num: s.q.numer(),
            q_den: s.q.denom(),
            q_display: s.q_display(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BestBody {
    pub label: String,
    pub q_num: i64,
    pub q_den: u64,
    pub q_display: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ThresholdBody {
    pub num: i64,
    pub den: u64,
}

/// Wire form of a [`Decision`], shared by the service and `classify --output json`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DecisionBody {
    pub kind: DecisionKind,
    pub best: Option<BestBody>,
    pub threshold: ThresholdBody,
    pub scores: Vec<ScoreBody>,
    pub unscorable: Vec<String>,
}

impl From<&Decision> for DecisionBody {
    fn from(d: &Decision) -> Self {
        DecisionBody {
            kind: d.kind,
            best: d.best().map(|b| BestBody {
                label: b.label.to_string(),
                q_num: b.q.numer(),
                q_den: b.q.denom(),
                q_display: b.q_display(),
            }),
            threshold: ThresholdBody {
                num: d.threshold.numer(),
                den: d.threshold.denom(),
            },
            scores: d.scores.iter().map(ScoreBody::from).collect(),
            unscorable: d.unscorable.iter().map(Label::to_string).collect(),
        }
    }
}

#[derive(Debug)]
enum ApiError {
    BadRequest(String),
    Unprocessable(String),
    NotFound(String),
    Internal,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::Unprocessable(m) => (StatusCode::UNPROCESSABLE_ENTITY, m),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
            ApiError::Internal => (StatusCode::INTERNAL_SERVER_ERROR, "internal error".into()),
        };
        (status, Json(json!({ "error": msg }))).into_response()
    }
}

fn internal(e: Error) -> ApiError {
    eprintln!("glyphforge: {e}");
    ApiError::Internal
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> std::result::Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(format!("malformed body: {e}")))
}

fn parse_rows(rows: &[String], dims: GridDims) -> std::result::Result<BinaryGrid, ApiError> {
    let grid = BinaryGrid::from_rows(rows).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    if grid.dims() != dims {
        return Err(ApiError::BadRequest(format!(
            "drawing is {}, knowledge base is {dims}",
            grid.dims()
        )));
    }
    Ok(grid)
}

async fn meta(State(s): State<SharedSession>) -> Json<Value> {
    let s = s.read().await;
    let dims = s.kb.dims();
    Json(json!({
        "dims": { "w": dims.width(), "h": dims.height() },
        "label_count": s.kb.len(),
        "version": s.version,
    }))
}

async fn labels(State(s): State<SharedSession>) -> Json<Value> {
    let s = s.read().await;
    let list: Vec<Value> =
        s.kb.entries()
            .map(|(l, w)| json!({ "label": l.as_str(), "teach_count": w.teach_count() }))
            .collect();
    Json(Value::Array(list))
}

#[derive(Deserialize)]
struct TeachRequest {
    label: String,
    rows: Vec<String>,
}

async fn teach(
    State(s): State<SharedSession>,
    body: Bytes,
) -> std::result::Result<Json<Value>, ApiError> {
    let req: TeachRequest = parse_body(&body)?;
    let mut s = s.write().await;
    let grid = parse_rows(&req.rows, s.kb.dims())?;
    let label = Label::new(req.label).map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    let mut next = s.kb.clone();
    let teach_count = match next.teach(&label, &grid) {
        Ok(w) => w.teach_count(),
        Err(e @ Error::TeachLimit(_)) => return Err(ApiError::Unprocessable(e.to_string())),
        Err(e) => return Err(ApiError::BadRequest(e.to_string())),
    };
    let version = s.commit(next).map_err(internal)?;
    Ok(Json(json!({
        "label": label.as_str(),
        "teach_count": teach_count,
        "version": version,
    })))
}

#[derive(Deserialize)]
struct ClassifyRequest {
    rows: Vec<String>,
    #[serde(default)]
    threshold: Option<Value>,
}

fn parse_threshold(v: Option<&Value>) -> std::result::Result<Quotient, ApiError> {
    let text = match v {
        None | Some(Value::Null) => return Ok(Quotient::HALF),
        Some(Value::Number(n)) => n.to_string(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => {
            return Err(ApiError::BadRequest(format!(
                "threshold {other} is not a number"
            )))
        }
    };
    Quotient::parse(&text).ok_or_else(|| ApiError::BadRequest(format!("bad threshold {text:?}")))
}

async fn classify_handler(
    State(s): State<SharedSession>,
    body: Bytes,
) -> std::result::Result<Json<Value>, ApiError> {
    let req: ClassifyRequest = parse_body(&body)?;
    let threshold = parse_threshold(req.threshold.as_ref())?;
    let s = s.read().await;
    let grid = parse_rows(&req.rows, s.kb.dims())?;
    let decision =
        classify(&s.kb, &grid, threshold).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let mut body = serde_json::to_value(DecisionBody::from(&decision)).expect("serializable");
    body["version"] = json!(s.version);
    Ok(Json(body))
}

fn lookup_label(raw: String) -> std::result::Result<Label, ApiError> {
    Label::new(raw.clone()).map_err(|_| ApiError::NotFound(format!("unknown label {raw:?}")))
}

async fn weights(
    State(s): State<SharedSession>,
    UrlPath(raw): UrlPath<String>,
) -> std::result::Result<Json<Value>, ApiError> {
    let label = lookup_label(raw)?;
    let s = s.read().await;
    let w =
        s.kb.weights(&label)
            .map_err(|e| ApiError::NotFound(e.to_string()))?;
    let rows: Vec<&[i32]> = w.rows().collect();
    Ok(Json(
        json!({ "teach_count": w.teach_count(), "rows": rows }),
    ))
}

async fn forget(
    State(s): State<SharedSession>,
    UrlPath(raw): UrlPath<String>,
) -> std::result::Result<Json<Value>, ApiError> {
    let label = lookup_label(raw)?;
    let mut s = s.write().await;
    let mut next = s.kb.clone();
    next.forget(&label)
        .map_err(|e| ApiError::NotFound(e.to_string()))?;
    let version = s.commit(next).map_err(internal)?;
    Ok(Json(json!({ "version": version })))
}

/// API routes, plus static teach-pad assets from `static_dir` when given.
pub fn router(session: SharedSession, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/meta", get(meta))
        .route("/api/labels", get(labels))
        .route("/api/labels/{label}", delete(forget))
        .route("/api/teach", post(teach))
        .route("/api/classify", post(classify_handler))
        .route("/api/weights/{label}", get(weights))
        .with_state(session);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Binds `addr` and serves until `shutdown` resolves.
pub async fn serve(
    session: Session,
    addr: SocketAddr,
    static_dir: Option<PathBuf>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    serve_on(listener, session, static_dir, shutdown).await
}

pub async fn serve_on(
    listener: tokio::net::TcpListener,
    session: Session,
    static_dir: Option<PathBuf>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let app = router(Arc::new(RwLock::new(session)), static_dir.as_deref());
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
}
