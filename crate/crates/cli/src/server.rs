//! HTTP service. Handlers are stateless; the only shared state is the
//! immutable model loaded at startup.

use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use ahp_core::evaluate::{evaluate, VERSION};
use ahp_core::pcm::PcmDocument;
use ahp_core::registry::{LogicalGenerator, PcmGenerator, RandomGenerator};
use ahp_core::simulate::row_rng;
use ahp_core::{Category, Error, LogitModel};
use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, Method, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::cors::{Any, CorsLayer};

const INDEX_HTML: &str = include_str!("../assets/index.html");

#[derive(Clone)]
pub struct AppState {
    model: Arc<LogitModel>,
}

pub fn router(model: LogitModel) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/", get(index))
        .route("/healthz", get(healthz))
        .route("/api/model", get(model_info))
        .route("/api/evaluate", post(evaluate_handler))
        .route("/api/simulate", post(simulate_handler))
        .layer(cors)
        .with_state(AppState { model: Arc::new(model) })
}

pub async fn serve(addr: &str, model: LogitModel) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(model))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

pub struct ApiError {
    status: StatusCode,
    error: &'static str,
    detail: String,
}

impl ApiError {
    fn bad_request(detail: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            error: "invalid_request",
            detail: detail.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e.category() {
            Category::UnsupportedOrder => ApiError {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                error: "unsupported_order",
                detail: e.to_string(),
            },
            Category::Validation => ApiError {
                status: StatusCode::BAD_REQUEST,
                error: "invalid_matrix",
                detail: e.to_string(),
            },
            Category::Numerical | Category::Io => ApiError {
                status: StatusCode::INTERNAL_SERVER_ERROR,
                error: "internal",
                detail: "the computation could not be completed".into(),
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self.error, "detail": self.detail, "version": VERSION });
        (self.status, Json(body)).into_response()
    }
}

async fn index() -> Html<&'static str> {
    Html(INDEX_HTML)
}

async fn healthz() -> Json<Value> {
    Json(json!({ "status": "ok", "version": VERSION }))
}

async fn model_info(State(state): State<AppState>) -> Json<Value> {
    let mut v = serde_json::to_value(state.model.as_ref()).expect("model serializes");
    v["version"] = json!(VERSION);
    Json(v)
}

async fn evaluate_handler(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let doc: PcmDocument = serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let pcm = doc.into_pcm()?;
    Ok(Json(evaluate(&pcm, &state.model)?).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateRequest {
    order: usize,
    seed: Option<u64>,
    kind: Option<String>,
}

async fn simulate_handler(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: SimulateRequest = serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    ahp_core::pcm::check_order(req.order)?;
    let seed = req.seed.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0)
    });
    let generator: &dyn PcmGenerator = match req.kind.as_deref() {
        None | Some("logical") => &LogicalGenerator,
        Some("random") => &RandomGenerator,
        Some(other) => return Err(ApiError::bad_request(format!("unknown kind {other:?}"))),
    };
    let mut rng = row_rng(seed, req.order, 0);
    let pcm = generator.generate(req.order, ahp_core::simulate::DEFAULT_CANDIDATE_POOL, &mut rng)?;
    let evaluation = evaluate(&pcm, &state.model)?;
    Ok(Json(json!({
        "schema": 1,
        "version": VERSION,
        "seed": seed,
        "kind": generator.name(),
        "matrix": pcm.to_document(),
        "evaluation": evaluation,
    }))
    .into_response())
}
