//! Stateless JSON API under `/api/v1` plus the static web bundle at `/`.

use std::path::PathBuf;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::Query;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use tower_http::services::ServeDir;

use crate::ops::{self, DesignRequest, DfcRequest, Format, LayoutQuery, ScaleFactorQuery, SolveRequest, SraRequest};
use sra_core::Result;

/// Environment variable naming the directory of the web bundle.
pub const WEBUI_DIR_ENV: &str = "SRA_WEBUI_DIR";
const DEFAULT_WEBUI_DIR: &str = "webui/dist";

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn bad_request(detail: &str) -> Response {
    json_response(StatusCode::BAD_REQUEST, ops::error_json("BadRequest", detail))
}

fn respond(result: Result<String>) -> Response {
    match result {
        Ok(body) => json_response(StatusCode::OK, body),
        Err(e) => json_response(StatusCode::UNPROCESSABLE_ENTITY, ops::error_json(e.name(), e.detail())),
    }
}

/// Runs `f` on the blocking pool so long computations do not stall the
/// request loop.
async fn compute(f: impl FnOnce() -> Result<String> + Send + 'static) -> Response {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => respond(r),
        Err(e) => json_response(StatusCode::INTERNAL_SERVER_ERROR, ops::error_json("Internal", &e.to_string())),
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> std::result::Result<T, String> {
    serde_json::from_slice(body).map_err(|e| format!("malformed request body: {e}"))
}

async fn scale_factor(q: std::result::Result<Query<ScaleFactorQuery>, QueryRejection>) -> Response {
    match q {
        Ok(Query(q)) => respond(ops::scale_factor(&q)),
        Err(e) => bad_request(&e.body_text()),
    }
}

async fn layout(q: std::result::Result<Query<LayoutQuery>, QueryRejection>) -> Response {
    match q {
        Ok(Query(q)) => respond(ops::layout(&q)),
        Err(e) => bad_request(&e.body_text()),
    }
}

async fn sra(body: Bytes) -> Response {
    match parse_body::<SraRequest>(&body) {
        Ok(req) => compute(move || ops::sra(&req, Format::Json)).await,
        Err(detail) => bad_request(&detail),
    }
}

async fn solve(body: Bytes) -> Response {
    match parse_body::<SolveRequest>(&body) {
        Ok(req) => compute(move || ops::solve(&req)).await,
        Err(detail) => bad_request(&detail),
    }
}

async fn dfc_curve(body: Bytes) -> Response {
    match parse_body::<DfcRequest>(&body) {
        Ok(req) => compute(move || ops::dfc(&req, Format::Json)).await,
        Err(detail) => bad_request(&detail),
    }
}

async fn design(body: Bytes) -> Response {
    match parse_body::<DesignRequest>(&body) {
        Ok(req) => compute(move || ops::design(&req, Format::Json)).await,
        Err(detail) => bad_request(&detail),
    }
}

async fn preset_auro9() -> Response {
    respond(ops::preset_auro9())
}

pub fn webui_dir() -> PathBuf {
    std::env::var_os(WEBUI_DIR_ENV).map_or_else(|| PathBuf::from(DEFAULT_WEBUI_DIR), PathBuf::from)
}

pub fn router(static_dir: PathBuf) -> Router {
    let api = Router::new()
        .route("/scale-factor", get(scale_factor))
        .route("/layout", get(layout))
        .route("/sra", post(sra))
        .route("/solve", post(solve))
        .route("/dfc-curve", post(dfc_curve))
        .route("/design", post(design))
        .route("/presets/auro9", get(preset_auro9));
    Router::new().nest("/api/v1", api).fallback_service(ServeDir::new(static_dir))
}

pub async fn serve(port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(webui_dir())).await
}
