//! HTTP side of the `threedsl` binary: serves one compiled scene, the
//! viewer page and optional static viewer assets.

use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode, Uri};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::Router;

/// Landing page used when no asset directory provides its own `index.html`.
pub const INDEX_HTML: &str = include_str!("index.html");

#[derive(Debug)]
struct Served {
    scene: Vec<u8>,
    assets: Option<PathBuf>,
}

/// Routes: `GET /health`, `GET /scene.json`, `GET /`, and files under
/// `assets` if given. Everything else is 404.
pub fn router(scene: Vec<u8>, assets: Option<PathBuf>) -> Router {
    let state = Arc::new(Served { scene, assets });
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/scene.json", get(scene_json))
        .route("/", get(index))
        .fallback(static_asset)
        .with_state(state)
}

async fn scene_json(State(s): State<Arc<Served>>) -> Response {
    let mut res = Response::new(Body::from(s.scene.clone()));
    res.headers_mut().insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    res
}

async fn index(State(s): State<Arc<Served>>) -> Response {
    if let Some(dir) = &s.assets {
        if let Ok(bytes) = tokio::fs::read(dir.join("index.html")).await {
            return with_type(bytes, "text/html; charset=utf-8");
        }
    }
    Html(INDEX_HTML).into_response()
}

async fn static_asset(State(s): State<Arc<Served>>, method: Method, uri: Uri) -> Response {
    let not_found = || StatusCode::NOT_FOUND.into_response();
    if method != Method::GET {
        return not_found();
    }
    let Some(dir) = &s.assets else { return not_found() };
    let Some(rel) = safe_relative(uri.path()) else { return not_found() };
    let path = dir.join(&rel);
    match tokio::fs::read(&path).await {
        Ok(bytes) => with_type(bytes, content_type(&path)),
        Err(_) => not_found(),
    }
}

fn with_type(bytes: Vec<u8>, ty: &'static str) -> Response {
    let mut res = Response::new(Body::from(bytes));
    res.headers_mut().insert(header::CONTENT_TYPE, HeaderValue::from_static(ty));
    res
}

/// Request path as a relative file path, or `None` if it tries to leave the root.
fn safe_relative(path: &str) -> Option<PathBuf> {
    let rel = Path::new(path.trim_start_matches('/'));
    let mut out = PathBuf::new();
    for c in rel.components() {
        match c {
            Component::Normal(part) => out.push(part),
            _ => return None,
        }
    }
    (!out.as_os_str().is_empty()).then_some(out)
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        Some("wasm") => "application/wasm",
        _ => "application/octet-stream",
    }
}
