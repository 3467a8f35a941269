//! HTTP/JSON service over a knowledge graph and optional embedding table.

pub mod api;
pub mod error;
pub mod state;

use std::future::Future;
use std::sync::Arc;

use axum::http::HeaderValue;
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{Any, CorsLayer};
use tower_http::trace::TraceLayer;

pub use error::ApiError;
pub use state::{AppState, Snapshot};

/// Largest accepted ingest body.
pub const MAX_INGEST_BYTES: usize = 16 * 1024 * 1024;

/// Router allowing any CORS origin.
pub fn router(state: Arc<AppState>) -> Router {
    router_with_cors(state, CorsLayer::permissive())
}

/// CORS restricted to `origin` when given, otherwise permissive.
pub fn cors_for(origin: Option<HeaderValue>) -> CorsLayer {
    match origin {
        Some(o) => CorsLayer::new().allow_origin(o).allow_methods(Any).allow_headers(Any),
        None => CorsLayer::permissive(),
    }
}

pub fn router_with_cors(state: Arc<AppState>, cors: CorsLayer) -> Router {
    Router::new()
        .route("/api/search", get(api::search))
        .route("/api/subgraph", get(api::subgraph))
        .route("/api/article/{pmid}", get(api::article))
        .route("/api/recommend", get(api::recommend))
        .route("/api/ingest", post(api::ingest))
        .route("/api/health", get(api::health))
        .fallback(api::not_found)
        .layer(axum::extract::DefaultBodyLimit::max(MAX_INGEST_BYTES))
        .layer(cors)
        .layer(TraceLayer::new_for_http())
        .with_state(state)
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve<F>(listener: TcpListener, app: Router, shutdown: F) -> std::io::Result<()>
where
    F: Future<Output = ()> + Send + 'static,
{
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "listening");
    }
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}

/// Resolves on Ctrl-C.
pub async fn ctrl_c() {
    let _ = tokio::signal::ctrl_c().await;
}
