//! Request handlers. Each one resolves parameters, calls into
//! `litgraph_core` on the current snapshot and serializes the result.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::Json;
use litgraph_core::extraction::{ingest_article, read_corpus};
use litgraph_core::kg::is_valid_pmid;
use litgraph_core::recommender::recommend as recommend_entities;
use litgraph_core::wire::{
    self, ArticleResponse, ErrorCode, HealthResponse, IngestResponse, RecommendationView, SearchResult, SubgraphResponse,
};
use litgraph_core::{EntityId, KnowledgeGraph};

use crate::error::ApiError;
use crate::state::{AppState, Snapshot};

pub const SEARCH_LIMIT_DEFAULT: usize = 10;
pub const SEARCH_LIMIT_MAX: usize = 100;
pub const RADIUS_DEFAULT: usize = 1;
pub const RADIUS_MAX: usize = 3;
pub const MAX_NODES_DEFAULT: usize = 50;
pub const MAX_NODES_MAX: usize = 500;
pub const K_DEFAULT: usize = 10;
pub const K_MAX: usize = 50;

type Params = Result<Query<HashMap<String, String>>, QueryRejection>;

fn params(raw: Params) -> Result<HashMap<String, String>, ApiError> {
    raw.map(|Query(p)| p).map_err(|e| ApiError::bad_query(e.body_text()))
}

fn query_text(p: &HashMap<String, String>) -> Result<&str, ApiError> {
    match p.get("q").map(|q| q.trim()) {
        Some(q) if !q.is_empty() => Ok(q),
        _ => Err(ApiError::bad_query("parameter q must be non-empty")),
    }
}

/// Positive integer parameter, defaulted when absent and clamped to `max`.
fn bounded(p: &HashMap<String, String>, name: &str, default: usize, max: usize) -> Result<usize, ApiError> {
    let Some(raw) = p.get(name) else {
        return Ok(default);
    };
    match usize::from_str(raw.trim()) {
        Ok(0) | Err(_) => Err(ApiError::bad_query(format!("parameter {name} must be a positive integer"))),
        Ok(v) => Ok(v.min(max)),
    }
}

/// Best search hit for free text.
pub fn resolve(graph: &KnowledgeGraph, q: &str) -> Option<EntityId> {
    graph.find_entities(q, 1).first().map(|h| h.id)
}

fn resolve_or_404(graph: &KnowledgeGraph, q: &str) -> Result<EntityId, ApiError> {
    resolve(graph, q).ok_or_else(|| ApiError::not_found(format!("no entity matches {q:?}")))
}

pub async fn search(State(state): State<Arc<AppState>>, raw: Params) -> Result<Json<Vec<SearchResult>>, ApiError> {
    let p = params(raw)?;
    let q = query_text(&p)?;
    let limit = bounded(&p, "limit", SEARCH_LIMIT_DEFAULT, SEARCH_LIMIT_MAX)?;
    let snap = state.snapshot();
    let hits = snap.graph.find_entities(q, limit);
    Ok(Json(wire::search_results(&snap.graph, &hits)))
}

pub async fn subgraph(State(state): State<Arc<AppState>>, raw: Params) -> Result<Json<SubgraphResponse>, ApiError> {
    let p = params(raw)?;
    let q = query_text(&p)?;
    let radius = bounded(&p, "radius", RADIUS_DEFAULT, RADIUS_MAX)?;
    let max_nodes = bounded(&p, "max_nodes", MAX_NODES_DEFAULT, MAX_NODES_MAX)?;
    let snap = state.snapshot();
    let center = resolve_or_404(&snap.graph, q)?;
    let sub = snap.graph.ego_subgraph(center, radius, max_nodes).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(Json(SubgraphResponse::from(&sub)))
}

pub async fn article(State(state): State<Arc<AppState>>, Path(pmid): Path<String>) -> Result<Json<ArticleResponse>, ApiError> {
    if !is_valid_pmid(&pmid) {
        return Err(ApiError::bad_query(format!("malformed pmid {pmid:?}")));
    }
    let snap = state.snapshot();
    let (id, record) = snap.graph.article_by_pmid(&pmid).ok_or_else(|| ApiError::not_found(format!("no article with pmid {pmid}")))?;
    Ok(Json(wire::article_response(&snap.graph, id, record)))
}

pub async fn recommend(State(state): State<Arc<AppState>>, raw: Params) -> Result<Json<Vec<RecommendationView>>, ApiError> {
    let p = params(raw)?;
    let q = query_text(&p)?;
    let k = bounded(&p, "k", K_DEFAULT, K_MAX)?;
    let snap = state.snapshot();
    let query = resolve_or_404(&snap.graph, q)?;
    let recs = recommend_entities(snap.embeddings.as_ref(), &snap.graph, query, k).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(Json(wire::recommendation_views(&snap.graph, &recs)))
}

pub async fn ingest(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<IngestResponse>, ApiError> {
    let Some(_guard) = state.try_begin_ingest() else {
        return Err(ApiError::new(StatusCode::CONFLICT, ErrorCode::IngestFailed, "another ingest is in progress"));
    };
    let records = read_corpus(body.as_ref()).map_err(|e| ApiError::ingest_failed(e.to_string()))?;
    if records.is_empty() {
        return Ok(Json(IngestResponse { articles_added: 0, triplets_added: 0 }));
    }

    let current = state.snapshot();
    let worker = Arc::clone(&state);
    let (next, response) = tokio::task::spawn_blocking(move || -> Result<(Snapshot, IngestResponse), ApiError> {
        let mut graph = current.graph.clone();
        let mut triplets_added = 0;
        for (i, record) in records.iter().enumerate() {
            let counts = ingest_article(&mut graph, record, &worker.extractor)
                .map_err(|e| ApiError::ingest_failed(format!("record {}: {e}", i + 1)))?;
            triplets_added += counts.triplets;
        }
        if let Some(dir) = &worker.store_dir {
            graph.save(dir).map_err(|e| ApiError::internal(format!("persisting store: {e}")))?;
        }
        let response = IngestResponse { articles_added: records.len(), triplets_added };
        Ok((Snapshot { graph, embeddings: current.embeddings.clone() }, response))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;

    state.swap(next);
    tracing::info!(articles = response.articles_added, triplets = response.triplets_added, "ingest applied");
    Ok(Json(response))
}

pub fn health_of(snap: &Snapshot) -> HealthResponse {
    let stats = snap.graph.stats();
    HealthResponse {
        status: "ok".into(),
        n_terms: stats.n_terms,
        n_articles: stats.n_articles,
        n_triplets: stats.n_triplets,
        embeddings_loaded: snap.embeddings.is_some(),
    }
}

pub async fn health(State(state): State<Arc<AppState>>) -> Json<HealthResponse> {
    Json(health_of(&state.snapshot()))
}

pub async fn not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}
