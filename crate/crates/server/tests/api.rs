use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use litgraph_core::fixtures::{self, CASE_STUDY_CORPUS, CASE_STUDY_PMIDS};
use litgraph_core::recommender::recommend;
use litgraph_core::wire::{
    self, ApiErrorBody, ArticleResponse, ErrorCode, HealthResponse, IngestResponse, RecommendationView, SearchResult, SubgraphResponse,
};
use litgraph_core::{EntityKind, KnowledgeGraph, MENTIONS};
use litgraph_server::{router, AppState, Snapshot};
use serde_json::Value;
use tower::ServiceExt;

fn app_with(graph: KnowledgeGraph) -> (Arc<AppState>, Router) {
    let state = AppState::new(Snapshot { graph, embeddings: None }, fixtures::extractor(), None);
    (state.clone(), router(state))
}

fn fixture_app() -> (Arc<AppState>, Router) {
    app_with(fixtures::case_study_graph())
}

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, bytes.to_vec())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    call(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post(app: &Router, uri: &str, body: &str) -> (StatusCode, Vec<u8>) {
    call(app, Request::post(uri).body(Body::from(body.to_owned())).unwrap()).await
}

fn error_body(bytes: &[u8]) -> ApiErrorBody {
    let v: Value = serde_json::from_slice(bytes).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 3, "{v}");
    serde_json::from_value(v).unwrap()
}

#[tokio::test]
async fn search_resolves_alzheimer_term() {
    let (state, app) = fixture_app();
    let (status, body) = get(&app, "/api/search?q=alzheimer").await;
    assert_eq!(status, StatusCode::OK);
    let hits: Vec<SearchResult> = serde_json::from_slice(&body).unwrap();
    assert_eq!(hits[0].name, "Alzheimer's disease");
    assert_eq!(hits[0].kind, EntityKind::Term);

    let snap = state.snapshot();
    let direct = wire::search_results(&snap.graph, &snap.graph.find_entities("alzheimer", 10));
    assert_eq!(hits, direct);

    let raw: Value = serde_json::from_slice(&body).unwrap();
    let mut keys: Vec<_> = raw[0].as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(keys, ["id", "kind", "name", "tier", "type"]);
}

#[tokio::test]
async fn search_rejects_bad_parameters() {
    let (_, app) = fixture_app();
    for uri in ["/api/search?q=", "/api/search?q=%20%20", "/api/search", "/api/search?q=a&limit=0", "/api/search?q=a&limit=x"] {
        let (status, body) = get(&app, uri).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{uri}");
        let err = error_body(&body);
        assert_eq!(err.code, ErrorCode::BadQuery);
        assert_eq!(err.http_status, 400);
    }
    let (status, body) = get(&app, "/api/search?q=zzz&unknown=1").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"[]");
}

#[tokio::test]
async fn search_limit_is_clamped() {
    let mut g = KnowledgeGraph::new();
    for i in 0..150 {
        g.upsert_term(&format!("term {i:03}"), litgraph_core::TermType::Other).unwrap();
    }
    let (_, app) = app_with(g);
    let (_, body) = get(&app, "/api/search?q=term&limit=1000").await;
    let hits: Vec<SearchResult> = serde_json::from_slice(&body).unwrap();
    assert_eq!(hits.len(), 100);
    let (_, body) = get(&app, "/api/search?q=term").await;
    let hits: Vec<SearchResult> = serde_json::from_slice(&body).unwrap();
    assert_eq!(hits.len(), 10);
}

#[tokio::test]
async fn subgraph_contains_case_study_articles() {
    let (state, app) = fixture_app();
    let (status, body) = get(&app, "/api/subgraph?q=alzheimer").await;
    assert_eq!(status, StatusCode::OK);
    let sub: SubgraphResponse = serde_json::from_slice(&body).unwrap();
    for pmid in CASE_STUDY_PMIDS {
        assert!(sub.nodes.iter().any(|n| n.kind == EntityKind::Article && n.name == pmid), "missing {pmid}");
    }
    let snap = state.snapshot();
    let center = snap.graph.find_entities("alzheimer", 1)[0].id;
    let direct = SubgraphResponse::from(&snap.graph.ego_subgraph(center, 1, 50).unwrap());
    assert_eq!(sub, direct);

    let (_, body) = get(&app, "/api/subgraph?q=alzheimer&radius=9&max_nodes=100000").await;
    let wide: SubgraphResponse = serde_json::from_slice(&body).unwrap();
    let direct = SubgraphResponse::from(&snap.graph.ego_subgraph(center, 3, 500).unwrap());
    assert_eq!(wide, direct);

    let (status, body) = get(&app, "/api/subgraph?q=zzz").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(error_body(&body).code, ErrorCode::NotFound);
    let (status, _) = get(&app, "/api/subgraph?q=alzheimer&radius=0").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn article_detail() {
    let (state, app) = fixture_app();
    let (status, body) = get(&app, "/api/article/28474569").await;
    assert_eq!(status, StatusCode::OK);
    let art: ArticleResponse = serde_json::from_slice(&body).unwrap();
    let snap = state.snapshot();
    let (id, record) = snap.graph.article_by_pmid("28474569").unwrap();
    assert_eq!(art.title, record.title);
    assert_eq!(art.abstract_text, record.abstract_text);

    let mut expected: Vec<_> =
        snap.graph.neighbors(id).unwrap().into_iter().filter(|(t, _)| t.relation == MENTIONS).map(|(t, _)| t.tail).collect();
    expected.dedup();
    let got: Vec<_> = art.terms.iter().map(|t| t.id).collect();
    assert_eq!(got, expected);

    let (status, body) = get(&app, "/api/article/abc").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_body(&body).code, ErrorCode::BadQuery);
    let (status, body) = get(&app, "/api/article/99999999").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(error_body(&body).code, ErrorCode::NotFound);
}

#[tokio::test]
async fn recommend_matches_direct_call() {
    let (state, app) = fixture_app();
    let (status, body) = get(&app, "/api/recommend?q=alzheimer").await;
    assert_eq!(status, StatusCode::OK);
    let recs: Vec<RecommendationView> = serde_json::from_slice(&body).unwrap();
    assert_eq!(recs[0].name.to_lowercase(), "amyloid beta");

    let snap = state.snapshot();
    let q = snap.graph.find_entities("alzheimer", 1)[0].id;
    let direct = wire::recommendation_views(&snap.graph, &recommend(None, &snap.graph, q, 10).unwrap());
    assert_eq!(recs, direct);

    let (status, _) = get(&app, "/api/recommend?q=zzz").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = get(&app, "/api/recommend?q=alzheimer&k=0").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn recommend_isolated_entity_is_empty() {
    let mut g = KnowledgeGraph::new();
    g.upsert_term("lonely", litgraph_core::TermType::Other).unwrap();
    let (_, app) = app_with(g);
    let (status, body) = get(&app, "/api/recommend?q=lonely").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"[]");
}

#[tokio::test]
async fn ingest_then_health() {
    let (state, app) = app_with(KnowledgeGraph::new());
    let (_, body) = get(&app, "/api/health").await;
    let h: HealthResponse = serde_json::from_slice(&body).unwrap();
    assert_eq!((h.n_terms, h.n_articles, h.n_triplets, h.embeddings_loaded), (0, 0, 0, false));
    assert_eq!(h.status, "ok");

    let (status, body) = post(&app, "/api/ingest", CASE_STUDY_CORPUS).await;
    assert_eq!(status, StatusCode::OK);
    let r: IngestResponse = serde_json::from_slice(&body).unwrap();
    assert_eq!(r.articles_added, 3);
    assert!(r.triplets_added > 0);
    assert_eq!(state.snapshot().graph, fixtures::case_study_graph());

    let (_, body) = get(&app, "/api/health").await;
    let h: HealthResponse = serde_json::from_slice(&body).unwrap();
    assert_eq!(h.n_articles, 3);

    let (status, body) = post(&app, "/api/ingest", "").await;
    assert_eq!(status, StatusCode::OK);
    let r: IngestResponse = serde_json::from_slice(&body).unwrap();
    assert_eq!((r.articles_added, r.triplets_added), (0, 0));
}

#[tokio::test]
async fn malformed_ingest_leaves_graph_unchanged() {
    let (state, app) = fixture_app();
    let before = state.snapshot().graph.clone();
    let body = "{\"pmid\":\"1\",\"title\":\"T\",\"abstract\":\"ApoE4 is the factor for amyloid beta.\"}\n{broken\n";
    let (status, resp) = post(&app, "/api/ingest", body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let err = error_body(&resp);
    assert_eq!(err.code, ErrorCode::IngestFailed);
    assert!(err.message.contains("line 2"), "{}", err.message);
    assert_eq!(state.snapshot().graph, before);
}

#[tokio::test]
async fn ingest_persists_to_store() {
    let dir = tempfile::tempdir().unwrap();
    let state = AppState::new(Snapshot::default(), fixtures::extractor(), Some(dir.path().to_path_buf()));
    let app = router(state.clone());
    let (status, _) = post(&app, "/api/ingest", CASE_STUDY_CORPUS).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(KnowledgeGraph::load(dir.path()).unwrap(), state.snapshot().graph);
}

#[tokio::test]
async fn unknown_route_is_json_404() {
    let (_, app) = fixture_app();
    let (status, body) = get(&app, "/api/nope").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(error_body(&body).code, ErrorCode::NotFound);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn readers_see_consistent_snapshots_during_ingest() {
    let (_, app) = app_with(KnowledgeGraph::new());
    let writer = {
        let app = app.clone();
        tokio::spawn(async move {
            for _ in 0..5 {
                post(&app, "/api/ingest", CASE_STUDY_CORPUS).await;
            }
        })
    };
    let mut readers = Vec::new();
    for _ in 0..4 {
        let app = app.clone();
        readers.push(tokio::spawn(async move {
            for _ in 0..20 {
                let (status, body) = get(&app, "/api/subgraph?q=alzheimer&radius=2").await;
                if status == StatusCode::OK {
                    let sub: SubgraphResponse = serde_json::from_slice(&body).unwrap();
                    let ids: Vec<_> = sub.nodes.iter().map(|n| n.id).collect();
                    for e in &sub.edges {
                        assert!(ids.contains(&e.head) && ids.contains(&e.tail));
                    }
                } else {
                    assert_eq!(status, StatusCode::NOT_FOUND);
                }
            }
        }));
    }
    writer.await.unwrap();
    for r in readers {
        r.await.unwrap();
    }
}
