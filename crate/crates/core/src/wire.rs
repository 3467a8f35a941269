//! JSON shapes of the HTTP API, shared by the server and the client.

use serde::{Deserialize, Serialize};

use crate::kg::{ArticleRecord, Entity, EntityId, EntityKind, KnowledgeGraph, Provenance, SearchHit, Subgraph, TermType, Triplet};
use crate::recommender::Recommendation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub id: EntityId,
    pub kind: EntityKind,
    pub name: String,
    #[serde(rename = "type")]
    pub term_type: Option<TermType>,
    pub tier: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeView {
    pub id: EntityId,
    pub kind: EntityKind,
    pub name: String,
    pub canonical_name: String,
    #[serde(rename = "type")]
    pub term_type: Option<TermType>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeView {
    pub head: EntityId,
    pub relation: String,
    pub tail: EntityId,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgraphResponse {
    pub center: EntityId,
    pub nodes: Vec<NodeView>,
    pub edges: Vec<EdgeView>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRef {
    pub id: EntityId,
    pub name: String,
    #[serde(rename = "type")]
    pub term_type: Option<TermType>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleResponse {
    pub pmid: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub terms: Vec<TermRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationView {
    pub id: EntityId,
    pub kind: EntityKind,
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestResponse {
    pub articles_added: usize,
    pub triplets_added: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub n_terms: usize,
    pub n_articles: usize,
    pub n_triplets: usize,
    pub embeddings_loaded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    BadQuery,
    NotFound,
    IngestFailed,
    Internal,
}

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiErrorBody {
    pub http_status: u16,
    pub code: ErrorCode,
    pub message: String,
}

impl From<&Entity> for NodeView {
    fn from(e: &Entity) -> Self {
        NodeView { id: e.id, kind: e.kind, name: e.display_name.clone(), canonical_name: e.canonical_name.clone(), term_type: e.term_type }
    }
}

impl From<&Triplet> for EdgeView {
    fn from(t: &Triplet) -> Self {
        EdgeView { head: t.head, relation: t.relation.clone(), tail: t.tail, provenance: t.provenance.clone() }
    }
}

impl From<&Subgraph> for SubgraphResponse {
    fn from(s: &Subgraph) -> Self {
        SubgraphResponse {
            center: s.center,
            nodes: s.nodes.iter().map(NodeView::from).collect(),
            edges: s.edges.iter().map(EdgeView::from).collect(),
            truncated: s.truncated,
        }
    }
}

pub fn search_results(graph: &KnowledgeGraph, hits: &[SearchHit]) -> Vec<SearchResult> {
    hits.iter()
        .filter_map(|h| {
            let e = graph.entity(h.id)?;
            Some(SearchResult { id: e.id, kind: e.kind, name: e.display_name.clone(), term_type: e.term_type, tier: h.tier })
        })
        .collect()
}

/// The article record plus every term it links to with `mentions`.
pub fn article_response(graph: &KnowledgeGraph, id: EntityId, record: &ArticleRecord) -> ArticleResponse {
    let terms = graph
        .mentioned_terms(id)
        .into_iter()
        .filter_map(|t| graph.entity(t))
        .map(|e| TermRef { id: e.id, name: e.display_name.clone(), term_type: e.term_type })
        .collect();
    ArticleResponse { pmid: record.pmid.clone(), title: record.title.clone(), abstract_text: record.abstract_text.clone(), terms }
}

pub fn recommendation_views(graph: &KnowledgeGraph, recs: &[Recommendation]) -> Vec<RecommendationView> {
    recs.iter()
        .filter_map(|r| {
            let e = graph.entity(r.id)?;
            Some(RecommendationView { id: r.id, kind: r.kind, name: e.display_name.clone(), score: r.score })
        })
        .collect()
}
