use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::objective::sigmoid;
use super::{EmbeddingTable, MentionsIndex, RecommendError};
use crate::kg::{EntityId, EntityKind, KnowledgeGraph};

/// Candidates are drawn from this many undirected hops around the query.
pub const CANDIDATE_HOPS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub id: EntityId,
    /// `σ(⟨Θ_query, Θ_candidate⟩)` when embeddings are used, otherwise the
    /// co-occurrence count.
    pub score: f64,
    pub kind: EntityKind,
    pub cooccurrence: usize,
}

/// Shared `mentions` neighbours: articles for two terms, terms for two
/// articles, and 1/0 for a directly linked article/term pair.
pub fn cooccurrence(index: &MentionsIndex, graph: &KnowledgeGraph, a: EntityId, b: EntityId) -> usize {
    let kind = |id| graph.entity(id).map(|e| e.kind);
    match (kind(a), kind(b)) {
        (Some(EntityKind::Term), Some(EntityKind::Term)) => {
            let other = index.articles_of(b);
            index.articles_of(a).iter().filter(|x| other.binary_search(x).is_ok()).count()
        }
        (Some(EntityKind::Article), Some(EntityKind::Article)) => index.terms_of(a).filter(|&w| index.is_mention(b, w)).count(),
        (Some(EntityKind::Article), Some(EntityKind::Term)) => usize::from(index.is_mention(a, b)),
        (Some(EntityKind::Term), Some(EntityKind::Article)) => usize::from(index.is_mention(b, a)),
        _ => 0,
    }
}

/// Top-`k` entities within two hops of `query`.
///
/// With a table covering the query and every candidate, candidates rank by
/// `⟨Θ_query, Θ_c⟩`; otherwise by co-occurrence alone. Ties fall back to
/// co-occurrence (descending) and then id.
pub fn recommend(
    embeddings: Option<&EmbeddingTable>,
    graph: &KnowledgeGraph,
    query: EntityId,
    k: usize,
) -> Result<Vec<Recommendation>, RecommendError> {
    let candidates = graph.within_hops(query, CANDIDATE_HOPS).map_err(|_| RecommendError::UnknownEntity(query))?;
    let index = MentionsIndex::new(graph);
    let table = embeddings.filter(|t| t.has_row(query) && candidates.iter().all(|&c| t.has_row(c)));

    let mut scored: Vec<(f64, Recommendation)> = Vec::with_capacity(candidates.len());
    for c in candidates {
        let cooc = cooccurrence(&index, graph, query, c);
        let (key, score) = match table {
            Some(t) => {
                let q = t.row(query)?;
                let dot: f64 = q.iter().zip(t.row(c)?).map(|(x, y)| x * y).sum();
                (dot, sigmoid(dot))
            }
            None => (cooc as f64, cooc as f64),
        };
        let kind = graph.entity(c).map(|e| e.kind).ok_or(RecommendError::UnknownEntity(c))?;
        scored.push((key, Recommendation { id: c, score, kind, cooccurrence: cooc }));
    }
    scored.sort_by(|(ka, a), (kb, b)| kb.total_cmp(ka).then(b.cooccurrence.cmp(&a.cooccurrence)).then(a.id.cmp(&b.id)));
    scored.truncate(k);
    Ok(scored.into_iter().map(|(_, r)| r).collect())
}

impl Recommendation {
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        other.score.total_cmp(&self.score).then(other.cooccurrence.cmp(&self.cooccurrence)).then(self.id.cmp(&other.id))
    }
}
