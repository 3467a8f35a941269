use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::{RecommendError, TrainingTriple};
use crate::kg::{EntityId, EntityKind, KnowledgeGraph};
use crate::MENTIONS;

/// Attempts per triple before the sampler gives up.
pub const MAX_RESAMPLES: usize = 50;

/// Bipartite article/term view of the graph built from `mentions` edges.
#[derive(Debug, Clone, Default)]
pub struct MentionsIndex {
    edges: Vec<(EntityId, EntityId)>,
    terms_of: BTreeMap<EntityId, BTreeSet<EntityId>>,
    articles_of: BTreeMap<EntityId, Vec<EntityId>>,
    /// Terms mentioned by at least one article, ascending.
    mentioned: Vec<EntityId>,
    n_articles: usize,
    n_terms: usize,
}

impl MentionsIndex {
    pub fn new(graph: &KnowledgeGraph) -> Self {
        let mut idx = MentionsIndex::default();
        let kind = |id: EntityId| graph.entity(id).map(|e| e.kind);
        for t in graph.triplets() {
            if t.relation == MENTIONS && kind(t.head) == Some(EntityKind::Article) && kind(t.tail) == Some(EntityKind::Term) {
                idx.edges.push((t.head, t.tail));
                idx.terms_of.entry(t.head).or_default().insert(t.tail);
                idx.articles_of.entry(t.tail).or_default().push(t.head);
            }
        }
        for list in idx.articles_of.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        idx.mentioned = idx.articles_of.keys().copied().collect();
        let stats = graph.stats();
        idx.n_articles = stats.n_articles;
        idx.n_terms = stats.n_terms;
        idx
    }

    /// `(article, term)` pairs in graph edge order.
    pub fn edges(&self) -> &[(EntityId, EntityId)] {
        &self.edges
    }

    pub fn is_mention(&self, article: EntityId, term: EntityId) -> bool {
        self.terms_of.get(&article).is_some_and(|s| s.contains(&term))
    }

    pub fn terms_of(&self, article: EntityId) -> impl Iterator<Item = EntityId> + '_ {
        self.terms_of.get(&article).into_iter().flatten().copied()
    }

    pub fn articles_of(&self, term: EntityId) -> &[EntityId] {
        self.articles_of.get(&term).map_or(&[], Vec::as_slice)
    }

    fn linked_count(&self, article: EntityId) -> usize {
        self.terms_of.get(&article).map_or(0, BTreeSet::len)
    }

    fn has_neg_term(&self, article: EntityId) -> bool {
        self.linked_count(article) < self.mentioned.len()
    }

    /// Whether `(article, term)` can anchor a valid triple.
    fn is_anchor(&self, article: EntityId, term: EntityId) -> bool {
        self.articles_of(term).len() >= 2 && self.has_neg_term(article)
    }

    /// Checks every structural requirement of a training triple.
    pub fn validate(&self, t: &TrainingTriple) -> Result<(), String> {
        if !self.is_mention(t.article, t.term) {
            return Err(format!("({}, {}) is not a mentions edge", t.article, t.term));
        }
        if self.is_mention(t.article, t.neg_term) {
            return Err(format!("negative term {} is linked to article {}", t.neg_term, t.article));
        }
        if t.pos_article == t.article || !self.is_mention(t.pos_article, t.term) {
            return Err(format!("positive article {} does not share term {}", t.pos_article, t.term));
        }
        if !self.is_mention(t.neg_article, t.neg_term) {
            return Err(format!("negative article {} does not mention {}", t.neg_article, t.neg_term));
        }
        Ok(())
    }

    fn check_feasible(&self) -> Result<(), RecommendError> {
        let insufficient = |m: &str| Err(RecommendError::InsufficientGraph(m.to_owned()));
        if self.n_articles < 2 {
            return insufficient("need at least two articles");
        }
        if self.n_terms < 2 {
            return insufficient("need at least two terms");
        }
        if !self.articles_of.values().any(|a| a.len() >= 2) {
            return insufficient("no term is mentioned by two or more articles");
        }
        if !self.edges.iter().any(|&(a, w)| self.is_anchor(a, w)) {
            return insufficient("no article has both a shared term and an unlinked term");
        }
        Ok(())
    }

    fn sample_neg_term<R: Rng>(&self, article: EntityId, rng: &mut R) -> EntityId {
        let linked = self.linked_count(article);
        if 2 * linked > self.mentioned.len() {
            let candidates: Vec<EntityId> = self.mentioned.iter().copied().filter(|&w| !self.is_mention(article, w)).collect();
            return candidates[rng.gen_range(0..candidates.len())];
        }
        loop {
            let w = self.mentioned[rng.gen_range(0..self.mentioned.len())];
            if !self.is_mention(article, w) {
                return w;
            }
        }
    }

    fn sample_one<R: Rng>(&self, rng: &mut R) -> Option<TrainingTriple> {
        for _ in 0..MAX_RESAMPLES {
            let (article, term) = self.edges[rng.gen_range(0..self.edges.len())];
            if !self.is_anchor(article, term) {
                continue;
            }
            let neg_term = self.sample_neg_term(article, rng);
            let sharing = self.articles_of(term);
            // `sharing` contains `article` exactly once; draw among the others.
            let mut pick = rng.gen_range(0..sharing.len() - 1);
            if sharing[pick] >= article {
                pick += 1;
            }
            let pos_article = sharing[pick];
            let negs = self.articles_of(neg_term);
            let neg_article = negs[rng.gen_range(0..negs.len())];
            return Some(TrainingTriple { article, term, neg_term, pos_article, neg_article });
        }
        None
    }

    /// Draws exactly `count` triples; see [`sample_triples`].
    pub fn sample<R: Rng>(&self, rng: &mut R, count: usize) -> Result<Vec<TrainingTriple>, RecommendError> {
        self.check_feasible()?;
        (0..count)
            .map(|_| {
                self.sample_one(rng)
                    .ok_or_else(|| RecommendError::InsufficientGraph(format!("no valid triple after {MAX_RESAMPLES} resamples")))
            })
            .collect()
    }
}

/// Uniform triple sampling: `(A, w)` over mentions edges (redrawn when no
/// other article shares `w`), `w'` over mentioned terms not linked to `A`,
/// `A⁺` over the other articles sharing `w`, `A⁻` over articles of `w'`.
pub fn sample_triples<R: Rng>(graph: &KnowledgeGraph, rng: &mut R, count: usize) -> Result<Vec<TrainingTriple>, RecommendError> {
    MentionsIndex::new(graph).sample(rng, count)
}
