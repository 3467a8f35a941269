//! Planted-cluster article/term graphs for evaluating the recommender.
//!
//! Articles and terms are split evenly into clusters; each article mentions
//! a random subset of its own cluster's terms. A seeded fraction of the
//! mentions edges is held out of the training graph.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kg::{ArticleRecord, EntityId, KnowledgeGraph, Provenance, TermType};
use crate::recommender::{MentionsIndex, TrainingTriple};
use crate::MENTIONS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedConfig {
    pub clusters: usize,
    pub articles: usize,
    pub terms: usize,
    pub mentions_per_article: usize,
    pub holdout_fraction: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig { clusters: 2, articles: 40, terms: 10, mentions_per_article: 3, holdout_fraction: 0.2, seed: 7 }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedSplit {
    /// Graph without the held-out edges; entity ids match `full`.
    pub train: KnowledgeGraph,
    pub full: KnowledgeGraph,
    /// Held-out `(article, term)` mentions edges.
    pub held_out: Vec<(EntityId, EntityId)>,
    /// Cluster of every entity, indexed by id.
    pub cluster_of: Vec<usize>,
}

pub fn planted_clusters(cfg: &PlantedConfig) -> PlantedSplit {
    assert!(cfg.clusters > 0 && cfg.articles >= cfg.clusters && cfg.terms >= cfg.clusters);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut full = KnowledgeGraph::new();
    let mut cluster_of = Vec::new();

    let terms: Vec<EntityId> = (0..cfg.terms)
        .map(|i| {
            cluster_of.push(i % cfg.clusters);
            full.upsert_term(&format!("cluster{} term{i}", i % cfg.clusters), TermType::Other).unwrap()
        })
        .collect();
    let articles: Vec<EntityId> = (0..cfg.articles)
        .map(|i| {
            cluster_of.push(i % cfg.clusters);
            full.upsert_article(ArticleRecord::new((100_000 + i).to_string(), format!("synthetic article {i}"), "")).unwrap()
        })
        .collect();

    let mut edges = Vec::new();
    for (i, &article) in articles.iter().enumerate() {
        let c = i % cfg.clusters;
        let mut own: Vec<EntityId> = terms.iter().copied().enumerate().filter(|(j, _)| j % cfg.clusters == c).map(|(_, t)| t).collect();
        own.shuffle(&mut rng);
        for &term in own.iter().take(cfg.mentions_per_article) {
            edges.push((article, term));
        }
    }

    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(&mut rng);
    let n_held = (edges.len() as f64 * cfg.holdout_fraction).round() as usize;
    let mut is_held = vec![false; edges.len()];
    for &i in &order[..n_held] {
        is_held[i] = true;
    }

    let mut train = full.clone();
    let mut held_out = Vec::new();
    for (i, &(a, w)) in edges.iter().enumerate() {
        let pmid = full.entity(a).unwrap().canonical_name.clone();
        full.add_triplet(a, MENTIONS, w, Provenance::new(pmid.clone(), 0)).unwrap();
        if is_held[i] {
            held_out.push((a, w));
        } else {
            train.add_triplet(a, MENTIONS, w, Provenance::new(pmid, 0)).unwrap();
        }
    }
    PlantedSplit { train, full, held_out, cluster_of }
}

/// Evaluation triples anchored on held-out edges. For an edge `(A, w)`:
/// `w'` is a term unlinked to `A` in the full graph, `A⁺` a training article
/// other than `A` that mentions `w`, and `A⁻` a training article mentioning
/// `w'`. Edges with no valid completion are skipped.
pub fn held_out_triples<R: Rng>(split: &PlantedSplit, per_edge: usize, rng: &mut R) -> Vec<TrainingTriple> {
    let train = MentionsIndex::new(&split.train);
    let full = MentionsIndex::new(&split.full);
    let mut out = Vec::new();
    for &(article, term) in &split.held_out {
        let pos: Vec<EntityId> = train.articles_of(term).iter().copied().filter(|&a| a != article).collect();
        let neg_terms: Vec<EntityId> = split
            .full
            .entities()
            .iter()
            .filter(|e| e.term_type.is_some() && !full.is_mention(article, e.id) && !train.articles_of(e.id).is_empty())
            .map(|e| e.id)
            .collect();
        if pos.is_empty() || neg_terms.is_empty() {
            continue;
        }
        for _ in 0..per_edge {
            let neg_term = neg_terms[rng.gen_range(0..neg_terms.len())];
            let negs = train.articles_of(neg_term);
            out.push(TrainingTriple {
                article,
                term,
                neg_term,
                pos_article: pos[rng.gen_range(0..pos.len())],
                neg_article: negs[rng.gen_range(0..negs.len())],
            });
        }
    }
    out
}
