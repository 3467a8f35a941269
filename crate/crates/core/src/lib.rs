//! Knowledge-graph literature search.
//!
//! Article abstracts are turned into `(head, relation, tail)` triplets by a
//! deterministic gazetteer + POS-lexicon pipeline ([`extraction`]), stored in an
//! in-memory [`KnowledgeGraph`] with file persistence ([`kg`]), and served as
//! focused ego subgraphs. Query refinements come from a pairwise-ranking
//! embedding model trained over the article/term "mentions" network
//! ([`recommender`]).

pub mod extraction;
pub mod fixtures;
pub mod kg;
pub mod recommender;
pub mod synthetic;
pub mod text;
pub mod wire;

pub use extraction::{Extractor, Gazetteer, PosLexicon, PosTag};
pub use kg::{
    ArticleRecord, Direction, Entity, EntityId, EntityKind, GraphError, GraphStats, KnowledgeGraph, Provenance, SearchHit, Subgraph,
    TermType, Triplet,
};
pub use recommender::{EmbeddingTable, Hyperparams, RecommendError, Recommendation, TrainingTriple};

/// Reserved relation label linking an article to every term its abstract mentions.
pub const MENTIONS: &str = "mentions";
