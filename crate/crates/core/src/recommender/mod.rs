//! Query recommendation from a pairwise-ranking embedding model.
//!
//! Every entity (article or term) owns one row of an [`EmbeddingTable`].
//! An article/term pair is represented by the sum of their rows, and a
//! training triple `(A, w, w', A⁺, A⁻)` scores
//! `⟨Θ_A + Θ_w, (Θ_A⁺ + Θ_w) − (Θ_A⁻ + Θ_w')⟩`. Training maximizes the summed
//! log-sigmoid of that score minus an L2 penalty by plain SGD.

mod embedding;
mod objective;
mod sampler;
mod serve;
mod train;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::EntityId;

pub use embedding::{EmbeddingHeader, EmbeddingTable, EMBEDDING_SCHEMA_VERSION};
pub use objective::{composite, log_sigmoid, objective, score, sgd_step, sigmoid, triple_gradient};
pub use sampler::{sample_triples, MentionsIndex, MAX_RESAMPLES};
pub use serve::{cooccurrence, recommend, Recommendation};
pub use train::{evaluate, initial_embeddings, train, EpochStats, Evaluation, TrainingLog};

#[derive(Debug, Error)]
pub enum RecommendError {
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("insufficient graph: {0}")]
    InsufficientGraph(String),
    #[error("held-out set is empty")]
    EmptyHoldout,
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt embedding file: {0}")]
    CorruptEmbeddings(String),
}

/// One sample of the preference "article A relates to term w over term w'".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrainingTriple {
    pub article: EntityId,
    pub term: EntityId,
    pub neg_term: EntityId,
    /// Another article that also mentions `term`.
    pub pos_article: EntityId,
    /// An article that mentions `neg_term`.
    pub neg_article: EntityId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub dim: usize,
    pub learning_rate: f64,
    #[serde(rename = "lambda")]
    pub reg: f64,
    pub epochs: usize,
    pub triples_per_epoch: usize,
    pub seed: u64,
    pub init_scale: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams { dim: 16, learning_rate: 0.05, reg: 0.01, epochs: 50, triples_per_epoch: 500, seed: 7, init_scale: 0.05 }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), RecommendError> {
        let bad = |m: &str| Err(RecommendError::InvalidHyperparams(m.to_owned()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive and finite");
        }
        if !(self.reg.is_finite() && self.reg >= 0.0) {
            return bad("lambda must be non-negative and finite");
        }
        if self.epochs == 0 || self.triples_per_epoch == 0 {
            return bad("epochs and triples_per_epoch must be positive");
        }
        if !(self.init_scale.is_finite() && self.init_scale > 0.0) {
            return bad("init_scale must be positive and finite");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_hyperparams_are_valid() {
        Hyperparams::default().validate().unwrap();
        let hp = Hyperparams { learning_rate: 0.0, ..Hyperparams::default() };
        assert!(hp.validate().is_err());
        let hp = Hyperparams { reg: -1.0, ..Hyperparams::default() };
        assert!(hp.validate().is_err());
    }

    #[test]
    fn hyperparams_serialize_lambda_name() {
        let v = serde_json::to_value(Hyperparams::default()).unwrap();
        assert_eq!(v["lambda"], 0.01);
        assert_eq!(v["triples_per_epoch"], 500);
    }
}
