use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::objective::{log_sigmoid, score, sgd_step};
use super::{EmbeddingTable, Hyperparams, MentionsIndex, RecommendError, TrainingTriple};
use crate::kg::KnowledgeGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean `ln σ(s)` over the epoch's triples, measured before its updates.
    pub mean_log_sigmoid: f64,
    /// `‖Θ‖²` after the epoch.
    pub sq_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub epochs: Vec<EpochStats>,
}

fn draw_initial(n_rows: usize, hp: &Hyperparams, rng: &mut ChaCha8Rng) -> EmbeddingTable {
    EmbeddingTable::random(n_rows, hp.dim, hp.init_scale, rng).with_hyperparams(*hp)
}

/// The table [`train`] starts from for these hyperparameters.
pub fn initial_embeddings(n_rows: usize, hp: &Hyperparams) -> EmbeddingTable {
    draw_initial(n_rows, hp, &mut ChaCha8Rng::seed_from_u64(hp.seed))
}

/// Seeds one ChaCha8 stream with `hp.seed`, draws the initial table from it,
/// then for each epoch samples `triples_per_epoch` triples from the same
/// stream and applies one SGD step per triple in order.
pub fn train(graph: &KnowledgeGraph, hp: &Hyperparams) -> Result<(EmbeddingTable, TrainingLog), RecommendError> {
    hp.validate()?;
    let index = MentionsIndex::new(graph);
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut table = draw_initial(graph.entity_count(), hp, &mut rng);
    let mut log = TrainingLog::default();

    for epoch in 0..hp.epochs {
        let triples = index.sample(&mut rng, hp.triples_per_epoch)?;
        let mut total = 0.0;
        for t in &triples {
            total += log_sigmoid(score(&table, t)?);
        }
        for t in &triples {
            sgd_step(&mut table, t, hp.learning_rate, hp.reg)?;
        }
        log.epochs.push(EpochStats { epoch, mean_log_sigmoid: total / triples.len() as f64, sq_norm: table.sq_norm() });
    }
    Ok((table, log))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Fraction of triples with a strictly positive score.
    pub pairwise_accuracy: f64,
    pub mean_log_sigmoid: f64,
}

pub fn evaluate(table: &EmbeddingTable, held_out: &[TrainingTriple]) -> Result<Evaluation, RecommendError> {
    if held_out.is_empty() {
        return Err(RecommendError::EmptyHoldout);
    }
    let mut correct = 0usize;
    let mut total = 0.0;
    for t in held_out {
        let s = score(table, t)?;
        if s > 0.0 {
            correct += 1;
        }
        total += log_sigmoid(s);
    }
    let n = held_out.len() as f64;
    Ok(Evaluation { pairwise_accuracy: correct as f64 / n, mean_log_sigmoid: total / n })
}
