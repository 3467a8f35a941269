use super::{EmbeddingTable, RecommendError, TrainingTriple};
use crate::kg::EntityId;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// `ln σ(s)` without overflow for large `|s|`.
pub fn log_sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        -(-s).exp().ln_1p()
    } else {
        s - s.exp().ln_1p()
    }
}

/// `Θ_article + Θ_term`.
pub fn composite(table: &EmbeddingTable, article: EntityId, term: EntityId) -> Result<Vec<f64>, RecommendError> {
    let a = table.row(article)?;
    let w = table.row(term)?;
    Ok(a.iter().zip(w).map(|(x, y)| x + y).collect())
}

/// Returns `(u, v)` with `u = Θ_A + Θ_w` and `v = (Θ_A⁺ + Θ_w) − (Θ_A⁻ + Θ_w')`.
fn score_parts(table: &EmbeddingTable, t: &TrainingTriple) -> Result<(Vec<f64>, Vec<f64>), RecommendError> {
    let u = composite(table, t.article, t.term)?;
    let pos = composite(table, t.pos_article, t.term)?;
    let neg = composite(table, t.neg_article, t.neg_term)?;
    let v = pos.iter().zip(&neg).map(|(p, n)| p - n).collect();
    Ok((u, v))
}

pub fn score(table: &EmbeddingTable, t: &TrainingTriple) -> Result<f64, RecommendError> {
    let (u, v) = score_parts(table, t)?;
    Ok(dot(&u, &v))
}

/// `Σ ln σ(score) − λ·‖Θ‖²` with the penalty over every row of the table.
pub fn objective(table: &EmbeddingTable, triples: &[TrainingTriple], reg: f64) -> Result<f64, RecommendError> {
    let mut total = 0.0;
    for t in triples {
        total += log_sigmoid(score(table, t)?);
    }
    Ok(total - reg * table.sq_norm())
}

/// Gradient of `ln σ(s) − λ Σ_r ‖Θ_r‖²` over the distinct rows the triple
/// touches, in first-appearance order (A, w, A⁺, A⁻, w'). Contributions of
/// coinciding rows are summed; the penalty is counted once per row.
pub fn triple_gradient(table: &EmbeddingTable, t: &TrainingTriple, reg: f64) -> Result<Vec<(EntityId, Vec<f64>)>, RecommendError> {
    let (u, v) = score_parts(table, t)?;
    let g = sigmoid(-dot(&u, &v));
    let dim = table.dim();
    let v_plus_u: Vec<f64> = v.iter().zip(&u).map(|(a, b)| a + b).collect();
    let neg_u: Vec<f64> = u.iter().map(|x| -x).collect();
    let parts: [(EntityId, &[f64]); 5] =
        [(t.article, &v), (t.term, &v_plus_u), (t.pos_article, &u), (t.neg_article, &neg_u), (t.neg_term, &neg_u)];

    let mut grads: Vec<(EntityId, Vec<f64>)> = Vec::with_capacity(5);
    for (id, dir) in parts {
        let slot = match grads.iter().position(|(r, _)| *r == id) {
            Some(i) => i,
            None => {
                let row = table.row(id)?;
                grads.push((id, row.iter().map(|x| -2.0 * reg * x).collect()));
                grads.len() - 1
            }
        };
        let acc = &mut grads[slot].1;
        for k in 0..dim {
            acc[k] += g * dir[k];
        }
    }
    Ok(grads)
}

/// One stochastic ascent step on a single triple.
pub fn sgd_step(table: &mut EmbeddingTable, t: &TrainingTriple, learning_rate: f64, reg: f64) -> Result<(), RecommendError> {
    let grads = triple_gradient(table, t, reg)?;
    for (id, grad) in grads {
        for (x, g) in table.row_mut(id)?.iter_mut().zip(grad) {
            *x += learning_rate * g;
        }
    }
    Ok(())
}
