//! Plain-text renderings. Every function is a pure function of a wire value
//! so store-backed and server-backed runs print the same bytes.

use std::collections::HashMap;
use std::fmt::Write;

use litgraph_core::recommender::TrainingLog;
use litgraph_core::wire::{HealthResponse, RecommendationView, SubgraphResponse};
use litgraph_core::{EntityKind, GraphStats};

fn kind_str(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Term => "term",
        EntityKind::Article => "article",
    }
}

pub fn stats_line(stats: &GraphStats) -> String {
    format!("articles={} terms={} triplets={}\n", stats.n_articles, stats.n_terms, stats.n_triplets)
}

pub fn health_stats(h: &HealthResponse) -> GraphStats {
    GraphStats { n_terms: h.n_terms, n_articles: h.n_articles, n_triplets: h.n_triplets }
}

/// `edges:` then one `head -[relation]-> tail` line per edge using canonical
/// names, then `nodes:` with `kind<TAB>name` lines.
pub fn subgraph(sub: &SubgraphResponse) -> String {
    let names: HashMap<_, _> = sub.nodes.iter().map(|n| (n.id, n.canonical_name.as_str())).collect();
    let name = |id| names.get(&id).copied().unwrap_or("?");
    let mut out = String::new();
    let center = name(sub.center);
    let _ = writeln!(out, "center: {center}");
    let _ = writeln!(out, "edges:");
    for e in &sub.edges {
        let _ = writeln!(out, "{} -[{}]-> {}", name(e.head), e.relation, name(e.tail));
    }
    let _ = writeln!(out, "nodes:");
    for n in &sub.nodes {
        let _ = writeln!(out, "{}\t{}", kind_str(n.kind), n.canonical_name);
    }
    if sub.truncated {
        let _ = writeln!(out, "truncated: true");
    }
    out
}

/// `rank score kind name`, tab separated, rank from 1.
pub fn recommendations(recs: &[RecommendationView]) -> String {
    let mut out = String::new();
    for (i, r) in recs.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", i + 1, r.score, kind_str(r.kind), r.name);
    }
    out
}

pub fn training_log(log: &TrainingLog) -> String {
    let mut out = String::new();
    for e in &log.epochs {
        let _ = writeln!(out, "epoch={} mean_log_sigmoid={:.6} sq_norm={:.6}", e.epoch, e.mean_log_sigmoid, e.sq_norm);
    }
    out
}
