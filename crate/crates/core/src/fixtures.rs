//! Shipped gazetteer, POS lexicon and the three-article Alzheimer's case-study corpus.

use crate::extraction::{ingest_article, read_corpus, Extractor, Gazetteer, PosLexicon};
use crate::kg::{ArticleRecord, KnowledgeGraph};

pub const GAZETTEER_TSV: &str = include_str!("../data/gazetteer.tsv");
pub const LEXICON_TSV: &str = include_str!("../data/lexicon.tsv");
pub const CASE_STUDY_CORPUS: &str = include_str!("../data/case_study.jsonl");

/// PMIDs of the case-study articles.
pub const CASE_STUDY_PMIDS: [&str; 3] = ["28474569", "33737172", "33115936"];

pub fn gazetteer() -> Gazetteer {
    Gazetteer::from_tsv(GAZETTEER_TSV.as_bytes(), "gazetteer.tsv").expect("shipped gazetteer parses")
}

pub fn lexicon() -> PosLexicon {
    PosLexicon::from_tsv(LEXICON_TSV.as_bytes(), "lexicon.tsv").expect("shipped lexicon parses")
}

pub fn extractor() -> Extractor {
    Extractor::new(gazetteer(), lexicon())
}

pub fn case_study_articles() -> Vec<ArticleRecord> {
    read_corpus(CASE_STUDY_CORPUS.as_bytes()).expect("shipped corpus parses")
}

/// The case-study corpus ingested with the shipped extractor.
pub fn case_study_graph() -> KnowledgeGraph {
    let ex = extractor();
    let mut g = KnowledgeGraph::new();
    for a in case_study_articles() {
        ingest_article(&mut g, &a, &ex).expect("fixture ingests");
    }
    g
}
