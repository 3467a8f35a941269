use std::collections::BTreeSet;

use litgraph_core::extraction::{
    extract_relation, find_mentions, ingest_article, split_sentences, tokenize, Extractor, NodeSpec, TripletSpec, DEFAULT_MAX_GAP,
};
use litgraph_core::fixtures::{self, CASE_STUDY_PMIDS};
use litgraph_core::{ArticleRecord, EntityKind, Gazetteer, KnowledgeGraph, PosLexicon, PosTag, TermType, MENTIONS};
use proptest::prelude::*;

const BASE_TERMS: &[&str] = &["apoe4", "amyloid beta", "tau", "brain", "alzheimer's disease", "neurons"];
const EXTRA_TERMS: &[&str] = &["microglia", "synaptic loss", "insulin"];
const VERBS: &[&str] = &["is", "reduces", "binds", "causes"];
const PREPS: &[&str] = &["in", "of", "for", "with"];
const FILLER: &[&str] = &["the", "a", "strongly", "patients", "cultured", "and", "very"];

fn lexicon() -> PosLexicon {
    let mut tsv = String::new();
    for v in VERBS {
        tsv.push_str(&format!("{v}\tVERB\n"));
    }
    for p in PREPS {
        tsv.push_str(&format!("{p}\tPREP\n"));
    }
    tsv.push_str("the\tDET\na\tDET\npatients\tNOUN\ncultured\tADJ\n");
    PosLexicon::from_tsv(tsv.as_bytes(), "test").unwrap()
}

fn gazetteer(terms: &[&str]) -> Gazetteer {
    let tsv: String = terms.iter().map(|t| format!("{t}\tOTHER\n")).collect();
    Gazetteer::from_tsv(tsv.as_bytes(), "test").unwrap()
}

fn word() -> impl Strategy<Value = String> {
    let pool: Vec<&'static str> = BASE_TERMS.iter().chain(EXTRA_TERMS).chain(VERBS).chain(PREPS).chain(FILLER).copied().collect();
    prop::sample::select(pool).prop_map(str::to_owned)
}

fn sentence() -> impl Strategy<Value = String> {
    prop::collection::vec(word(), 1..14).prop_map(|words| {
        let mut s = words.join(" ");
        if let Some(first) = s.get(0..1) {
            s.replace_range(0..1, &first.to_uppercase());
        }
        s.push('.');
        s
    })
}

fn abstract_text() -> impl Strategy<Value = String> {
    prop::collection::vec(sentence(), 1..5).prop_map(|s| s.join(" "))
}

fn record(text: &str) -> ArticleRecord {
    ArticleRecord::new("42", "t", text)
}

fn term_name(node: &NodeSpec) -> Option<&str> {
    match node {
        NodeSpec::Term { canonical, .. } => Some(canonical),
        NodeSpec::Article(_) => None,
    }
}

fn term_triplets(triplets: &[TripletSpec]) -> Vec<(String, String, String, usize)> {
    triplets
        .iter()
        .filter(|t| t.relation != MENTIONS)
        .map(|t| (term_name(&t.head).unwrap().to_owned(), t.relation.clone(), term_name(&t.tail).unwrap().to_owned(), t.sentence))
        .collect()
}

proptest! {
    #[test]
    fn extraction_is_pure(text in abstract_text()) {
        let ex = Extractor::new(gazetteer(BASE_TERMS), lexicon());
        let a = ex.extract(&record(&text));
        let b = ex.clone().extract(&record(&text));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn relation_tokens_retag_as_verb_or_prep(text in abstract_text()) {
        let lex = lexicon();
        let ex = Extractor::new(gazetteer(BASE_TERMS), lex.clone());
        for t in ex.extract(&record(&text)).triplets {
            if t.relation == MENTIONS {
                continue;
            }
            prop_assert_ne!(term_name(&t.head), term_name(&t.tail));
            for token in t.relation.split(' ') {
                prop_assert!(matches!(lex.tag(token), PosTag::Verb | PosTag::Prep), "{token}");
            }
        }
    }

    #[test]
    fn mentions_never_overlap(text in abstract_text()) {
        let g = gazetteer(BASE_TERMS);
        for (si, s) in split_sentences(&text).iter().enumerate() {
            let tokens = tokenize(s);
            let ms = find_mentions(&tokens.normalized, &g, si);
            for m in &ms {
                prop_assert!(m.start < m.end && m.end <= tokens.len());
                prop_assert!(g.contains(&m.term_canonical));
            }
            for pair in ms.windows(2) {
                prop_assert!(pair[0].end <= pair[1].start);
            }
        }
    }

    #[test]
    fn ingestion_leaves_no_orphan_terms(texts in prop::collection::vec(abstract_text(), 1..6)) {
        let ex = Extractor::new(gazetteer(BASE_TERMS), lexicon());
        let mut graph = KnowledgeGraph::new();
        for (i, text) in texts.iter().enumerate() {
            ingest_article(&mut graph, &ArticleRecord::new((i + 1).to_string(), "", text.as_str()), &ex).unwrap();
        }
        for e in graph.entities().iter().filter(|e| e.kind == EntityKind::Term) {
            let reached = graph.triplets().iter().any(|t| {
                t.relation == MENTIONS && t.tail == e.id && graph.entity(t.head).unwrap().kind == EntityKind::Article
            });
            prop_assert!(reached, "orphan term {}", e.canonical_name);
        }
    }

    #[test]
    fn ingestion_is_idempotent(text in abstract_text()) {
        let ex = Extractor::new(gazetteer(BASE_TERMS), lexicon());
        let mut graph = KnowledgeGraph::new();
        ingest_article(&mut graph, &record(&text), &ex).unwrap();
        let once = graph.clone();
        ingest_article(&mut graph, &record(&text), &ex).unwrap();
        prop_assert_eq!(graph, once);
    }

    /// Growing the gazetteer keeps every old term-term triplet whose two
    /// mentions survive unchanged with no new mention between them.
    #[test]
    fn triplets_are_monotone_in_gazetteer(text in abstract_text()) {
        let small = gazetteer(BASE_TERMS);
        let all: Vec<&str> = BASE_TERMS.iter().chain(EXTRA_TERMS).copied().collect();
        let large = gazetteer(&all);
        let lex = lexicon();
        let before: BTreeSet<_> = term_triplets(&Extractor::new(small.clone(), lex.clone()).extract(&record(&text)).triplets).into_iter().collect();
        let after: BTreeSet<_> = term_triplets(&Extractor::new(large.clone(), lex.clone()).extract(&record(&text)).triplets).into_iter().collect();

        for (si, s) in split_sentences(&text).iter().enumerate() {
            let tokens = tokenize(s);
            let old = find_mentions(&tokens.normalized, &small, si);
            let new = find_mentions(&tokens.normalized, &large, si);
            for pair in old.windows(2) {
                let (a, b) = (&pair[0], &pair[1]);
                let kept = new.contains(a) && new.contains(b) && !new.iter().any(|m| m.start >= a.end && m.end <= b.start);
                if !kept {
                    continue;
                }
                if a.term_canonical == b.term_canonical {
                    continue;
                }
                if let Some(rel) = extract_relation(&tokens.normalized, a, b, &lex, DEFAULT_MAX_GAP) {
                    let t = (a.term_canonical.clone(), rel, b.term_canonical.clone(), si);
                    prop_assert!(before.contains(&t));
                    prop_assert!(after.contains(&t), "lost {t:?}");
                }
            }
        }
    }
}

#[test]
fn case_study_fixture_yields_expected_triplets() {
    let g = fixtures::case_study_graph();
    let id = |name: &str| g.term_by_name(name).unwrap_or_else(|| panic!("missing term {name}"));
    let apoe4 = id("apoe4");
    let ad = id("alzheimer's disease");
    let nd = id("neurodegenerative disorder");
    assert!(g.triplet_index(apoe4, "is for", ad).is_some());
    assert!(g.triplet_index(ad, "is", nd).is_some());

    let again = fixtures::case_study_graph();
    assert_eq!(g, again);
    assert_eq!(g.stats().n_articles, 3);
    for pmid in CASE_STUDY_PMIDS {
        let (art, _) = g.article_by_pmid(pmid).unwrap();
        assert!(g.mentioned_terms(art).contains(&ad), "{pmid} does not mention the disease");
    }
    assert_eq!(g.entity(ad).unwrap().term_type, Some(TermType::Disease));
}

#[test]
fn shipped_tables_parse() {
    let g = fixtures::gazetteer();
    assert!(g.contains("alzheimer's disease"));
    assert!(g.contains("amyloid beta"));
    assert!(!g.contains("alzheimer"));
    let lex = fixtures::lexicon();
    assert_eq!(lex.tag("is"), PosTag::Verb);
    assert_eq!(lex.tag("for"), PosTag::Prep);
    assert_eq!(lex.tag("factor"), PosTag::Noun);
}
