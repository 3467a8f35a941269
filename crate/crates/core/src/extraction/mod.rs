//! Abstract-to-triplet pipeline.
//!
//! Sentences are split on terminal punctuation, tokenized, scanned for
//! gazetteer terms (greedy longest match), and every pair of consecutive
//! mentions in a sentence is linked by the verbs and prepositions between
//! them. Each article additionally gets a `mentions` edge to every term its
//! abstract contains.

mod corpus;
mod lexicon;

use std::collections::HashMap;

pub use corpus::{read_corpus, CorpusError};
pub use lexicon::{Gazetteer, LexiconError, PosLexicon, PosTag};

use crate::kg::{ArticleRecord, EntityId, GraphError, KnowledgeGraph, Provenance, TermType};
use crate::MENTIONS;

pub const DEFAULT_MAX_GAP: usize = 10;

/// Splits at `.`, `?` or `!` when followed by whitespace and an uppercase
/// letter, or by the end of the text.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    for (k, &(at, c)) in chars.iter().enumerate() {
        if !matches!(c, '.' | '?' | '!') {
            continue;
        }
        let mut j = k + 1;
        let boundary = if j == chars.len() {
            true
        } else if chars[j].1.is_whitespace() {
            while j < chars.len() && chars[j].1.is_whitespace() {
                j += 1;
            }
            j == chars.len() || chars[j].1.is_uppercase()
        } else {
            false
        };
        if boundary {
            let seg = text[start..at].trim();
            if !seg.is_empty() {
                sentences.push(seg.to_owned());
            }
            start = at + c.len_utf8();
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        sentences.push(tail.to_owned());
    }
    sentences
}

/// Lowercased tokens for matching, with the original spelling alongside.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tokens {
    pub normalized: Vec<String>,
    pub display: Vec<String>,
}

impl Tokens {
    pub fn len(&self) -> usize {
        self.normalized.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normalized.is_empty()
    }
}

/// Whitespace split with leading/trailing punctuation stripped; internal
/// hyphens and apostrophes survive.
pub fn tokenize(sentence: &str) -> Tokens {
    let mut tokens = Tokens::default();
    for word in sentence.split_whitespace() {
        let word = word.trim_matches(|c: char| !c.is_alphanumeric());
        if word.is_empty() {
            continue;
        }
        tokens.normalized.push(word.to_lowercase());
        tokens.display.push(word.to_owned());
    }
    tokens
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    pub term_canonical: String,
    /// Token span `[start, end)`.
    pub start: usize,
    pub end: usize,
    pub sentence_index: usize,
}

/// Greedy left-to-right longest match of gazetteer keys over token n-grams.
pub fn find_mentions(tokens: &[String], gazetteer: &Gazetteer, sentence_index: usize) -> Vec<Mention> {
    let mut mentions = Vec::new();
    let mut i = 0;
    'outer: while i < tokens.len() {
        let longest = gazetteer.max_tokens().min(tokens.len() - i);
        for len in (1..=longest).rev() {
            let key = tokens[i..i + len].join(" ");
            if gazetteer.contains(&key) {
                mentions.push(Mention { term_canonical: key, start: i, end: i + len, sentence_index });
                i += len;
                continue 'outer;
            }
        }
        i += 1;
    }
    mentions
}

/// Verbs and prepositions strictly between two mentions, space-joined.
pub fn extract_relation(tokens: &[String], first: &Mention, second: &Mention, lexicon: &PosLexicon, max_gap: usize) -> Option<String> {
    if second.start < first.end || second.start - first.end > max_gap {
        return None;
    }
    let words: Vec<&str> = tokens[first.end..second.start]
        .iter()
        .map(String::as_str)
        .filter(|t| matches!(lexicon.tag(t), PosTag::Verb | PosTag::Prep))
        .collect();
    if words.is_empty() {
        None
    } else {
        Some(words.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeSpec {
    Article(String),
    Term { canonical: String, display: String, term_type: TermType },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripletSpec {
    pub head: NodeSpec,
    pub relation: String,
    pub tail: NodeSpec,
    pub sentence: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub mentions: Vec<Mention>,
    pub triplets: Vec<TripletSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestCounts {
    pub mentions: usize,
    pub triplets: usize,
}

/// Gazetteer + lexicon bundle applied to whole articles.
#[derive(Debug, Clone, Default)]
pub struct Extractor {
    pub gazetteer: Gazetteer,
    pub lexicon: PosLexicon,
    pub max_gap: usize,
}

impl Extractor {
    pub fn new(gazetteer: Gazetteer, lexicon: PosLexicon) -> Self {
        Extractor { gazetteer, lexicon, max_gap: DEFAULT_MAX_GAP }
    }

    pub fn with_max_gap(mut self, max_gap: usize) -> Self {
        self.max_gap = max_gap;
        self
    }

    /// Relation triplets in sentence order, followed by one `mentions`
    /// triplet per distinct term (in order of first appearance).
    pub fn extract(&self, article: &ArticleRecord) -> Extraction {
        let mut out = Extraction::default();
        let mut first_seen: Vec<(String, usize)> = Vec::new();
        let mut display: HashMap<String, String> = HashMap::new();
        let term = |canonical: &str, display: &HashMap<String, String>| NodeSpec::Term {
            canonical: canonical.to_owned(),
            display: display[canonical].clone(),
            term_type: self.gazetteer.get(canonical).unwrap_or(TermType::Other),
        };

        for (si, sentence) in split_sentences(&article.abstract_text).iter().enumerate() {
            let tokens = tokenize(sentence);
            let mentions = find_mentions(&tokens.normalized, &self.gazetteer, si);
            for m in &mentions {
                if !display.contains_key(&m.term_canonical) {
                    display.insert(m.term_canonical.clone(), tokens.display[m.start..m.end].join(" "));
                    first_seen.push((m.term_canonical.clone(), si));
                }
            }
            for pair in mentions.windows(2) {
                let (a, b) = (&pair[0], &pair[1]);
                if a.term_canonical == b.term_canonical {
                    continue;
                }
                if let Some(relation) = extract_relation(&tokens.normalized, a, b, &self.lexicon, self.max_gap) {
                    out.triplets.push(TripletSpec {
                        head: term(&a.term_canonical, &display),
                        relation,
                        tail: term(&b.term_canonical, &display),
                        sentence: si,
                    });
                }
            }
            out.mentions.extend(mentions);
        }

        for (canonical, si) in &first_seen {
            out.triplets.push(TripletSpec {
                head: NodeSpec::Article(article.pmid.clone()),
                relation: MENTIONS.to_owned(),
                tail: term(canonical, &display),
                sentence: *si,
            });
        }
        out
    }
}

fn lookup(graph: &KnowledgeGraph, node: &NodeSpec) -> Option<EntityId> {
    match node {
        NodeSpec::Article(pmid) => graph.article_by_pmid(pmid).map(|(id, _)| id),
        NodeSpec::Term { canonical, .. } => graph.term_by_name(canonical),
    }
}

/// True when the graph already holds exactly this article record and
/// exactly this extraction's provenance for its pmid.
fn already_ingested(graph: &KnowledgeGraph, article: &ArticleRecord, extraction: &Extraction) -> bool {
    match graph.article_by_pmid(&article.pmid) {
        Some((_, existing)) if existing == article => {}
        _ => return false,
    }
    let mut wanted = Vec::with_capacity(extraction.triplets.len());
    for spec in &extraction.triplets {
        match (lookup(graph, &spec.head), lookup(graph, &spec.tail)) {
            (Some(h), Some(t)) => wanted.push((h, spec.relation.clone(), t, spec.sentence)),
            _ => return false,
        }
    }
    let mut present: Vec<_> = graph
        .triplets()
        .iter()
        .flat_map(|t| t.provenance.iter().filter(|p| p.pmid == article.pmid).map(move |p| (t.head, t.relation.clone(), t.tail, p.sentence)))
        .collect();
    wanted.sort();
    wanted.dedup();
    present.sort();
    wanted == present
}

/// Upserts the article and materializes its extraction. Re-ingesting an
/// unchanged article leaves the graph untouched.
pub fn ingest_article(graph: &mut KnowledgeGraph, article: &ArticleRecord, extractor: &Extractor) -> Result<IngestCounts, GraphError> {
    let extraction = extractor.extract(article);
    let counts = IngestCounts { mentions: extraction.mentions.len(), triplets: extraction.triplets.len() };
    if already_ingested(graph, article, &extraction) {
        return Ok(counts);
    }
    let article_id = graph.upsert_article(article.clone())?;
    let resolve = |graph: &mut KnowledgeGraph, node: &NodeSpec| -> Result<EntityId, GraphError> {
        match node {
            NodeSpec::Article(_) => Ok(article_id),
            NodeSpec::Term { display, term_type, .. } => graph.upsert_term(display, *term_type),
        }
    };
    for spec in &extraction.triplets {
        let head = resolve(graph, &spec.head)?;
        let tail = resolve(graph, &spec.tail)?;
        graph.add_triplet(head, &spec.relation, tail, Provenance::new(article.pmid.clone(), spec.sentence))?;
    }
    Ok(counts)
}
