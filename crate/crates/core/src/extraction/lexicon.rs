use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use thiserror::Error;

use super::tokenize;
use crate::kg::TermType;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name} line {line}: {message}")]
    Parse { source_name: String, line: usize, message: String },
}

fn parse_tsv<R: Read>(reader: R, source_name: &str, mut each: impl FnMut(&str, &str) -> Result<(), String>) -> Result<(), LexiconError> {
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let parse_err = |message: String| LexiconError::Parse { source_name: source_name.to_owned(), line: i + 1, message };
        let line = line.map_err(|e| parse_err(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('\t').ok_or_else(|| parse_err("expected two tab-separated columns".into()))?;
        each(key, value.trim()).map_err(parse_err)?;
    }
    Ok(())
}

fn open(path: &Path) -> Result<File, LexiconError> {
    File::open(path).map_err(|source| LexiconError::Io { path: path.display().to_string(), source })
}

/// Dictionary of known terms keyed by their normalized token sequence.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: HashMap<String, TermType>,
    max_tokens: usize,
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a term; the key is normalized with the same tokenizer used on
    /// abstracts so that multiword keys line up with token n-grams.
    /// Returns false for keys that normalize to nothing.
    pub fn insert(&mut self, term: &str, term_type: TermType) -> bool {
        let tokens = tokenize(term).normalized;
        if tokens.is_empty() {
            return false;
        }
        self.max_tokens = self.max_tokens.max(tokens.len());
        self.entries.insert(tokens.join(" "), term_type);
        true
    }

    pub fn get(&self, key: &str) -> Option<TermType> {
        self.entries.get(key).copied()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest key, in tokens.
    pub fn max_tokens(&self) -> usize {
        self.max_tokens
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Parses `term<TAB>type` lines. Blank lines and `#` comments are skipped.
    pub fn from_tsv<R: Read>(reader: R, source_name: &str) -> Result<Self, LexiconError> {
        let mut g = Gazetteer::new();
        parse_tsv(reader, source_name, |term, ty| {
            let ty: TermType = ty.parse()?;
            if g.insert(term, ty) {
                Ok(())
            } else {
                Err(format!("term {term:?} is empty after normalization"))
            }
        })?;
        Ok(g)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        Self::from_tsv(open(path)?, &path.display().to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Verb,
    Prep,
    Det,
    Noun,
    Adj,
    Other,
}

impl std::str::FromStr for PosTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "VERB" => Ok(PosTag::Verb),
            "PREP" => Ok(PosTag::Prep),
            "DET" => Ok(PosTag::Det),
            "NOUN" => Ok(PosTag::Noun),
            "ADJ" => Ok(PosTag::Adj),
            "OTHER" => Ok(PosTag::Other),
            other => Err(format!("unknown POS tag {other:?}")),
        }
    }
}

/// Token to part-of-speech lookup. Unknown tokens are [`PosTag::Other`].
#[derive(Debug, Clone, Default)]
pub struct PosLexicon {
    entries: HashMap<String, PosTag>,
}

impl PosLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: &str, tag: PosTag) {
        self.entries.insert(token.trim().to_lowercase(), tag);
    }

    pub fn tag(&self, token: &str) -> PosTag {
        self.entries.get(token).copied().unwrap_or(PosTag::Other)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `token<TAB>tag` lines.
    pub fn from_tsv<R: Read>(reader: R, source_name: &str) -> Result<Self, LexiconError> {
        let mut lex = PosLexicon::new();
        parse_tsv(reader, source_name, |token, tag| {
            if token.trim().is_empty() {
                return Err("empty token".into());
            }
            lex.insert(token, tag.parse()?);
            Ok(())
        })?;
        Ok(lex)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        Self::from_tsv(open(path)?, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gazetteer_keys_are_token_normalized() {
        let g = Gazetteer::from_tsv("Alzheimer's  Disease\tdisease\n# comment\n\nApoE4\tgene\n".as_bytes(), "t").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.get("alzheimer's disease"), Some(TermType::Disease));
        assert_eq!(g.max_tokens(), 2);
    }

    #[test]
    fn gazetteer_rejects_bad_lines() {
        let err = Gazetteer::from_tsv("ok\tgene\nbroken line\n".as_bytes(), "g.tsv").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { line: 2, .. }));
        assert!(Gazetteer::from_tsv("x\tprotein\n".as_bytes(), "g").is_err());
        assert!(Gazetteer::from_tsv("...\tgene\n".as_bytes(), "g").is_err());
    }

    #[test]
    fn lexicon_lookup_defaults_to_other() {
        let lex = PosLexicon::from_tsv("is\tVERB\nfor\tprep\n".as_bytes(), "l").unwrap();
        assert_eq!(lex.tag("is"), PosTag::Verb);
        assert_eq!(lex.tag("for"), PosTag::Prep);
        assert_eq!(lex.tag("factor"), PosTag::Other);
        assert!(PosLexicon::from_tsv("is\tVRB\n".as_bytes(), "l").is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(Gazetteer::from_path("/nonexistent/g.tsv"), Err(LexiconError::Io { .. })));
    }
}
