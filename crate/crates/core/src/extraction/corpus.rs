use std::io::{BufRead, BufReader, Read};

use thiserror::Error;

use crate::kg::{is_valid_pmid, ArticleRecord};

#[derive(Debug, Error)]
#[error("corpus line {line}: {message}")]
pub struct CorpusError {
    /// 1-based.
    pub line: usize,
    pub message: String,
}

/// Reads a JSONL corpus of `{"pmid", "title", "abstract"}` objects, skipping
/// blank lines. Fails on the first malformed line.
pub fn read_corpus<R: Read>(reader: R) -> Result<Vec<ArticleRecord>, CorpusError> {
    let mut records = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let err = |message: String| CorpusError { line: i + 1, message };
        let line = line.map_err(|e| err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ArticleRecord = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        if !is_valid_pmid(&record.pmid) {
            return Err(err(format!("malformed pmid {:?}", record.pmid)));
        }
        records.push(record);
    }
    Ok(records)
}
