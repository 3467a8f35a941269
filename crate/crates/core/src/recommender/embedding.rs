use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Hyperparams, RecommendError};
use crate::kg::EntityId;

pub const EMBEDDING_SCHEMA_VERSION: u32 = 1;

/// Dense row-major table with one row per entity id `0..n_rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    data: Vec<f64>,
    hyperparams: Option<Hyperparams>,
}

/// First line of an embedding file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingHeader {
    pub schema_version: u32,
    pub dim: usize,
    pub n_rows: usize,
    pub seed: Option<u64>,
    pub hyperparams: Option<Hyperparams>,
}

#[derive(Serialize, Deserialize)]
struct RowRecord {
    entity_id: EntityId,
    vector: Vec<f64>,
}

impl EmbeddingTable {
    pub fn zeros(n_rows: usize, dim: usize) -> Self {
        EmbeddingTable { dim, data: vec![0.0; n_rows * dim], hyperparams: None }
    }

    /// Each component drawn from Uniform(−scale, scale), rows in id order.
    pub fn random<R: Rng>(n_rows: usize, dim: usize, scale: f64, rng: &mut R) -> Self {
        let data = (0..n_rows * dim).map(|_| rng.gen_range(-scale..scale)).collect();
        EmbeddingTable { dim, data, hyperparams: None }
    }

    pub fn from_rows(dim: usize, rows: Vec<Vec<f64>>) -> Result<Self, RecommendError> {
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(RecommendError::DimMismatch { expected: dim, got: row.len() });
            }
            data.extend(row);
        }
        Ok(EmbeddingTable { dim, data, hyperparams: None })
    }

    pub fn with_hyperparams(mut self, hp: Hyperparams) -> Self {
        self.hyperparams = Some(hp);
        self
    }

    pub fn hyperparams(&self) -> Option<&Hyperparams> {
        self.hyperparams.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rows(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn has_row(&self, id: EntityId) -> bool {
        id.index() < self.n_rows()
    }

    pub fn row(&self, id: EntityId) -> Result<&[f64], RecommendError> {
        if !self.has_row(id) {
            return Err(RecommendError::UnknownEntity(id));
        }
        let at = id.index() * self.dim;
        Ok(&self.data[at..at + self.dim])
    }

    pub fn row_mut(&mut self, id: EntityId) -> Result<&mut [f64], RecommendError> {
        if !self.has_row(id) {
            return Err(RecommendError::UnknownEntity(id));
        }
        let at = id.index() * self.dim;
        Ok(&mut self.data[at..at + self.dim])
    }

    /// Sum of squared components over all rows.
    pub fn sq_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn header(&self) -> EmbeddingHeader {
        EmbeddingHeader {
            schema_version: EMBEDDING_SCHEMA_VERSION,
            dim: self.dim,
            n_rows: self.n_rows(),
            seed: self.hyperparams.map(|hp| hp.seed),
            hyperparams: self.hyperparams,
        }
    }

    /// JSONL: a header line, then `{entity_id, vector}` per row. Floats are
    /// written in shortest round-trip form, so loading is bit-exact.
    pub fn write_to<W: Write>(&self, w: W) -> Result<(), RecommendError> {
        if !self.is_finite() {
            return Err(RecommendError::CorruptEmbeddings("table contains non-finite values".into()));
        }
        let mut w = BufWriter::new(w);
        let json = |e: serde_json::Error| RecommendError::Io(e.into());
        serde_json::to_writer(&mut w, &self.header()).map_err(json)?;
        w.write_all(b"\n")?;
        for i in 0..self.n_rows() {
            let id = EntityId(i as u32);
            let rec = RowRecord { entity_id: id, vector: self.row(id)?.to_vec() };
            serde_json::to_writer(&mut w, &rec).map_err(json)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RecommendError> {
        self.write_to(File::create(path)?)
    }

    pub fn read_from<R: std::io::Read>(r: R) -> Result<Self, RecommendError> {
        let corrupt = |m: String| RecommendError::CorruptEmbeddings(m);
        let mut lines = BufReader::new(r).lines();
        let header_line = lines.next().ok_or_else(|| corrupt("missing header".into()))??;
        let header: EmbeddingHeader = serde_json::from_str(&header_line).map_err(|e| corrupt(format!("header: {e}")))?;
        if header.schema_version != EMBEDDING_SCHEMA_VERSION {
            return Err(corrupt(format!("schema_version {}", header.schema_version)));
        }
        if header.dim == 0 {
            return Err(corrupt("dim must be positive".into()));
        }
        let mut data = Vec::with_capacity(header.n_rows * header.dim);
        let mut seen = 0usize;
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: RowRecord = serde_json::from_str(&line).map_err(|e| corrupt(format!("row {}: {e}", i + 1)))?;
            if rec.entity_id.index() != seen {
                return Err(corrupt(format!("expected entity_id {seen}, found {}", rec.entity_id)));
            }
            if rec.vector.len() != header.dim {
                return Err(RecommendError::DimMismatch { expected: header.dim, got: rec.vector.len() });
            }
            data.extend(rec.vector);
            seen += 1;
        }
        if seen != header.n_rows {
            return Err(corrupt(format!("header declares {} rows, found {seen}", header.n_rows)));
        }
        Ok(EmbeddingTable { dim: header.dim, data, hyperparams: header.hyperparams })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RecommendError> {
        Self::read_from(File::open(path)?)
    }
}
