//! Directory-backed persistence: three JSONL tables plus `meta.json`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{ArticleRecord, Entity, EntityId, EntityKind, GraphError, KnowledgeGraph, Triplet};

pub const SCHEMA_VERSION: u32 = 1;

const ENTITIES: &str = "entities.jsonl";
const ARTICLES: &str = "articles.jsonl";
const TRIPLETS: &str = "triplets.jsonl";
const META: &str = "meta.json";

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    schema_version: u32,
    /// Highest assigned entity id; `null` for an empty graph.
    max_id: Option<u32>,
}

fn write_atomic(dir: &Path, name: &str, fill: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), GraphError> {
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        fill(&mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp, dir.join(name))?;
    Ok(())
}

fn write_jsonl<T: Serialize>(w: &mut impl Write, rows: impl IntoIterator<Item = T>) -> std::io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut *w, &row)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, GraphError> {
    let file = File::open(path)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| GraphError::CorruptStore(format!("{name} line {}: {e}", i + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

fn corrupt(msg: impl Into<String>) -> GraphError {
    GraphError::CorruptStore(msg.into())
}

impl KnowledgeGraph {
    /// Whether `dir` holds a saved graph.
    pub fn store_exists(dir: impl AsRef<Path>) -> bool {
        dir.as_ref().join(META).is_file()
    }

    /// Writes the graph into `dir`, creating it if needed. Each file is
    /// replaced by rename, with `meta.json` written last.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), GraphError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        write_atomic(dir, ENTITIES, |w| write_jsonl(w, &self.entities))?;
        write_atomic(dir, ARTICLES, |w| write_jsonl(w, self.articles.values()))?;
        write_atomic(dir, TRIPLETS, |w| write_jsonl(w, &self.triplets))?;
        let meta = Meta { schema_version: SCHEMA_VERSION, max_id: self.entities.last().map(|e| e.id.0) };
        write_atomic(dir, META, |w| {
            serde_json::to_writer_pretty(&mut *w, &meta)?;
            w.write_all(b"\n")
        })
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, GraphError> {
        let dir = dir.as_ref();
        let meta: Meta =
            serde_json::from_reader(BufReader::new(File::open(dir.join(META))?)).map_err(|e| corrupt(format!("{META}: {e}")))?;
        if meta.schema_version != SCHEMA_VERSION {
            return Err(corrupt(format!("schema_version {} (expected {SCHEMA_VERSION})", meta.schema_version)));
        }
        let entities: Vec<Entity> = read_jsonl(&dir.join(ENTITIES))?;
        let articles: Vec<ArticleRecord> = read_jsonl(&dir.join(ARTICLES))?;
        let triplets: Vec<Triplet> = read_jsonl(&dir.join(TRIPLETS))?;

        if meta.max_id != entities.last().map(|e| e.id.0) {
            return Err(corrupt(format!("max_id {:?} does not match entity table", meta.max_id)));
        }

        let mut g = KnowledgeGraph::new();
        for (i, e) in entities.into_iter().enumerate() {
            if e.id.index() != i {
                return Err(corrupt(format!("entity ids are not dense: found {} at row {i}", e.id)));
            }
            let index = match e.kind {
                EntityKind::Term => {
                    if e.term_type.is_none() {
                        return Err(corrupt(format!("term {} has no term_type", e.id)));
                    }
                    &mut g.term_index
                }
                EntityKind::Article => {
                    if e.term_type.is_some() {
                        return Err(corrupt(format!("article {} carries a term_type", e.id)));
                    }
                    &mut g.article_index
                }
            };
            if e.canonical_name.is_empty() || index.insert(e.canonical_name.clone(), e.id).is_some() {
                return Err(corrupt(format!("duplicate or empty canonical name {:?}", e.canonical_name)));
            }
            g.entities.push(e);
            g.outgoing.push(Vec::new());
            g.incoming.push(Vec::new());
        }

        for record in articles {
            let id = *g
                .article_index
                .get(&record.pmid)
                .ok_or_else(|| corrupt(format!("article record {} has no article entity", record.pmid)))?;
            if g.articles.insert(id, record).is_some() {
                return Err(corrupt(format!("duplicate article record for entity {id}")));
            }
        }
        if g.articles.len() != g.article_index.len() {
            return Err(corrupt("article entity without an article record"));
        }

        for t in &triplets {
            for end in [t.head, t.tail] {
                if end.index() >= g.entities.len() {
                    return Err(corrupt(format!("triplet endpoint {end} does not exist")));
                }
            }
            if t.head == t.tail {
                return Err(corrupt(format!("self loop on {}", t.head)));
            }
            if t.relation.is_empty() || t.provenance.is_empty() {
                return Err(corrupt(format!("triplet {} -> {} has empty relation or provenance", t.head, t.tail)));
            }
        }
        g.triplets = triplets;
        g.rebuild_edge_indexes();
        if g.edge_index.len() != g.triplets.len() {
            return Err(corrupt("duplicate (head, relation, tail) triplets"));
        }
        Ok(g)
    }

    /// Id the next created entity will receive.
    pub fn next_id(&self) -> EntityId {
        EntityId(self.entities.len() as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{Provenance, TermType};

    fn sample() -> KnowledgeGraph {
        let mut g = KnowledgeGraph::new();
        let a = g.upsert_article(ArticleRecord::new("28474569", "Title", "Abstract text.")).unwrap();
        let t = g.upsert_term("ApoE4", TermType::Gene).unwrap();
        let d = g.upsert_term("Alzheimer's disease", TermType::Disease).unwrap();
        g.add_triplet(a, "mentions", t, Provenance::new("28474569", 0)).unwrap();
        g.add_triplet(t, "is for", d, Provenance::new("28474569", 0)).unwrap();
        g.add_triplet(t, "is for", d, Provenance::new("28474569", 3)).unwrap();
        g
    }

    #[test]
    fn empty_graph_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        assert!(!KnowledgeGraph::store_exists(dir.path()));
        KnowledgeGraph::new().save(dir.path()).unwrap();
        assert!(KnowledgeGraph::store_exists(dir.path()));
        let g = KnowledgeGraph::load(dir.path()).unwrap();
        assert_eq!(g, KnowledgeGraph::new());
        assert_eq!(g.stats().n_triplets, 0);
    }

    #[test]
    fn populated_graph_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let g = sample();
        g.save(dir.path()).unwrap();
        let back = KnowledgeGraph::load(dir.path()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.next_id(), g.next_id());
        assert_eq!(back.term_by_name("apoe4"), g.term_by_name("APOE4"));
        assert_eq!(back.find_entities("apo", 5), g.find_entities("apo", 5));
    }

    #[test]
    fn entity_lines_use_documented_field_names() {
        let dir = tempfile::tempdir().unwrap();
        sample().save(dir.path()).unwrap();
        let first = fs::read_to_string(dir.path().join(ENTITIES)).unwrap();
        let v: serde_json::Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["canonical_name", "display_name", "id", "kind", "term_type"]);
        let trip = fs::read_to_string(dir.path().join(TRIPLETS)).unwrap();
        let v: serde_json::Value = serde_json::from_str(trip.lines().next().unwrap()).unwrap();
        assert_eq!(v["provenance"][0]["sentence"], 0);
        assert_eq!(v["provenance"][0]["pmid"], "28474569");
        let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join(META)).unwrap()).unwrap();
        assert_eq!(meta["schema_version"], 1);
        assert_eq!(meta["max_id"], 2);
    }

    #[test]
    fn dangling_endpoint_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        sample().save(dir.path()).unwrap();
        fs::write(
            dir.path().join(TRIPLETS),
            "{\"head\":0,\"relation\":\"mentions\",\"tail\":42,\"provenance\":[{\"pmid\":\"1\",\"sentence\":0}]}\n",
        )
        .unwrap();
        assert!(matches!(KnowledgeGraph::load(dir.path()), Err(GraphError::CorruptStore(_))));
    }

    #[test]
    fn schema_mismatch_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        sample().save(dir.path()).unwrap();
        fs::write(dir.path().join(META), "{\"schema_version\":2,\"max_id\":2}").unwrap();
        assert!(matches!(KnowledgeGraph::load(dir.path()), Err(GraphError::CorruptStore(_))));
    }

    #[test]
    fn missing_store_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(KnowledgeGraph::load(dir.path().join("nope")), Err(GraphError::Io(_))));
    }
}
