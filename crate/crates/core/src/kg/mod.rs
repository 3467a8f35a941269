//! In-memory knowledge graph: entity table, deduplicated triplets with
//! provenance, adjacency indexes, name search and ego-subgraph retrieval.

mod store;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{collapse_whitespace, normalize};

pub use store::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Term,
    Article,
}

impl EntityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Term => "term",
            EntityKind::Article => "article",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermType {
    Disease,
    Gene,
    Drug,
    Chemical,
    Other,
}

impl TermType {
    pub fn as_str(self) -> &'static str {
        match self {
            TermType::Disease => "disease",
            TermType::Gene => "gene",
            TermType::Drug => "drug",
            TermType::Chemical => "chemical",
            TermType::Other => "other",
        }
    }
}

impl std::str::FromStr for TermType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "disease" => Ok(TermType::Disease),
            "gene" => Ok(TermType::Gene),
            "drug" => Ok(TermType::Drug),
            "chemical" => Ok(TermType::Chemical),
            "other" => Ok(TermType::Other),
            other => Err(format!("unknown term type {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: EntityId,
    pub kind: EntityKind,
    /// Lowercased, whitespace-collapsed; the PMID for articles.
    pub canonical_name: String,
    pub display_name: String,
    /// Always `None` for articles.
    pub term_type: Option<TermType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub pmid: String,
    #[serde(default)]
    pub title: String,
    #[serde(rename = "abstract", default)]
    pub abstract_text: String,
}

impl ArticleRecord {
    pub fn new(pmid: impl Into<String>, title: impl Into<String>, abstract_text: impl Into<String>) -> Self {
        ArticleRecord { pmid: pmid.into(), title: title.into(), abstract_text: abstract_text.into() }
    }
}

pub fn is_valid_pmid(pmid: &str) -> bool {
    !pmid.is_empty() && pmid.bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub pmid: String,
    pub sentence: usize,
}

impl Provenance {
    pub fn new(pmid: impl Into<String>, sentence: usize) -> Self {
        Provenance { pmid: pmid.into(), sentence }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triplet {
    pub head: EntityId,
    pub relation: String,
    pub tail: EntityId,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Outgoing,
    Incoming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub id: EntityId,
    /// 0 = exact, 1 = prefix, 2 = substring.
    pub tier: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subgraph {
    pub center: EntityId,
    pub nodes: Vec<Entity>,
    pub edges: Vec<Triplet>,
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphStats {
    pub n_terms: usize,
    pub n_articles: usize,
    pub n_triplets: usize,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("name is empty after normalization")]
    EmptyName,
    #[error("malformed pmid {0:?}: expected a non-empty string of digits")]
    BadPmid(String),
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("self loop on entity {0}")]
    SelfLoop(EntityId),
    #[error("relation is empty after normalization")]
    EmptyRelation,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt store: {0}")]
    CorruptStore(String),
}

/// Single-writer knowledge graph. Clone it to build a new snapshot off to
/// the side while readers keep using the old one.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    entities: Vec<Entity>,
    articles: BTreeMap<EntityId, ArticleRecord>,
    triplets: Vec<Triplet>,
    term_index: HashMap<String, EntityId>,
    article_index: HashMap<String, EntityId>,
    edge_index: HashMap<(EntityId, String, EntityId), usize>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

impl PartialEq for KnowledgeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.entities == other.entities && self.articles == other.articles && self.triplets == other.triplets
    }
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn push_entity(&mut self, kind: EntityKind, canonical_name: String, display_name: String, term_type: Option<TermType>) -> EntityId {
        let id = EntityId(u32::try_from(self.entities.len()).expect("entity id space exhausted"));
        self.entities.push(Entity { id, kind, canonical_name, display_name, term_type });
        self.outgoing.push(Vec::new());
        self.incoming.push(Vec::new());
        id
    }

    /// Returns the id of the term with this canonical name, creating it if
    /// absent. An existing entity keeps its original type and display name.
    pub fn upsert_term(&mut self, name: &str, term_type: TermType) -> Result<EntityId, GraphError> {
        let canonical = normalize(name);
        if canonical.is_empty() {
            return Err(GraphError::EmptyName);
        }
        if let Some(&id) = self.term_index.get(&canonical) {
            return Ok(id);
        }
        let id = self.push_entity(EntityKind::Term, canonical.clone(), collapse_whitespace(name), Some(term_type));
        self.term_index.insert(canonical, id);
        Ok(id)
    }

    /// Creates or replaces an article node. Replacing drops every provenance
    /// entry that points at this pmid, and with it every triplet left without
    /// provenance.
    pub fn upsert_article(&mut self, record: ArticleRecord) -> Result<EntityId, GraphError> {
        if !is_valid_pmid(&record.pmid) {
            return Err(GraphError::BadPmid(record.pmid));
        }
        if let Some(&id) = self.article_index.get(&record.pmid) {
            self.strip_provenance(&record.pmid);
            self.articles.insert(id, record);
            return Ok(id);
        }
        let pmid = record.pmid.clone();
        let id = self.push_entity(EntityKind::Article, pmid.clone(), pmid.clone(), None);
        self.article_index.insert(pmid, id);
        self.articles.insert(id, record);
        Ok(id)
    }

    fn strip_provenance(&mut self, pmid: &str) {
        let before = self.triplets.len();
        let mut touched = false;
        for t in &mut self.triplets {
            let n = t.provenance.len();
            t.provenance.retain(|p| p.pmid != pmid);
            touched |= n != t.provenance.len();
        }
        if !touched {
            return;
        }
        self.triplets.retain(|t| !t.provenance.is_empty());
        if self.triplets.len() != before {
            self.rebuild_edge_indexes();
        }
    }

    fn rebuild_edge_indexes(&mut self) {
        self.edge_index.clear();
        self.outgoing.iter_mut().for_each(Vec::clear);
        self.incoming.iter_mut().for_each(Vec::clear);
        for (i, t) in self.triplets.iter().enumerate() {
            self.edge_index.insert((t.head, t.relation.clone(), t.tail), i);
            self.outgoing[t.head.index()].push(i);
            self.incoming[t.tail.index()].push(i);
        }
    }

    /// Adds `(head, relation, tail)` once; repeated calls only append new
    /// provenance entries.
    pub fn add_triplet(&mut self, head: EntityId, relation: &str, tail: EntityId, provenance: Provenance) -> Result<(), GraphError> {
        self.check(head)?;
        self.check(tail)?;
        if head == tail {
            return Err(GraphError::SelfLoop(head));
        }
        let relation = normalize(relation);
        if relation.is_empty() {
            return Err(GraphError::EmptyRelation);
        }
        let key = (head, relation, tail);
        if let Some(&i) = self.edge_index.get(&key) {
            let t = &mut self.triplets[i];
            if !t.provenance.contains(&provenance) {
                t.provenance.push(provenance);
            }
            return Ok(());
        }
        let i = self.triplets.len();
        self.triplets.push(Triplet { head, relation: key.1.clone(), tail, provenance: vec![provenance] });
        self.edge_index.insert(key, i);
        self.outgoing[head.index()].push(i);
        self.incoming[tail.index()].push(i);
        Ok(())
    }

    fn check(&self, id: EntityId) -> Result<(), GraphError> {
        if id.index() < self.entities.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownEntity(id))
        }
    }

    pub fn entity(&self, id: EntityId) -> Option<&Entity> {
        self.entities.get(id.index())
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn article(&self, id: EntityId) -> Option<&ArticleRecord> {
        self.articles.get(&id)
    }

    pub fn article_by_pmid(&self, pmid: &str) -> Option<(EntityId, &ArticleRecord)> {
        let id = *self.article_index.get(pmid)?;
        Some((id, &self.articles[&id]))
    }

    pub fn articles(&self) -> impl Iterator<Item = (EntityId, &ArticleRecord)> {
        self.articles.iter().map(|(&id, r)| (id, r))
    }

    pub fn term_by_name(&self, name: &str) -> Option<EntityId> {
        self.term_index.get(&normalize(name)).copied()
    }

    pub fn triplet_index(&self, head: EntityId, relation: &str, tail: EntityId) -> Option<usize> {
        self.edge_index.get(&(head, relation.to_owned(), tail)).copied()
    }

    /// Entities whose canonical name matches the normalized query, best tier
    /// first, then by canonical name and id.
    pub fn find_entities(&self, query: &str, limit: usize) -> Vec<SearchHit> {
        let query = normalize(query);
        if query.is_empty() || limit == 0 {
            return Vec::new();
        }
        let mut hits: Vec<(u8, &str, EntityId)> = self
            .entities
            .iter()
            .filter_map(|e| {
                let name = e.canonical_name.as_str();
                let tier = if name == query {
                    0
                } else if name.starts_with(&query) {
                    1
                } else if name.contains(&query) {
                    2
                } else {
                    return None;
                };
                Some((tier, name, e.id))
            })
            .collect();
        hits.sort_unstable();
        hits.truncate(limit);
        hits.into_iter().map(|(tier, _, id)| SearchHit { id, tier }).collect()
    }

    /// Incident edges in triplet insertion order.
    pub fn neighbors(&self, id: EntityId) -> Result<Vec<(&Triplet, Direction)>, GraphError> {
        self.check(id)?;
        let mut incident: Vec<(usize, Direction)> = self.outgoing[id.index()]
            .iter()
            .map(|&i| (i, Direction::Outgoing))
            .chain(self.incoming[id.index()].iter().map(|&i| (i, Direction::Incoming)))
            .collect();
        incident.sort_unstable_by_key(|&(i, _)| i);
        Ok(incident.into_iter().map(|(i, d)| (&self.triplets[i], d)).collect())
    }

    /// Number of incident edges; 0 for unknown ids.
    pub fn degree(&self, id: EntityId) -> usize {
        self.outgoing.get(id.index()).map_or(0, Vec::len) + self.incoming.get(id.index()).map_or(0, Vec::len)
    }

    fn undirected_neighbors(&self, id: EntityId) -> impl Iterator<Item = EntityId> + '_ {
        self.outgoing[id.index()]
            .iter()
            .map(|&i| self.triplets[i].tail)
            .chain(self.incoming[id.index()].iter().map(|&i| self.triplets[i].head))
    }

    /// Terms linked from an article by a "mentions" edge, in edge order.
    pub fn mentioned_terms(&self, article: EntityId) -> Vec<EntityId> {
        self.outgoing
            .get(article.index())
            .into_iter()
            .flatten()
            .map(|&i| &self.triplets[i])
            .filter(|t| t.relation == crate::MENTIONS)
            .map(|t| t.tail)
            .collect()
    }

    /// Center first, then each BFS layer ordered by degree (descending) and id.
    fn bfs_order(&self, center: EntityId, radius: usize) -> Vec<EntityId> {
        let mut visited = vec![false; self.entities.len()];
        visited[center.index()] = true;
        let mut order = vec![center];
        let mut frontier = vec![center];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &u in &frontier {
                for v in self.undirected_neighbors(u) {
                    if !visited[v.index()] {
                        visited[v.index()] = true;
                        next.push(v);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable_by_key(|&v| (std::cmp::Reverse(self.degree(v)), v));
            order.extend_from_slice(&next);
            frontier = next;
        }
        order
    }

    /// Every entity within `radius` undirected hops of `center`, excluding it.
    pub fn within_hops(&self, center: EntityId, radius: usize) -> Result<Vec<EntityId>, GraphError> {
        self.check(center)?;
        let mut order = self.bfs_order(center, radius);
        order.remove(0);
        Ok(order)
    }

    /// Breadth-first ball of `radius` undirected hops around `center`.
    ///
    /// Nodes come out layer by layer, each layer ordered by degree
    /// (descending) then id. When the ball holds more than `max_nodes`
    /// nodes the tail of that ordering is cut and `truncated` is set.
    pub fn ego_subgraph(&self, center: EntityId, radius: usize, max_nodes: usize) -> Result<Subgraph, GraphError> {
        self.check(center)?;
        if radius == 0 {
            return Err(GraphError::InvalidParameter("radius must be at least 1"));
        }
        if max_nodes == 0 {
            return Err(GraphError::InvalidParameter("max_nodes must be at least 1"));
        }
        let mut order = self.bfs_order(center, radius);

        let truncated = order.len() > max_nodes;
        order.truncate(max_nodes);
        let mut kept = vec![false; self.entities.len()];
        for &v in &order {
            kept[v.index()] = true;
        }
        let mut edge_ids: Vec<usize> =
            order.iter().flat_map(|v| self.outgoing[v.index()].iter().copied()).filter(|&i| kept[self.triplets[i].tail.index()]).collect();
        edge_ids.sort_unstable();

        Ok(Subgraph {
            center,
            nodes: order.iter().map(|v| self.entities[v.index()].clone()).collect(),
            edges: edge_ids.into_iter().map(|i| self.triplets[i].clone()).collect(),
            truncated,
        })
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats { n_terms: self.term_index.len(), n_articles: self.article_index.len(), n_triplets: self.triplets.len() }
    }
}
