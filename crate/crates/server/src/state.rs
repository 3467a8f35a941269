use std::path::PathBuf;
use std::sync::Arc;

use litgraph_core::extraction::Extractor;
use litgraph_core::{EmbeddingTable, KnowledgeGraph};
use parking_lot::RwLock;
use tokio::sync::Mutex;

/// Immutable view served to readers.
#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    pub graph: KnowledgeGraph,
    pub embeddings: Option<EmbeddingTable>,
}

/// Shared service state: the current snapshot plus the ingest machinery.
///
/// Readers clone the `Arc` and never hold the lock across work. Ingest builds
/// a complete new snapshot and swaps the pointer.
#[derive(Debug)]
pub struct AppState {
    snapshot: RwLock<Arc<Snapshot>>,
    ingest_lock: Mutex<()>,
    pub extractor: Extractor,
    /// Where ingested graphs are persisted; `None` keeps them in memory only.
    pub store_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(snapshot: Snapshot, extractor: Extractor, store_dir: Option<PathBuf>) -> Arc<Self> {
        Arc::new(AppState { snapshot: RwLock::new(Arc::new(snapshot)), ingest_lock: Mutex::new(()), extractor, store_dir })
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().clone()
    }

    pub(crate) fn swap(&self, next: Snapshot) {
        *self.snapshot.write() = Arc::new(next);
    }

    pub(crate) fn try_begin_ingest(&self) -> Option<tokio::sync::MutexGuard<'_, ()>> {
        self.ingest_lock.try_lock().ok()
    }
}
