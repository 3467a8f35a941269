mod error;
mod output;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use litgraph_client::Client;
use litgraph_core::extraction::{ingest_article, read_corpus, Extractor};
use litgraph_core::recommender::{recommend, train};
use litgraph_core::wire::{self, SubgraphResponse};
use litgraph_core::{fixtures, EmbeddingTable, Gazetteer, Hyperparams, KnowledgeGraph, PosLexicon};
use litgraph_server::api::{resolve, K_MAX, MAX_NODES_MAX, RADIUS_MAX};
use litgraph_server::{cors_for, router_with_cors, AppState, Snapshot};

use crate::error::CliError;

/// Build, train, serve and query literature knowledge graphs.
#[derive(Debug, Parser)]
#[command(name = "litgraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where read-only commands get their data: a local store or a running server.
#[derive(Debug, Args)]
struct Source {
    /// Store directory.
    #[arg(long, env = "LITGRAPH_STORE", conflicts_with = "server")]
    store: Option<PathBuf>,
    /// Base URL of a running server, e.g. http://127.0.0.1:8080.
    #[arg(long, env = "LITGRAPH_SERVER")]
    server: Option<String>,
}

#[derive(Debug, Args)]
struct ExtractorArgs {
    /// Gazetteer TSV (`term<TAB>TYPE`); the shipped one when omitted.
    #[arg(long, env = "LITGRAPH_GAZETTEER")]
    gazetteer: Option<PathBuf>,
    /// POS lexicon TSV (`word<TAB>TAG`); the shipped one when omitted.
    #[arg(long, env = "LITGRAPH_LEXICON")]
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract triplets from a JSONL corpus into a store.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        extractor: ExtractorArgs,
        #[arg(long, env = "LITGRAPH_STORE")]
        store: PathBuf,
    },
    /// Train embeddings on a store and write them to a file.
    Train {
        #[arg(long, env = "LITGRAPH_STORE")]
        store: PathBuf,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
        dim: u32,
        #[arg(long, default_value_t = Hyperparams::default().learning_rate)]
        lr: f64,
        #[arg(long, default_value_t = Hyperparams::default().reg)]
        lambda: f64,
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
        epochs: u32,
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u32).range(1..))]
        triples_per_epoch: u32,
        #[arg(long, default_value_t = Hyperparams::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = Hyperparams::default().init_scale)]
        init_scale: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        /// Store directory; ingests are persisted here. Starts empty if absent.
        #[arg(long, env = "LITGRAPH_STORE")]
        store: Option<PathBuf>,
        #[arg(long, env = "LITGRAPH_ADDR", default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long, env = "LITGRAPH_EMBEDDINGS")]
        embeddings: Option<PathBuf>,
        #[command(flatten)]
        extractor: ExtractorArgs,
        /// Allowed CORS origin; any origin when omitted.
        #[arg(long, env = "LITGRAPH_CORS_ORIGIN")]
        cors_origin: Option<String>,
    },
    /// Print the subgraph around the best match for TEXT.
    Query {
        text: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        radius: u32,
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
        max_nodes: u32,
        #[command(flatten)]
        source: Source,
    },
    /// Print ranked query recommendations for TEXT.
    Recommend {
        text: String,
        #[arg(short, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        /// Embedding file (store mode only); co-occurrence ranking when omitted.
        #[arg(long, env = "LITGRAPH_EMBEDDINGS", conflicts_with = "server")]
        embeddings: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
    },
    /// Print entity and triplet counts.
    Stats {
        #[command(flatten)]
        source: Source,
    },
}

enum Backend {
    Store(PathBuf),
    Server(Client),
}

impl Source {
    fn backend(self) -> Result<Backend, CliError> {
        match (self.store, self.server) {
            (_, Some(url)) => Ok(Backend::Server(Client::new(&url)?)),
            (Some(dir), None) => Ok(Backend::Store(dir)),
            (None, None) => Err(CliError::Usage("one of --store or --server is required".into())),
        }
    }
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Runtime(e.to_string())),
        _ => Ok(()),
    }
}

fn load_store(dir: &Path) -> Result<KnowledgeGraph, CliError> {
    if !KnowledgeGraph::store_exists(dir) {
        return Err(CliError::Data(format!("no store at {}", dir.display())));
    }
    Ok(KnowledgeGraph::load(dir)?)
}

fn load_extractor(args: &ExtractorArgs) -> Result<Extractor, CliError> {
    let gazetteer = match &args.gazetteer {
        Some(p) => Gazetteer::from_path(p)?,
        None => fixtures::gazetteer(),
    };
    let lexicon = match &args.lexicon {
        Some(p) => PosLexicon::from_path(p)?,
        None => fixtures::lexicon(),
    };
    Ok(Extractor::new(gazetteer, lexicon))
}

fn load_embeddings(path: Option<&Path>) -> Result<Option<EmbeddingTable>, CliError> {
    path.map(|p| EmbeddingTable::load(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))).transpose()
}

fn runtime() -> Result<tokio::runtime::Runtime, CliError> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(|e| CliError::Runtime(e.to_string()))
}

fn unknown(text: &str) -> CliError {
    CliError::Data(format!("no entity matches {text:?}"))
}

fn cmd_ingest(corpus: &Path, extractor: &ExtractorArgs, store: &Path) -> Result<(), CliError> {
    let extractor = load_extractor(extractor)?;
    let file = File::open(corpus).map_err(|e| CliError::Data(format!("{}: {e}", corpus.display())))?;
    let records = read_corpus(file)?;
    let mut graph = if KnowledgeGraph::store_exists(store) { KnowledgeGraph::load(store)? } else { KnowledgeGraph::new() };
    for record in &records {
        ingest_article(&mut graph, record, &extractor)?;
    }
    graph.save(store)?;
    emit(&output::stats_line(&graph.stats()))
}

fn cmd_train(store: &Path, hp: Hyperparams, out: &Path) -> Result<(), CliError> {
    hp.validate()?;
    let graph = load_store(store)?;
    let (table, log) = train(&graph, &hp)?;
    table.save(out).map_err(|e| CliError::Data(format!("{}: {e}", out.display())))?;
    emit(&output::training_log(&log))
}

fn cmd_serve(
    store: Option<PathBuf>,
    addr: &str,
    embeddings: Option<&Path>,
    extractor: &ExtractorArgs,
    cors_origin: Option<&str>,
) -> Result<(), CliError> {
    let graph = match &store {
        Some(dir) if KnowledgeGraph::store_exists(dir) => KnowledgeGraph::load(dir)?,
        _ => KnowledgeGraph::new(),
    };
    let embeddings = load_embeddings(embeddings)?;
    let extractor = load_extractor(extractor)?;
    let cors = match cors_origin {
        Some(o) => Some(o.parse().map_err(|_| CliError::Usage(format!("invalid CORS origin {o:?}")))?),
        None => None,
    };
    let state = AppState::new(Snapshot { graph, embeddings }, extractor, store);
    let app = router_with_cors(state, cors_for(cors));

    runtime()?.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| CliError::Runtime(format!("cannot bind {addr}: {e}")))?;
        let local = listener.local_addr().map_err(|e| CliError::Runtime(e.to_string()))?;
        emit(&format!("listening on http://{local}\n"))?;
        litgraph_server::serve(listener, app, shutdown_signal()).await.map_err(|e| CliError::Runtime(e.to_string()))
    })
}

async fn shutdown_signal() {
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        match signal(SignalKind::terminate()) {
            Ok(mut term) => {
                tokio::select! {
                    _ = litgraph_server::ctrl_c() => {}
                    _ = term.recv() => {}
                }
            }
            Err(_) => litgraph_server::ctrl_c().await,
        }
    }
    #[cfg(not(unix))]
    litgraph_server::ctrl_c().await;
}

fn cmd_query(text: &str, radius: usize, max_nodes: usize, source: Source) -> Result<(), CliError> {
    let (radius, max_nodes) = (radius.min(RADIUS_MAX), max_nodes.min(MAX_NODES_MAX));
    let sub = match source.backend()? {
        Backend::Store(dir) => {
            let graph = load_store(&dir)?;
            let center = resolve(&graph, text).ok_or_else(|| unknown(text))?;
            SubgraphResponse::from(&graph.ego_subgraph(center, radius, max_nodes)?)
        }
        Backend::Server(client) => runtime()?.block_on(client.subgraph(text, Some(radius), Some(max_nodes)))?,
    };
    emit(&output::subgraph(&sub))
}

fn cmd_recommend(text: &str, k: usize, embeddings: Option<&Path>, source: Source) -> Result<(), CliError> {
    let k = k.min(K_MAX);
    let recs = match source.backend()? {
        Backend::Store(dir) => {
            let graph = load_store(&dir)?;
            let table = load_embeddings(embeddings)?;
            let query = resolve(&graph, text).ok_or_else(|| unknown(text))?;
            wire::recommendation_views(&graph, &recommend(table.as_ref(), &graph, query, k)?)
        }
        Backend::Server(client) => runtime()?.block_on(client.recommend(text, Some(k)))?,
    };
    emit(&output::recommendations(&recs))
}

fn cmd_stats(source: Source) -> Result<(), CliError> {
    let stats = match source.backend()? {
        Backend::Store(dir) => load_store(&dir)?.stats(),
        Backend::Server(client) => output::health_stats(&runtime()?.block_on(client.health())?),
    };
    emit(&output::stats_line(&stats))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { corpus, extractor, store } => cmd_ingest(&corpus, &extractor, &store),
        Command::Train { store, dim, lr, lambda, epochs, triples_per_epoch, seed, init_scale, out } => {
            let hp = Hyperparams {
                dim: dim as usize,
                learning_rate: lr,
                reg: lambda,
                epochs: epochs as usize,
                triples_per_epoch: triples_per_epoch as usize,
                seed,
                init_scale,
            };
            cmd_train(&store, hp, &out)
        }
        Command::Serve { store, addr, embeddings, extractor, cors_origin } => {
            cmd_serve(store, &addr, embeddings.as_deref(), &extractor, cors_origin.as_deref())
        }
        Command::Query { text, radius, max_nodes, source } => cmd_query(&text, radius as usize, max_nodes as usize, source),
        Command::Recommend { text, k, embeddings, source } => cmd_recommend(&text, k as usize, embeddings.as_deref(), source),
        Command::Stats { source } => cmd_stats(source),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("litgraph: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
