use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lrhub_cli::config::{parse_metric, parse_strategy, parse_threshold, PipelineConfig, Source, SourceFormat};
use lrhub_cli::eval::{parse_rows, run_eval, EvalQuerySet, EvalReport};
use lrhub_cli::histogram::{format_histogram, language_histogram};
use lrhub_cli::pipeline::{ingest_source, run_pipeline};
use lrhub_core::catalog::{to_graph, SourceRepo};
use lrhub_core::dedup::{cluster_report, evaluate_precision, find_duplicates, parse_sample, summarize};
use lrhub_core::catalog::vocab;
use lrhub_core::rdf::{serialize_with_prefixes, to_ntriples, Graph, RdfFormat};
use lrhub_core::store::{corpus_stats, format_corpus_stats, Store};
use lrhub_linkcheck::{check_urls_cached, format_report, resolved_percentage, LinkCache, LinkPolicy};
use lrhub_server::{router, Portal, ServerConfig};

/// Harmonizes language-resource catalogs and serves them as linked data.
#[derive(Parser)]
#[command(name = "lrhub", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map one source file to N-Triples.
    Ingest(IngestArgs),
    /// Run ingest, harmonize, dedup and store build from a config file.
    Pipeline(PipelineArgs),
    /// Find duplicate records in a dump.
    Dedup(DedupArgs),
    /// Resolve the access URLs of a dump and report formats.
    Linkcheck(LinkcheckArgs),
    /// Print corpus, completeness and language statistics of a dump.
    Stats(StoreArgs),
    /// Run the relevance evaluation harness.
    Eval(EvalArgs),
    /// Serve a dump over HTTP.
    Serve(ServeArgs),
    /// Re-serialize a dump.
    Dump(DumpArgs),
}

#[derive(Args)]
struct StoreArgs {
    /// N-Triples dump written by `pipeline`.
    #[arg(long)]
    store: PathBuf,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    input: PathBuf,
    /// Built-in rule set id, `dcat-json`, or a `.rules` file.
    #[arg(long)]
    format: String,
    /// Source repository slug.
    #[arg(long)]
    repo: String,
    #[arg(long, default_value = "http://localhost:8080")]
    base: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
}

#[derive(Args)]
struct DedupArgs {
    #[command(flatten)]
    store: StoreArgs,
    #[arg(long, default_value = "both")]
    strategy: String,
    /// Judged pairs (`idA<TAB>idB<TAB>verdict`) to compute precision on.
    #[arg(long)]
    sample: Option<PathBuf>,
}

#[derive(Args)]
struct LinkcheckArgs {
    /// Dump whose access URLs are checked.
    #[arg(long, conflicts_with = "urls", required_unless_present = "urls")]
    store: Option<PathBuf>,
    /// File with one URL per line.
    #[arg(long)]
    urls: Option<PathBuf>,
    /// JSON-lines cache of earlier results.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
    #[arg(long, default_value_t = 500)]
    delay_ms: u64,
    #[arg(long, default_value_t = 16)]
    concurrency: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Dump to evaluate against; required with --queries.
    #[arg(long, requires = "queries")]
    store: Option<PathBuf>,
    /// Query set file with QUERY, SPARQL and JUDGMENTS sections.
    #[arg(long, conflicts_with = "rows", required_unless_present = "rows")]
    queries: Option<PathBuf>,
    /// Precomputed rows: query, mode, results, relevant%.
    #[arg(long)]
    rows: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: String,
    /// Built UI bundle served under /ui.
    #[arg(long)]
    ui: Option<PathBuf>,
    /// SPARQL time budget in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    store: StoreArgs,
    /// nt, ttl, rdf or jsonld.
    #[arg(long, default_value = "nt")]
    format: String,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn load_store(path: &Path) -> Result<Store> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read store {}", path.display()))?;
    Store::from_ntriples(&bytes).with_context(|| format!("cannot load store {}", path.display()))
}

fn source_format(s: &str) -> Result<SourceFormat> {
    Ok(if s.ends_with(".rules") {
        SourceFormat::RuleFile(PathBuf::from(s))
    } else if s == "dcat-json" {
        SourceFormat::DcatJson
    } else if lrhub_core::ingest::builtin_ruleset(s).is_some() {
        SourceFormat::Rules(s.to_string())
    } else {
        bail!("unknown format {s:?}");
    })
}

fn ingest(a: IngestArgs) -> Result<()> {
    let source = Source {
        repo: SourceRepo::from_slug(&a.repo),
        format: source_format(&a.format)?,
        path: a.input,
    };
    let (records, report) = ingest_source(&source, a.base.trim_end_matches('/'))?;
    let mut g = Graph::new();
    for r in &records {
        for t in to_graph(r).iter() {
            g.insert(t.clone());
        }
    }
    eprint!("{}", report.to_text());
    emit(a.out.as_deref(), &to_ntriples(&g))
}

fn pipeline(a: PipelineArgs) -> Result<()> {
    let mut cfg = PipelineConfig::load(&a.config)?;
    if let Some(out) = a.out {
        cfg.out = out;
    }
    if let Some(t) = a.threshold {
        cfg.threshold = parse_threshold(&t)?;
    }
    if let Some(m) = a.metric {
        cfg.metric = parse_metric(&m)?;
    }
    if let Some(s) = a.strategy {
        cfg.strategy = parse_strategy(&s)?;
    }
    for path in run_pipeline(&cfg)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn dedup(a: DedupArgs) -> Result<()> {
    let store = load_store(&a.store.store)?;
    let clusters = find_duplicates(store.records(), parse_strategy(&a.strategy)?);
    let mut text = format!("{}\n{}", summarize(&clusters).to_text(), cluster_report(&clusters));
    if let Some(sample) = a.sample {
        let data = std::fs::read_to_string(&sample).with_context(|| format!("cannot read {}", sample.display()))?;
        let judged = parse_sample(&data).with_context(|| format!("in {}", sample.display()))?;
        let p = evaluate_precision(&judged, &clusters)?;
        let shown = p.precision.map_or("n/a".to_string(), |x| format!("{:.2}%", 100.0 * x));
        text.push_str(&format!(
            "\ncorrect\t{}\nunclear\t{}\nincorrect\t{}\nprecision\t{shown}\n",
            p.correct, p.unclear, p.incorrect
        ));
    }
    emit(a.store.out.as_deref(), &text)
}

async fn linkcheck(a: LinkcheckArgs) -> Result<()> {
    let urls: Vec<String> = match (&a.store, &a.urls) {
        (Some(store), _) => {
            let store = load_store(store)?;
            let set: BTreeSet<String> = store.records().iter().flat_map(|r| r.access_urls.iter().cloned()).collect();
            set.into_iter().collect()
        }
        (None, Some(file)) => std::fs::read_to_string(file)
            .with_context(|| format!("cannot read {}", file.display()))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect(),
        (None, None) => bail!("give --store or --urls"),
    };
    let policy = LinkPolicy {
        timeout: Duration::from_millis(a.timeout_ms),
        per_host_delay: Duration::from_millis(a.delay_ms),
        concurrency: a.concurrency,
        ..LinkPolicy::default()
    };
    let mut cache = match &a.cache {
        Some(p) => LinkCache::load(p)?,
        None => LinkCache::default(),
    };
    let results = check_urls_cached(&urls, &policy, &mut cache).await;
    if let Some(p) = &a.cache {
        cache.save(p)?;
    }
    let mut text = format!("# checked {}\n# resolved {:.1}%\n", results.len(), resolved_percentage(&results));
    match format_report(&results) {
        Ok(report) => text.push_str(&report.to_tsv()),
        Err(e) => text.push_str(&format!("# {e}\n")),
    }
    emit(a.out.as_deref(), &text)
}

fn stats(a: StoreArgs) -> Result<()> {
    let store = load_store(&a.store)?;
    let text = format!(
        "{}\n{}\n{}",
        format_corpus_stats(&corpus_stats(&store.tallies())),
        store.completeness().to_text(),
        format_histogram(&language_histogram(&store))
    );
    emit(a.out.as_deref(), &text)
}

fn eval(a: EvalArgs) -> Result<()> {
    let report = match (&a.rows, &a.queries, &a.store) {
        (Some(rows), _, _) => {
            let text = std::fs::read_to_string(rows).with_context(|| format!("cannot read {}", rows.display()))?;
            EvalReport::from_rows(parse_rows(&text).with_context(|| format!("in {}", rows.display()))?)
        }
        (None, Some(queries), Some(store)) => {
            let text = std::fs::read_to_string(queries).with_context(|| format!("cannot read {}", queries.display()))?;
            let set = EvalQuerySet::parse(&text).with_context(|| format!("in {}", queries.display()))?;
            run_eval(&set, &load_store(store)?)?
        }
        _ => bail!("give --rows, or --queries with --store"),
    };
    emit(a.out.as_deref(), &report.to_text())
}

async fn serve(a: ServeArgs) -> Result<()> {
    let store = load_store(&a.store)?;
    let records = store.records().len();
    let config = ServerConfig {
        query_timeout: Duration::from_millis(a.timeout_ms),
        ui_dir: a.ui,
    };
    let app = router(Arc::new(Portal::new(store)), config);
    let listener = tokio::net::TcpListener::bind(&a.addr)
        .await
        .with_context(|| format!("cannot listen on {}", a.addr))?;
    tracing::info!(addr = %listener.local_addr()?, records, "serving");
    lrhub_server::serve(listener, app).await?;
    Ok(())
}

fn dump(a: DumpArgs) -> Result<()> {
    let store = load_store(&a.store.store)?;
    let format = RdfFormat::from_name(&a.format).with_context(|| format!("unknown format {:?}", a.format))?;
    let bytes = serialize_with_prefixes(&store.to_graph(), format, &vocab::prefixes())?;
    emit(a.store.out.as_deref(), &String::from_utf8(bytes).expect("serializers write UTF-8"))
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Ingest(a) => ingest(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Dedup(a) => dedup(a),
        Command::Linkcheck(a) => linkcheck(a).await,
        Command::Stats(a) => stats(a),
        Command::Eval(a) => eval(a),
        Command::Serve(a) => serve(a).await,
        Command::Dump(a) => dump(a),
    }
}
