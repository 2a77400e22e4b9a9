//! ingest, harmonize, dedup and store build, with the reports of each stage.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lrhub_core::catalog::CatalogRecord;
use lrhub_core::dedup::{apply_merges, cluster_report, find_duplicates, summarize, DuplicateCluster};
use lrhub_core::harmonize::{Harmonizer, LanguageOptions, LanguageTable, LicenseRegistry, TypeGazetteer};
use lrhub_core::ingest::{builtin_ruleset, ingest_dcat_json, ingest_xml, load_ruleset, IngestContext, IngestReport};
use lrhub_core::store::{corpus_stats, format_corpus_stats, Store};

use crate::config::{PipelineConfig, Source, SourceFormat};
use crate::histogram::{format_histogram, language_histogram};

fn read(path: &Path, what: &str) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {what} {}", path.display()))
}

/// Maps one source file into records.
pub fn ingest_source(source: &Source, base: &str) -> Result<(Vec<CatalogRecord>, IngestReport)> {
    let name = source
        .path
        .file_name()
        .map_or_else(|| source.path.display().to_string(), |n| n.to_string_lossy().into_owned());
    let ctx = IngestContext::new(base, source.repo.clone(), name);
    let rules = match &source.format {
        SourceFormat::DcatJson => None,
        SourceFormat::Rules(id) => Some(builtin_ruleset(id).with_context(|| format!("no built-in rule set {id:?}"))?),
        SourceFormat::RuleFile(path) => Some(
            load_ruleset(&read(path, "rule set")?).with_context(|| format!("invalid rule set {}", path.display()))?,
        ),
    };
    let input = read(&source.path, "source")?;
    let out = match rules {
        Some(rules) => ingest_xml(&input, &rules, &ctx),
        None => ingest_dcat_json(&input, &ctx),
    };
    out.with_context(|| format!("cannot ingest {}", source.path.display()))
}

/// Everything a pipeline run produces, before anything is written.
pub struct PipelineRun {
    pub ingest: IngestReport,
    pub clusters: Vec<DuplicateCluster>,
    pub store: Store,
}

impl PipelineRun {
    /// Output files as (name, content), in a fixed order.
    pub fn files(&self) -> Vec<(&'static str, String)> {
        let clusters = format!("{}\n{}", summarize(&self.clusters).to_text(), cluster_report(&self.clusters));
        vec![
            ("dump.nt", self.store.dump()),
            ("ingest_report.txt", self.ingest.to_text()),
            ("clusters.txt", clusters),
            ("completeness.txt", self.store.completeness().to_text()),
            ("corpus_stats.txt", format_corpus_stats(&corpus_stats(&self.store.tallies()))),
            ("languages.txt", format_histogram(&language_histogram(&self.store))),
        ]
    }
}

fn table<T>(path: &Option<PathBuf>, what: &str, parse: impl Fn(&str) -> Result<T, lrhub_core::harmonize::HarmonizeError>) -> Result<Option<T>> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {what} {}", path.display()))?;
    parse(&text).map(Some).with_context(|| format!("invalid {what} {}", path.display()))
}

/// Runs every stage in memory.
pub fn build(cfg: &PipelineConfig) -> Result<PipelineRun> {
    let languages = table(&cfg.language_table, "language table", LanguageTable::from_tsv)?;
    let gazetteer = table(&cfg.type_gazetteer, "type gazetteer", TypeGazetteer::from_tsv)?;
    let licenses = table(&cfg.license_registry, "license registry", LicenseRegistry::from_tsv)?;
    let defaults = Harmonizer::default();
    let harmonizer = Harmonizer {
        languages: languages.as_ref().unwrap_or(defaults.languages),
        gazetteer: gazetteer.as_ref().unwrap_or(defaults.gazetteer),
        licenses: licenses.as_ref().unwrap_or(defaults.licenses),
        options: LanguageOptions {
            metric: cfg.metric,
            threshold: cfg.threshold,
            ..LanguageOptions::default()
        },
    };

    let mut ingest = IngestReport::default();
    let mut records = Vec::new();
    for source in &cfg.sources {
        let (recs, report) = ingest_source(source, &cfg.base)?;
        tracing::info!(source = %source.path.display(), records = recs.len(), "ingested");
        records.extend(recs);
        ingest.merge(report);
    }
    for r in &mut records {
        harmonizer.harmonize(r);
    }
    let clusters = find_duplicates(&records, cfg.strategy);
    let records = apply_merges(records, &clusters).context("cannot merge duplicates")?;
    let store = Store::load(records).context("cannot build the store")?;
    Ok(PipelineRun { ingest, clusters, store })
}

/// Runs the pipeline and writes its outputs to `cfg.out`. On failure no
/// output of this run is left behind.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let run = build(cfg)?;
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    let mut written = Vec::new();
    for (name, content) in run.files() {
        let path = cfg.out.join(name);
        if let Err(e) = std::fs::write(&path, content) {
            for p in written.iter().chain([&path]) {
                let _ = std::fs::remove_file(p);
            }
            return Err(e).with_context(|| format!("cannot write {}", path.display()));
        }
        written.push(path);
    }
    Ok(written)
}
