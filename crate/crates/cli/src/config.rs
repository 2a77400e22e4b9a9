//! The pipeline configuration file.
//!
//! One `key = value` pair per line; `#` starts a comment line. Keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `base` | base IRI for minted record ids |
//! | `out` | output directory |
//! | `source` | `<repo> <format> <path>`, repeatable |
//! | `language_table`, `type_gazetteer`, `license_registry` | TSV tables replacing the embedded ones |
//! | `metric` | `dice` or `levenshtein` |
//! | `threshold` | language similarity threshold |
//! | `strategy` | `title`, `url` or `both` |
//!
//! A source format is a built-in rule set id (`metashare`,
//! `olac-dcmiterms`), `dcat-json`, or the path of a rule file ending in
//! `.rules`. Relative paths are resolved against the config file's directory.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use lrhub_core::catalog::SourceRepo;
use lrhub_core::dedup::MatchStrategy;
use lrhub_core::harmonize::{SimilarityMetric, DEFAULT_THRESHOLD};

#[derive(Debug, Clone, PartialEq)]
pub enum SourceFormat {
    Rules(String),
    RuleFile(PathBuf),
    DcatJson,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub repo: SourceRepo,
    pub format: SourceFormat,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub base: String,
    pub out: PathBuf,
    pub sources: Vec<Source>,
    pub language_table: Option<PathBuf>,
    pub type_gazetteer: Option<PathBuf>,
    pub license_registry: Option<PathBuf>,
    pub metric: SimilarityMetric,
    pub threshold: f64,
    pub strategy: MatchStrategy,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            base: "http://localhost:8080".into(),
            out: PathBuf::from("out"),
            sources: Vec::new(),
            language_table: None,
            type_gazetteer: None,
            license_registry: None,
            metric: SimilarityMetric::DiceBigram,
            threshold: DEFAULT_THRESHOLD,
            strategy: MatchStrategy::TitleAndUrl,
        }
    }
}

pub fn parse_metric(s: &str) -> Result<SimilarityMetric> {
    SimilarityMetric::from_name(s).ok_or_else(|| anyhow!("unknown metric {s:?}; expected dice or levenshtein"))
}

pub fn parse_strategy(s: &str) -> Result<MatchStrategy> {
    MatchStrategy::from_name(s).ok_or_else(|| anyhow!("unknown strategy {s:?}; expected title, url or both"))
}

pub fn parse_threshold(s: &str) -> Result<f64> {
    let t: f64 = s.trim().parse().with_context(|| format!("threshold {s:?} is not a number"))?;
    if !(0.0..=1.0).contains(&t) {
        bail!("threshold {t} is outside [0, 1]");
    }
    Ok(t)
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, dir).with_context(|| format!("in config {}", path.display()))
    }

    /// Parses config text, resolving relative paths against `dir`.
    pub fn parse(text: &str, dir: &Path) -> Result<Self> {
        let resolve = |p: &str| -> PathBuf {
            let p = Path::new(p.trim());
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                dir.join(p)
            }
        };
        let mut cfg = PipelineConfig {
            out: dir.join("out"),
            ..PipelineConfig::default()
        };
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let n = i + 1;
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| anyhow!("line {n}: expected key = value"))?;
            match key {
                "base" => cfg.base = value.trim_end_matches('/').to_string(),
                "out" => cfg.out = resolve(value),
                "source" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    let [repo, format, path] = parts[..] else {
                        bail!("line {n}: source needs <repo> <format> <path>");
                    };
                    let format = if format.ends_with(".rules") {
                        SourceFormat::RuleFile(resolve(format))
                    } else if format == "dcat-json" {
                        SourceFormat::DcatJson
                    } else if lrhub_core::ingest::builtin_ruleset(format).is_some() {
                        SourceFormat::Rules(format.to_string())
                    } else {
                        bail!("line {n}: unknown source format {format:?}");
                    };
                    cfg.sources.push(Source {
                        repo: SourceRepo::from_slug(repo),
                        format,
                        path: resolve(path),
                    });
                }
                "language_table" => cfg.language_table = Some(resolve(value)),
                "type_gazetteer" => cfg.type_gazetteer = Some(resolve(value)),
                "license_registry" => cfg.license_registry = Some(resolve(value)),
                "metric" => cfg.metric = parse_metric(value).with_context(|| format!("line {n}"))?,
                "threshold" => cfg.threshold = parse_threshold(value).with_context(|| format!("line {n}"))?,
                "strategy" => cfg.strategy = parse_strategy(value).with_context(|| format!("line {n}"))?,
                other => bail!("line {n}: unknown key {other:?}"),
            }
        }
        Ok(cfg)
    }
}
