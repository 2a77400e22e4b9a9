use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use crate::{check_urls, LinkError, LinkPolicy, LinkResult};

/// Results keyed by URL, stored as JSON lines so re-runs only fetch new URLs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinkCache {
    entries: BTreeMap<String, LinkResult>,
}

impl LinkCache {
    /// Reads a cache file; a missing file is an empty cache.
    pub fn load(path: &Path) -> Result<Self, LinkError> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Self::default()),
            Err(source) => {
                return Err(LinkError::Cache {
                    path: path.display().to_string(),
                    source,
                })
            }
        };
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let r: LinkResult = serde_json::from_str(line).map_err(|source| LinkError::CacheFormat {
                path: path.display().to_string(),
                line: i + 1,
                source,
            })?;
            entries.insert(r.url.clone(), r);
        }
        Ok(LinkCache { entries })
    }

    pub fn save(&self, path: &Path) -> Result<(), LinkError> {
        let err = |source| LinkError::Cache {
            path: path.display().to_string(),
            source,
        };
        let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(err)?);
        for r in self.entries.values() {
            let line = serde_json::to_string(r).expect("results serialize");
            writeln!(f, "{line}").map_err(err)?;
        }
        f.flush().map_err(err)
    }

    pub fn get(&self, url: &str) -> Option<&LinkResult> {
        self.entries.get(url)
    }

    pub fn insert(&mut self, result: LinkResult) {
        self.entries.insert(result.url.clone(), result);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Like [`check_urls`], but answers URLs already in `cache` from it and adds
/// the fresh results.
pub async fn check_urls_cached(urls: &[String], policy: &LinkPolicy, cache: &mut LinkCache) -> Vec<LinkResult> {
    let mut seen = std::collections::BTreeSet::new();
    let missing: Vec<String> = urls
        .iter()
        .filter(|u| cache.get(u).is_none() && seen.insert(u.as_str()))
        .cloned()
        .collect();
    for r in check_urls(&missing, policy).await {
        cache.insert(r);
    }
    urls.iter()
        .map(|u| cache.get(u).cloned().expect("every URL was checked"))
        .collect()
}
