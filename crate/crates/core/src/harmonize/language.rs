use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::similarity::{fold, SimilarityMetric};
use super::HarmonizeError;
use crate::catalog::LanguageRef;

const EMBEDDED: &str = include_str!("data/languages.tsv");

pub const DEFAULT_THRESHOLD: f64 = 0.78;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageEntry {
    pub iso639_3: String,
    pub iso639_1: Option<String>,
    pub names: Vec<String>,
    pub alt_names: Vec<String>,
}

impl LanguageEntry {
    pub fn primary_name(&self) -> &str {
        &self.names[0]
    }

    fn all_names(&self) -> impl Iterator<Item = &String> {
        self.names.iter().chain(&self.alt_names)
    }
}

/// ISO 639-3 codes with their English names and common variants.
#[derive(Debug, Clone)]
pub struct LanguageTable {
    version: String,
    entries: Vec<LanguageEntry>,
    by_code: HashMap<String, usize>,
    // all names of each entry, case-folded, without and with diacritic stripping
    folded: [Vec<Vec<String>>; 2],
}

impl LanguageTable {
    /// The table compiled into the crate.
    pub fn embedded() -> &'static LanguageTable {
        static TABLE: OnceLock<LanguageTable> = OnceLock::new();
        TABLE.get_or_init(|| LanguageTable::from_tsv(EMBEDDED).expect("embedded table is valid"))
    }

    /// Parses `code3 \t code1 \t names \t altNames` rows; names are `;`-separated.
    /// A `# version <v>` comment sets the version.
    pub fn from_tsv(text: &str) -> Result<Self, HarmonizeError> {
        let mut version = String::from("unversioned");
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let bad = |reason: &str| HarmonizeError::Table {
                line: n + 1,
                reason: reason.to_string(),
            };
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("version") {
                    version = v.trim().to_string();
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 3 {
                return Err(bad("expected at least three columns"));
            }
            let code = cols[0].trim().to_lowercase();
            if code.len() != 3 || !code.chars().all(|c| c.is_ascii_lowercase()) {
                return Err(bad("first column must be a three-letter code"));
            }
            let code1 = Some(cols[1].trim().to_lowercase()).filter(|c| !c.is_empty());
            let split = |s: &str| -> Vec<String> {
                s.split(';')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(str::to_string)
                    .collect()
            };
            let names = split(cols[2]);
            if names.is_empty() {
                return Err(bad("an entry needs at least one name"));
            }
            entries.push(LanguageEntry {
                iso639_3: code,
                iso639_1: code1,
                names,
                alt_names: cols.get(3).map(|c| split(c)).unwrap_or_default(),
            });
        }
        Self::new(version, entries)
    }

    pub fn new(version: String, mut entries: Vec<LanguageEntry>) -> Result<Self, HarmonizeError> {
        entries.sort_by(|a, b| a.iso639_3.cmp(&b.iso639_3));
        let mut by_code = HashMap::new();
        let mut seen = HashSet::new();
        for (i, e) in entries.iter().enumerate() {
            if e.names.is_empty() {
                return Err(HarmonizeError::NoName(e.iso639_3.clone()));
            }
            if !seen.insert(e.iso639_3.clone()) {
                return Err(HarmonizeError::DuplicateCode(e.iso639_3.clone()));
            }
            by_code.insert(e.iso639_3.clone(), i);
        }
        for (i, e) in entries.iter().enumerate() {
            if let Some(c1) = &e.iso639_1 {
                if !seen.insert(c1.clone()) {
                    return Err(HarmonizeError::DuplicateCode(c1.clone()));
                }
                by_code.insert(c1.clone(), i);
            }
        }
        let fold_all = |strip: bool| -> Vec<Vec<String>> {
            entries
                .iter()
                .map(|e| e.all_names().map(|n| fold(n, strip)).collect())
                .collect()
        };
        let folded = [fold_all(false), fold_all(true)];
        Ok(LanguageTable {
            version,
            entries,
            by_code,
            folded,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Entries sorted by ISO 639-3 code.
    pub fn entries(&self) -> &[LanguageEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Looks up a 639-3 or 639-1 code, case-insensitively.
    pub fn by_code(&self, code: &str) -> Option<&LanguageEntry> {
        self.by_code
            .get(&code.trim().to_lowercase())
            .map(|&i| &self.entries[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanguageOptions {
    pub metric: SimilarityMetric,
    pub threshold: f64,
    pub strip_diacritics: bool,
}

impl Default for LanguageOptions {
    fn default() -> Self {
        LanguageOptions {
            metric: SimilarityMetric::DiceBigram,
            threshold: DEFAULT_THRESHOLD,
            strip_diacritics: false,
        }
    }
}

pub fn normalize_language(
    raw: &str,
    table: &LanguageTable,
    metric: SimilarityMetric,
    threshold: f64,
) -> LanguageRef {
    normalize_language_with(
        raw,
        table,
        &LanguageOptions {
            metric,
            threshold,
            ..LanguageOptions::default()
        },
    )
}

/// Assigns an ISO 639-3 code: exact code, then exact name, then the best
/// similarity score at or above the threshold. Ties go to the smallest code.
pub fn normalize_language_with(raw: &str, table: &LanguageTable, opts: &LanguageOptions) -> LanguageRef {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return LanguageRef::unresolved(raw);
    }
    if let Some(e) = table.by_code(trimmed) {
        return LanguageRef::resolved(raw, e.iso639_3.clone(), 1.0);
    }
    let needle = fold(trimmed, opts.strip_diacritics);
    let folded = &table.folded[usize::from(opts.strip_diacritics)];
    // entries are sorted by code, so the first hit is the smallest code
    for (e, names) in table.entries().iter().zip(folded) {
        if names.contains(&needle) {
            return LanguageRef::resolved(raw, e.iso639_3.clone(), 1.0);
        }
    }
    let mut best: Option<(f64, &str)> = None;
    for (e, names) in table.entries().iter().zip(folded) {
        let score = names
            .iter()
            .map(|n| opts.metric.score(&needle, n))
            .fold(0.0, f64::max);
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, &e.iso639_3));
        }
    }
    match best {
        Some((score, code)) if score >= opts.threshold && score > 0.0 => {
            LanguageRef::resolved(raw, code, score)
        }
        _ => LanguageRef::unresolved(raw),
    }
}
