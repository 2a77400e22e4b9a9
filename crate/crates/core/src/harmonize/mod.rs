//! Normalization of languages, resource types and rights.
//!
//! Language strings are mapped to ISO 639-3 codes by exact lookup and, failing
//! that, by string similarity against an embedded name table. Types come from
//! a keyword gazetteer and rights from a license registry.

mod language;
mod rights;
mod similarity;
mod types;

use thiserror::Error;

pub use language::{
    normalize_language, normalize_language_with, LanguageEntry, LanguageOptions, LanguageTable,
    DEFAULT_THRESHOLD,
};
pub use rights::{normalize_rights, LicenseRegistry};
pub use similarity::{dice_bigram, fold, levenshtein_sim, SimilarityMetric};
pub use types::{classify_type, tokenize, GazetteerEntry, TypeGazetteer};

use crate::catalog::CatalogRecord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarmonizeError {
    #[error("gold standard is empty")]
    EmptyGold,
    #[error("duplicate language code {0}")]
    DuplicateCode(String),
    #[error("language {0} has no name")]
    NoName(String),
    #[error("line {line}: {reason}")]
    Table { line: usize, reason: String },
}

/// One distinct raw language label with its expected code (none when the
/// label should stay unassigned) and how often it occurs in the data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldLabel {
    pub raw: String,
    pub expected: Option<String>,
    pub occurrences: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingAccuracy {
    pub label_accuracy: f64,
    pub instance_accuracy: f64,
    /// `(raw, occurrences)` per label, in gold order.
    pub weights: Vec<(String, u64)>,
    /// Labels mapped to something other than the expected code.
    pub errors: Vec<String>,
}

pub fn evaluate_mapping_accuracy(
    gold: &[GoldLabel],
    table: &LanguageTable,
    metric: SimilarityMetric,
    threshold: f64,
) -> Result<MappingAccuracy, HarmonizeError> {
    let total: u64 = gold.iter().map(|g| g.occurrences).sum();
    if gold.is_empty() || total == 0 {
        return Err(HarmonizeError::EmptyGold);
    }
    let mut correct_labels = 0usize;
    let mut correct_instances = 0u64;
    let mut errors = Vec::new();
    for g in gold {
        let got = normalize_language(&g.raw, table, metric, threshold).iso639_3;
        if got == g.expected {
            correct_labels += 1;
            correct_instances += g.occurrences;
        } else {
            errors.push(g.raw.clone());
        }
    }
    Ok(MappingAccuracy {
        label_accuracy: correct_labels as f64 / gold.len() as f64,
        instance_accuracy: correct_instances as f64 / total as f64,
        weights: gold.iter().map(|g| (g.raw.clone(), g.occurrences)).collect(),
        errors,
    })
}

/// Reads `raw \t expected \t occurrences` rows; an expected code of `-` means none.
pub fn parse_gold_tsv(text: &str) -> Result<Vec<GoldLabel>, HarmonizeError> {
    let mut gold = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let bad = |reason: &str| HarmonizeError::Table {
            line: n + 1,
            reason: reason.to_string(),
        };
        if cols.len() != 3 {
            return Err(bad("expected raw, code and occurrences"));
        }
        let occurrences = cols[2]
            .trim()
            .parse()
            .map_err(|_| bad("occurrences is not a number"))?;
        let code = cols[1].trim();
        gold.push(GoldLabel {
            raw: cols[0].to_string(),
            expected: (code != "-" && !code.is_empty()).then(|| code.to_lowercase()),
            occurrences,
        });
    }
    Ok(gold)
}

/// The tables and options used to harmonize whole records.
#[derive(Debug, Clone, Copy)]
pub struct Harmonizer<'a> {
    pub languages: &'a LanguageTable,
    pub gazetteer: &'a TypeGazetteer,
    pub licenses: &'a LicenseRegistry,
    pub options: LanguageOptions,
}

impl Default for Harmonizer<'static> {
    fn default() -> Self {
        Harmonizer {
            languages: LanguageTable::embedded(),
            gazetteer: TypeGazetteer::embedded(),
            licenses: LicenseRegistry::embedded(),
            options: LanguageOptions::default(),
        }
    }
}

impl Harmonizer<'_> {
    /// Normalizes languages, type and rights in place. Raw values are kept;
    /// a source type label that cannot be classified stays as given.
    pub fn harmonize(&self, record: &mut CatalogRecord) {
        for lang in &mut record.languages {
            *lang = normalize_language_with(&lang.raw, self.languages, &self.options);
        }
        if let Some(t) = classify_type(record, self.gazetteer) {
            record.resource_type = Some(t);
        }
        if let Some(r) = &record.rights {
            record.rights = Some(normalize_rights(&r.raw, self.licenses));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{LanguageRef, RightsRef, SourceRepo};

    #[test]
    fn exact_codes_are_perfect() {
        let gold: Vec<GoldLabel> = ["en", "deu", "fr"]
            .iter()
            .zip(["eng", "deu", "fra"])
            .map(|(raw, code)| GoldLabel {
                raw: raw.to_string(),
                expected: Some(code.into()),
                occurrences: 3,
            })
            .collect();
        let acc = evaluate_mapping_accuracy(&gold, LanguageTable::embedded(), SimilarityMetric::DiceBigram, 0.78)
            .unwrap();
        assert_eq!((acc.label_accuracy, acc.instance_accuracy), (1.0, 1.0));
    }

    #[test]
    fn rare_error_barely_affects_instances() {
        // nine correct labels sharing 999 occurrences, one wrong label seen once
        let mut gold: Vec<GoldLabel> = ["en", "de", "fr", "es", "it", "pt", "nl", "sv", "fi"]
            .iter()
            .enumerate()
            .map(|(i, raw)| GoldLabel {
                raw: raw.to_string(),
                expected: LanguageTable::embedded().by_code(raw).map(|e| e.iso639_3.clone()),
                occurrences: if i == 0 { 991 } else { 1 },
            })
            .collect();
        gold.push(GoldLabel {
            raw: "Klingon".into(),
            expected: Some("tlh".into()),
            occurrences: 1,
        });
        let acc = evaluate_mapping_accuracy(&gold, LanguageTable::embedded(), SimilarityMetric::DiceBigram, 0.78)
            .unwrap();
        assert!((acc.label_accuracy - 0.9).abs() < 1e-12);
        assert!((acc.instance_accuracy - 0.999).abs() < 1e-12);
        assert_eq!(acc.errors, vec!["Klingon"]);
    }

    #[test]
    fn empty_gold_is_an_error() {
        assert_eq!(
            evaluate_mapping_accuracy(&[], LanguageTable::embedded(), SimilarityMetric::DiceBigram, 0.5),
            Err(HarmonizeError::EmptyGold)
        );
    }

    #[test]
    fn gold_tsv() {
        let gold = parse_gold_tsv("# c\nSpansh\tspa\t4\nxx\t-\t1\n").unwrap();
        assert_eq!(gold.len(), 2);
        assert_eq!(gold[1].expected, None);
        assert!(parse_gold_tsv("a\tb\n").is_err());
    }

    #[test]
    fn record_harmonization_keeps_raw_values() {
        let mut r = CatalogRecord::new("http://h/resource/metashare/1", SourceRepo::MetaShare);
        r.languages = vec![LanguageRef::unresolved("es"), LanguageRef::unresolved("Spanish")];
        r.rights = Some(RightsRef::raw("GPL"));
        Harmonizer::default().harmonize(&mut r);
        assert!(r.languages.iter().all(|l| l.iso639_3.as_deref() == Some("spa")));
        assert_eq!(r.languages[0].raw, "es");
        let rights = r.rights.unwrap();
        assert_eq!(rights.raw, "GPL");
        assert!(rights.license_iri.is_some());
    }
}
