use std::sync::OnceLock;

use super::HarmonizeError;
use crate::catalog::{CatalogRecord, ResourceType};

const EMBEDDED: &str = include_str!("data/gazetteer.tsv");

#[derive(Debug, Clone, PartialEq)]
pub struct GazetteerEntry {
    /// Lowercase word tokens; multiword keywords match as a token sequence.
    pub tokens: Vec<String>,
    pub resource_type: ResourceType,
    pub weight: f64,
}

/// Weighted keywords for the three named resource types.
#[derive(Debug, Clone)]
pub struct TypeGazetteer {
    entries: Vec<GazetteerEntry>,
}

/// Case-folded runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

impl TypeGazetteer {
    pub fn embedded() -> &'static TypeGazetteer {
        static GAZ: OnceLock<TypeGazetteer> = OnceLock::new();
        GAZ.get_or_init(|| TypeGazetteer::from_tsv(EMBEDDED).expect("embedded gazetteer is valid"))
    }

    /// Parses `keyword \t type label \t weight` rows.
    pub fn from_tsv(text: &str) -> Result<Self, HarmonizeError> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let bad = |reason: &str| HarmonizeError::Table {
                line: n + 1,
                reason: reason.to_string(),
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(bad("expected keyword, type and weight"));
            }
            let tokens = tokenize(cols[0]);
            let resource_type = ResourceType::from_label(cols[1]);
            let weight: f64 = cols[2].trim().parse().map_err(|_| bad("weight is not a number"))?;
            if tokens.is_empty() || !resource_type.is_named() || weight <= 0.0 {
                return Err(bad("keyword, named type and positive weight required"));
            }
            entries.push(GazetteerEntry {
                tokens,
                resource_type,
                weight,
            });
        }
        for t in [
            ResourceType::Corpus,
            ResourceType::LexicalConceptualResource,
            ResourceType::ToolService,
        ] {
            if !entries.iter().any(|e| e.resource_type == t) {
                return Err(HarmonizeError::Table {
                    line: 0,
                    reason: format!("no keyword for {}", t.label()),
                });
            }
        }
        Ok(TypeGazetteer { entries })
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    /// Summed keyword weights per named type, in `Corpus`, `Lexical...`, `Tool/Service` order.
    pub fn scores(&self, tokens: &[String]) -> [f64; 3] {
        let mut scores = [0.0; 3];
        for e in &self.entries {
            let hits = count_sequence(tokens, &e.tokens);
            if hits > 0 {
                scores[slot(&e.resource_type)] += e.weight * hits as f64;
            }
        }
        scores
    }

    /// The unique best-scoring type for `text`; none on zero score or a tie.
    pub fn classify_text(&self, text: &str) -> Option<ResourceType> {
        argmax(self.scores(&tokenize(text)))
    }
}

fn slot(t: &ResourceType) -> usize {
    match t {
        ResourceType::Corpus => 0,
        ResourceType::LexicalConceptualResource => 1,
        _ => 2,
    }
}

fn count_sequence(tokens: &[String], seq: &[String]) -> usize {
    if seq.is_empty() || tokens.len() < seq.len() {
        return 0;
    }
    tokens.windows(seq.len()).filter(|w| *w == seq).count()
}

fn argmax(scores: [f64; 3]) -> Option<ResourceType> {
    let best = scores.iter().cloned().fold(0.0, f64::max);
    if best <= 0.0 || scores.iter().filter(|s| **s == best).count() > 1 {
        return None;
    }
    match scores.iter().position(|s| *s == best)? {
        0 => Some(ResourceType::Corpus),
        1 => Some(ResourceType::LexicalConceptualResource),
        _ => Some(ResourceType::ToolService),
    }
}

/// A named type for the record. An explicit named source type wins; a raw
/// source label is classified on its own first; otherwise the keywords in
/// titles, descriptions and subjects decide. Ties yield none.
pub fn classify_type(record: &CatalogRecord, gaz: &TypeGazetteer) -> Option<ResourceType> {
    match &record.resource_type {
        Some(t) if t.is_named() => return Some(t.clone()),
        Some(ResourceType::Other(label)) => {
            if let Some(t) = gaz.classify_text(label) {
                return Some(t);
            }
        }
        _ => {}
    }
    let mut tokens = Vec::new();
    for t in record.title.iter().chain(&record.description) {
        tokens.extend(tokenize(&t.value));
        // keep sequences from spanning two fields
        tokens.push(String::new());
    }
    for s in &record.subjects {
        tokens.extend(tokenize(s));
        tokens.push(String::new());
    }
    argmax(gaz.scores(&tokens))
}
