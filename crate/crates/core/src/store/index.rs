use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::Store;
use crate::catalog::{facet_values, CatalogRecord, FacetKind};
use crate::harmonize::tokenize;

/// Facets whose values are literals, and so are tokenized for text search.
const TEXT_FACETS: [FacetKind; 8] = [
    FacetKind::Title,
    FacetKind::Description,
    FacetKind::Language,
    FacetKind::Type,
    FacetKind::Rights,
    FacetKind::Creator,
    FacetKind::Subject,
    FacetKind::ContactPoint,
];

/// Per facet, each value with the sorted positions of the records carrying it.
#[derive(Debug, Clone, Default)]
pub struct FacetIndex {
    postings: BTreeMap<FacetKind, BTreeMap<String, Vec<u32>>>,
}

impl FacetIndex {
    pub(super) fn build(records: &[CatalogRecord]) -> Self {
        let mut postings: BTreeMap<FacetKind, BTreeMap<String, Vec<u32>>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            for f in FacetKind::ALL {
                let values: BTreeSet<String> = facet_values(r, f).into_iter().collect();
                for v in values {
                    postings.entry(f).or_default().entry(v).or_default().push(i as u32);
                }
            }
        }
        FacetIndex { postings }
    }

    /// Record positions (into `Store::records`) carrying `value` for `facet`.
    pub fn postings(&self, facet: FacetKind, value: &str) -> &[u32] {
        self.postings
            .get(&facet)
            .and_then(|m| m.get(value))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Every value of `facet` with its record count, in value order.
    pub fn values(&self, facet: FacetKind) -> impl Iterator<Item = (&str, usize)> {
        self.postings
            .get(&facet)
            .into_iter()
            .flat_map(|m| m.iter().map(|(v, p)| (v.as_str(), p.len())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub record: u32,
    pub facet: FacetKind,
    /// Token offset within the record's text for that facet.
    pub position: u32,
}

/// Token to postings, sorted by record.
#[derive(Debug, Clone, Default)]
pub struct TextIndex {
    postings: HashMap<String, Vec<Posting>>,
}

impl TextIndex {
    pub(super) fn build(records: &[CatalogRecord]) -> Self {
        let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            for f in TEXT_FACETS {
                let mut position = 0u32;
                for v in facet_values(r, f) {
                    for tok in tokenize(&v) {
                        postings.entry(tok).or_default().push(Posting {
                            record: i as u32,
                            facet: f,
                            position,
                        });
                        position += 1;
                    }
                }
            }
        }
        TextIndex { postings }
    }

    pub fn postings(&self, token: &str) -> &[Posting] {
        self.postings.get(token).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn token_count(&self) -> usize {
        self.postings.len()
    }

    /// Number of records with at least one token in `facet`.
    pub fn records_with(&self, facet: FacetKind) -> usize {
        let mut seen = BTreeSet::new();
        for ps in self.postings.values() {
            seen.extend(ps.iter().filter(|p| p.facet == facet).map(|p| p.record));
        }
        seen.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchQuery {
    /// Conjunctive facet constraints.
    pub filters: Vec<(FacetKind, String)>,
    pub text: Option<String>,
    /// 1-based.
    pub page: usize,
    pub page_size: usize,
    /// Values kept per facet in the counts.
    pub facet_limit: usize,
}

impl Default for SearchQuery {
    fn default() -> Self {
        SearchQuery {
            filters: Vec::new(),
            text: None,
            page: 1,
            page_size: 20,
            facet_limit: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordSummary {
    pub id: String,
    pub title: Option<String>,
    pub languages: Vec<String>,
    #[serde(rename = "type")]
    pub resource_type: Option<String>,
    pub score: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FacetCount {
    pub value: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub total: usize,
    pub page: usize,
    pub page_size: usize,
    pub hits: Vec<RecordSummary>,
    /// Per facet in `FacetKind::ALL` order, values by descending count then value.
    pub facet_counts: Vec<(FacetKind, Vec<FacetCount>)>,
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Record positions with their relevance score, in record order.
fn text_matches(text: &TextIndex, query: &str) -> Option<Vec<(u32, usize)>> {
    let tokens: BTreeSet<String> = tokenize(query).into_iter().collect();
    if tokens.is_empty() {
        return None;
    }
    let mut scores: Option<BTreeMap<u32, usize>> = None;
    for tok in &tokens {
        let mut hits: BTreeMap<u32, usize> = BTreeMap::new();
        for p in text.postings(tok) {
            *hits.entry(p.record).or_default() += 1;
        }
        scores = Some(match scores {
            None => hits,
            Some(prev) => prev
                .into_iter()
                .filter_map(|(r, s)| hits.get(&r).map(|h| (r, s + h)))
                .collect(),
        });
    }
    Some(scores.unwrap_or_default().into_iter().collect())
}

pub(super) fn search(store: &Store, query: &SearchQuery) -> SearchResult {
    let records = store.records();
    let mut selected: Vec<u32> = (0..records.len() as u32).collect();
    for (facet, value) in &query.filters {
        selected = intersect(&selected, store.facets().postings(*facet, value));
    }
    let mut scored: Vec<(u32, usize)> = match query.text.as_deref().and_then(|t| text_matches(store.text(), t)) {
        None => selected.into_iter().map(|r| (r, 0)).collect(),
        Some(matches) => {
            let keep: BTreeSet<u32> = selected.into_iter().collect();
            matches.into_iter().filter(|(r, _)| keep.contains(r)).collect()
        }
    };
    // record positions follow id order, so this is score then IRI
    scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut facet_counts = Vec::new();
    for f in FacetKind::ALL {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for (r, _) in &scored {
            let values: BTreeSet<String> = facet_values(&records[*r as usize], f).into_iter().collect();
            for v in values {
                *counts.entry(v).or_default() += 1;
            }
        }
        let mut list: Vec<FacetCount> = counts.into_iter().map(|(value, count)| FacetCount { value, count }).collect();
        list.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.value.cmp(&b.value)));
        list.truncate(query.facet_limit);
        facet_counts.push((f, list));
    }

    let page = query.page.max(1);
    let page_size = query.page_size.max(1);
    let hits = scored
        .iter()
        .skip((page - 1).saturating_mul(page_size))
        .take(page_size)
        .map(|&(r, score)| summarize(&records[r as usize], score))
        .collect();
    SearchResult {
        total: scored.len(),
        page,
        page_size,
        hits,
        facet_counts,
    }
}

fn summarize(r: &CatalogRecord, score: usize) -> RecordSummary {
    RecordSummary {
        id: r.id.clone(),
        title: r.display_title().map(str::to_string),
        languages: facet_values(r, FacetKind::Language),
        resource_type: r.resource_type.as_ref().map(|t| t.label().to_string()),
        score,
    }
}
