use crate::catalog::{facet_values, CatalogRecord, FacetKind};

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessRow {
    /// None for the "(none)" row.
    pub facet: Option<FacetKind>,
    pub absolute: usize,
    /// Percent in [0, 100]; 0 when there are no records.
    pub relative: f64,
}

impl CompletenessRow {
    pub fn label(&self) -> &'static str {
        self.facet.map_or("(none)", FacetKind::label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    pub total: usize,
    /// The "(none)" row, then one row per facet in `FacetKind::ALL` order.
    pub rows: Vec<CompletenessRow>,
}

impl CompletenessReport {
    pub fn from_counts(total: usize, counts: &[(FacetKind, usize)]) -> Self {
        let pct = |n: usize| {
            if total == 0 {
                0.0
            } else {
                100.0 * n as f64 / total as f64
            }
        };
        let mut rows = vec![CompletenessRow {
            facet: None,
            absolute: total,
            relative: pct(total),
        }];
        for f in FacetKind::ALL {
            let n = counts.iter().find(|(k, _)| *k == f).map_or(0, |(_, n)| *n);
            rows.push(CompletenessRow {
                facet: Some(f),
                absolute: n,
                relative: pct(n),
            });
        }
        CompletenessReport { total, rows }
    }

    /// Counts records with at least one value per facet.
    pub fn from_records(records: &[CatalogRecord]) -> Self {
        let counts: Vec<(FacetKind, usize)> = FacetKind::ALL
            .into_iter()
            .map(|f| (f, records.iter().filter(|r| !facet_values(r, f).is_empty()).count()))
            .collect();
        Self::from_counts(records.len(), &counts)
    }

    pub fn row(&self, facet: FacetKind) -> &CompletenessRow {
        self.rows
            .iter()
            .find(|r| r.facet == Some(facet))
            .expect("every facet has a row")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("Required Facet\tAbsolute Freq\tRelative Frequency\n");
        for r in &self.rows {
            let rel = if self.total == 0 {
                "n/a".to_string()
            } else {
                format!("{:.2}%", r.relative)
            };
            out.push_str(&format!("{}\t{}\t{rel}\n", r.label(), r.absolute));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceTally {
    pub source: String,
    pub records: usize,
    pub triples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStatsRow {
    pub source: String,
    pub records: usize,
    pub triples: usize,
    /// None for a source without records.
    pub triples_per_record: Option<f64>,
}

impl CorpusStatsRow {
    /// Rounded to one decimal, or "n/a".
    pub fn ratio_text(&self) -> String {
        self.triples_per_record.map_or("n/a".into(), |v| format!("{v:.1}"))
    }
}

pub fn corpus_stats(tallies: &[SourceTally]) -> Vec<CorpusStatsRow> {
    tallies
        .iter()
        .map(|t| CorpusStatsRow {
            source: t.source.clone(),
            records: t.records,
            triples: t.triples,
            triples_per_record: (t.records > 0).then(|| t.triples as f64 / t.records as f64),
        })
        .collect()
}

pub fn format_corpus_stats(rows: &[CorpusStatsRow]) -> String {
    let mut out = String::from("source\trecords\ttriples\ttriples_per_record\n");
    for r in rows {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", r.source, r.records, r.triples, r.ratio_text()));
    }
    out
}
