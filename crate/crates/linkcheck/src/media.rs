use serde::Serialize;

use crate::{LinkError, LinkResult, LinkStatus};

/// Declared media type, display label, machine-readable.
const KNOWN: [(&str, &str, bool); 10] = [
    ("text/html", "HTML", false),
    ("application/rdf+xml", "RDF/XML", true),
    ("image/jpeg", "JPEG Image", false),
    ("application/xml", "XML (application)", true),
    ("text/plain", "Plain Text", true),
    ("application/pdf", "PDF", false),
    ("text/xml", "XML (text)", true),
    ("application/zip", "Zip Archive", true),
    ("image/png", "PNG Image", false),
    ("application/gzip", "gzip Archive", true),
];

/// The media type without parameters, lowercased.
pub fn essence(media_type: &str) -> String {
    media_type.split(';').next().unwrap_or("").trim().to_ascii_lowercase()
}

/// Format label and machine-readability of a declared Content-Type.
/// Unknown types become `Other(<type>)` and count as not machine-readable.
pub fn classify_media(media_type: &str) -> (String, bool) {
    let e = essence(media_type);
    match KNOWN.iter().find(|(m, _, _)| *m == e) {
        Some((_, label, mr)) => (label.to_string(), *mr),
        None => (format!("Other({e})"), false),
    }
}

/// Machine-readability of a label produced by [`classify_media`].
pub fn label_is_machine_readable(label: &str) -> bool {
    KNOWN.iter().any(|(_, l, mr)| *l == label && *mr)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormatRow {
    pub label: String,
    pub count: usize,
    /// Share of the resolved sample, in percent.
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormatReport {
    /// Sorted by count descending, then label.
    pub rows: Vec<FormatRow>,
    pub sample_size: usize,
    pub machine_readable_fraction: f64,
}

impl FormatReport {
    /// Builds the report from per-label counts.
    pub fn from_counts<S: AsRef<str>>(counts: &[(S, usize)]) -> Result<Self, LinkError> {
        let total: usize = counts.iter().map(|(_, n)| n).sum();
        if total == 0 {
            return Err(LinkError::EmptyInput);
        }
        let mut merged: Vec<(String, usize)> = Vec::new();
        for (label, n) in counts {
            match merged.iter_mut().find(|(l, _)| l == label.as_ref()) {
                Some(entry) => entry.1 += n,
                None => merged.push((label.as_ref().to_string(), *n)),
            }
        }
        merged.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let machine: usize = merged
            .iter()
            .filter(|(l, _)| label_is_machine_readable(l))
            .map(|(_, n)| n)
            .sum();
        Ok(FormatReport {
            rows: merged
                .into_iter()
                .filter(|(_, n)| *n > 0)
                .map(|(label, count)| FormatRow {
                    percentage: 100.0 * count as f64 / total as f64,
                    label,
                    count,
                })
                .collect(),
            sample_size: total,
            machine_readable_fraction: machine as f64 / total as f64,
        })
    }

    pub fn row(&self, label: &str) -> Option<&FormatRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// TSV with the format, count and percentage columns, then the sample size and the
    /// machine-readable share as trailing comment lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("Format\tResources\tPercentage\n");
        for r in &self.rows {
            out.push_str(&format!("{}\t{}\t{:.1}%\n", r.label, r.count, r.percentage));
        }
        out.push_str(&format!("# sample size\t{}\n", self.sample_size));
        out.push_str(&format!("# machine-readable\t{:.1}%\n", 100.0 * self.machine_readable_fraction));
        out
    }
}

/// Counts resolved results per format label. Unresolved results are not part
/// of the sample.
pub fn format_report(results: &[LinkResult]) -> Result<FormatReport, LinkError> {
    let labels: Vec<(String, usize)> = results
        .iter()
        .filter_map(|r| match &r.status {
            LinkStatus::Resolved { media_type, .. } => Some((classify_media(media_type).0, 1)),
            LinkStatus::Unresolved(_) => None,
        })
        .collect();
    FormatReport::from_counts(&labels)
}
