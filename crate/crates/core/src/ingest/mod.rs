//! Conversion of source catalog exports into [`CatalogRecord`]s.
//!
//! XML exports are mapped by per-format rule files (see [`load_ruleset`]);
//! DCAT-style JSON is mapped directly. Values meant as IRIs go through
//! [`repair_term`], and every repair is reported.

mod json;
mod rules;
mod xml;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{
    mint_id, CatalogRecord, FacetKind, LangString, LanguageRef, ResourceType, RightsRef, SourceRepo,
};
use crate::rdf::{is_valid_iri, scheme_of, Term};

pub use json::ingest_dcat_json;
pub use rules::{load_ruleset, MappingRule, MappingRuleSet, Selector, Step, Target, Terminal, Transform};
pub use xml::{scan, Element, Item, Node, RawRecord};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("rule file line {line}: {reason}")]
    RuleSyntax { line: usize, reason: String },
    #[error("XML error at line {line}, column {column}: {reason}")]
    Xml {
        line: usize,
        column: usize,
        reason: String,
    },
    #[error("JSON error at line {line}, column {column}: {reason}")]
    Json {
        line: usize,
        column: usize,
        reason: String,
    },
    #[error("cannot decompress input: {0}")]
    Gzip(#[from] std::io::Error),
}

/// Rule files shipped with the crate, by format id.
pub const BUILTIN_RULESETS: [(&str, &str); 2] = [
    ("metashare", include_str!("../../rules/metashare.rules")),
    ("olac-dcmiterms", include_str!("../../rules/olac-dcmiterms.rules")),
];

pub fn builtin_ruleset(format: &str) -> Option<MappingRuleSet> {
    BUILTIN_RULESETS
        .iter()
        .find(|(name, _)| *name == format)
        .map(|(_, text)| load_ruleset(text.as_bytes()).expect("shipped rule files are valid"))
}

/// Schemes accepted as-is for IRI-valued fields.
pub const SCHEME_ALLOWLIST: [&str; 6] = ["http", "https", "ftp", "urn", "doi", "hdl"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RepairKind {
    /// Contains whitespace; kept as a literal.
    WhitespaceDowngrade,
    /// Contains a character IRIs forbid; kept as a literal.
    IllegalCharDowngrade,
    /// Scheme outside the allowlist; kept as a literal.
    SchemeDowngrade,
    /// Relative reference resolved against the record base.
    RelativeResolved,
    /// Relative reference with no base; kept as a literal.
    RelativeDowngrade,
}

impl RepairKind {
    pub fn name(self) -> &'static str {
        match self {
            RepairKind::WhitespaceDowngrade => "WhitespaceDowngrade",
            RepairKind::IllegalCharDowngrade => "IllegalCharDowngrade",
            RepairKind::SchemeDowngrade => "SchemeDowngrade",
            RepairKind::RelativeResolved => "RelativeResolved",
            RepairKind::RelativeDowngrade => "RelativeDowngrade",
        }
    }

    pub fn is_downgrade(self) -> bool {
        self != RepairKind::RelativeResolved
    }
}

impl fmt::Display for RepairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Turns a dirty IRI candidate into a term. Valid absolute IRIs with an
/// allowlisted scheme pass through; everything else becomes a literal unless
/// it is a relative reference that can be resolved against `base`.
pub fn repair_term(raw: &str, base: Option<&str>) -> (Term, Option<RepairKind>) {
    let downgrade = |kind| (Term::literal(raw), Some(kind));
    if raw.chars().any(char::is_whitespace) || raw.is_empty() {
        return downgrade(RepairKind::WhitespaceDowngrade);
    }
    match scheme_of(raw) {
        Some(scheme) => {
            if !is_valid_iri(raw) {
                return downgrade(RepairKind::IllegalCharDowngrade);
            }
            if !SCHEME_ALLOWLIST.contains(&scheme.to_ascii_lowercase().as_str()) {
                return downgrade(RepairKind::SchemeDowngrade);
            }
            (Term::Iri(raw.to_string()), None)
        }
        None => {
            let resolved = base
                .and_then(|b| url::Url::parse(b).ok())
                .and_then(|b| b.join(raw).ok())
                .map(String::from)
                .filter(|r| is_valid_iri(r));
            match resolved {
                Some(iri) => (Term::Iri(iri), Some(RepairKind::RelativeResolved)),
                None if raw.chars().any(is_forbidden) => downgrade(RepairKind::IllegalCharDowngrade),
                None => downgrade(RepairKind::RelativeDowngrade),
            }
        }
    }
}

fn is_forbidden(c: char) -> bool {
    matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') || c.is_control()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repair {
    pub record_id: String,
    pub kind: RepairKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub location: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub records_read: usize,
    pub records_emitted: usize,
    pub repairs: Vec<Repair>,
    pub failures: Vec<Failure>,
}

impl IngestReport {
    pub fn merge(&mut self, other: IngestReport) {
        self.records_read += other.records_read;
        self.records_emitted += other.records_emitted;
        self.repairs.extend(other.repairs);
        self.failures.extend(other.failures);
    }

    pub fn repair_counts(&self) -> BTreeMap<RepairKind, usize> {
        let mut m = BTreeMap::new();
        for r in &self.repairs {
            *m.entry(r.kind).or_insert(0) += 1;
        }
        m
    }

    /// A plain-text summary followed by one line per failure and repair.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "records read\t{}\nrecords emitted\t{}\nfailures\t{}\nrepairs\t{}\n",
            self.records_read,
            self.records_emitted,
            self.failures.len(),
            self.repairs.len()
        );
        for (kind, n) in self.repair_counts() {
            out.push_str(&format!("repair {kind}\t{n}\n"));
        }
        for f in &self.failures {
            out.push_str(&format!("failure\t{}\t{}\n", f.location, f.reason));
        }
        for r in &self.repairs {
            out.push_str(&format!("repair\t{}\t{}\t{}\n", r.record_id, r.kind, r.detail));
        }
        out
    }
}

/// Where records come from and how their ids are minted.
#[derive(Debug, Clone)]
pub struct IngestContext {
    pub base: String,
    pub repo: SourceRepo,
    /// Used in failure locations and for ids of records without a source id.
    pub source_name: String,
}

impl IngestContext {
    pub fn new(base: impl Into<String>, repo: SourceRepo, source_name: impl Into<String>) -> Self {
        IngestContext {
            base: base.into(),
            repo,
            source_name: source_name.into(),
        }
    }
}

/// Mints ids, disambiguating repeated source ids within one run.
#[derive(Debug, Default)]
pub(crate) struct IdMinter {
    seen: HashMap<String, usize>,
}

impl IdMinter {
    pub(crate) fn mint(&mut self, ctx: &IngestContext, source_id: &str) -> String {
        let n = self.seen.entry(source_id.to_string()).or_insert(0);
        *n += 1;
        if *n == 1 {
            mint_id(&ctx.base, &ctx.repo, source_id)
        } else {
            mint_id(&ctx.base, &ctx.repo, &format!("{source_id}#{n}"))
        }
    }
}

/// Decompresses gzip input (detected by its magic bytes); other input is returned as is.
pub fn decompress(input: &[u8]) -> Result<std::borrow::Cow<'_, [u8]>, IngestError> {
    if input.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        flate2::read::MultiGzDecoder::new(input).read_to_end(&mut out)?;
        Ok(out.into())
    } else {
        Ok(input.into())
    }
}

pub(crate) fn line_col(input: &[u8], pos: usize) -> (usize, usize) {
    let pos = pos.min(input.len());
    let before = &input[..pos];
    let line = 1 + before.iter().filter(|b| **b == b'\n').count();
    let start = before.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
    let column = 1 + String::from_utf8_lossy(&before[start..]).chars().count();
    (line, column)
}

fn push_unique(list: &mut Vec<String>, value: String) {
    if !list.contains(&value) {
        list.push(value);
    }
}

/// Accumulates values for one record; shared by the XML and JSON paths.
pub(crate) struct RecordBuilder {
    pub record: CatalogRecord,
    pub base: Option<String>,
    pub repairs: Vec<Repair>,
    pub filled: usize,
}

impl RecordBuilder {
    pub(crate) fn new(id: String, repo: SourceRepo, base: Option<String>) -> Self {
        RecordBuilder {
            record: CatalogRecord::new(id, repo),
            base,
            repairs: Vec::new(),
            filled: 0,
        }
    }

    fn iri_value(&mut self, raw: &str) -> Option<String> {
        let (term, repair) = repair_term(raw, self.base.as_deref());
        if let Some(kind) = repair {
            self.repairs.push(Repair {
                record_id: self.record.id.clone(),
                kind,
                detail: raw.to_string(),
            });
        }
        term.as_iri().map(str::to_string)
    }

    /// Adds one value; returns whether it was stored.
    pub(crate) fn add(&mut self, target: Target, value: &str, lang: Option<&str>) -> bool {
        if value.trim().is_empty() {
            return false;
        }
        let value = value.to_string();
        let r = &mut self.record;
        let lang = lang.filter(|l| Term::lang_literal("x", *l).is_ok());
        match target {
            Target::Facet(FacetKind::Title) => {
                let v = LangString::new(value, lang);
                if !r.title.contains(&v) {
                    r.title.push(v);
                }
            }
            Target::Facet(FacetKind::Description) => {
                let v = LangString::new(value, lang);
                if !r.description.contains(&v) {
                    r.description.push(v);
                }
            }
            Target::Facet(FacetKind::Language) => {
                if !r.languages.iter().any(|l| l.raw == value) {
                    r.languages.push(LanguageRef::unresolved(value));
                }
            }
            Target::Facet(FacetKind::Type) => {
                r.resource_type.get_or_insert_with(|| ResourceType::from_label(&value));
            }
            Target::Facet(FacetKind::Rights) => {
                r.rights.get_or_insert_with(|| RightsRef::raw(value));
            }
            Target::Facet(FacetKind::Creator) => push_unique(&mut r.creators, value),
            Target::Facet(FacetKind::Subject) => push_unique(&mut r.subjects, value),
            Target::Facet(FacetKind::ContactPoint) => {
                r.contact_point.get_or_insert(value);
            }
            Target::Facet(FacetKind::AccessUrl) => match self.iri_value(&value) {
                Some(iri) => push_unique(&mut self.record.access_urls, iri),
                None => return false,
            },
            Target::SeeAlso => match self.iri_value(&value) {
                Some(iri) => push_unique(&mut self.record.see_also, iri),
                None => return false,
            },
            Target::Extra(key) => {
                r.metashare_extras.entry(key).or_insert(value);
            }
        }
        self.filled += 1;
        true
    }
}

/// Maps a stream of XML records with `rules`. Records that yield no value are
/// failures, as are top-level elements containing no record root.
pub fn ingest_xml(
    input: &[u8],
    rules: &MappingRuleSet,
    ctx: &IngestContext,
) -> Result<(Vec<CatalogRecord>, IngestReport), IngestError> {
    let input = decompress(input)?;
    let items = scan(&input, rules)?;
    let mut report = IngestReport::default();
    let mut records = Vec::new();
    let mut minter = IdMinter::default();
    for (ordinal, item) in items.into_iter().enumerate() {
        report.records_read += 1;
        let raw = match item {
            Item::Record(r) => r,
            Item::Stray { name, line, column } => {
                report.failures.push(Failure {
                    location: format!("{}:{line}:{column}", ctx.source_name),
                    reason: format!("element <{name}> contains no record root"),
                });
                continue;
            }
        };
        let el = &raw.element;
        let first = |sel: &Option<Selector>| {
            sel.as_ref().and_then(|s| {
                el.select(s)
                    .into_iter()
                    .map(|(v, _)| v.trim().to_string())
                    .find(|v| !v.is_empty())
            })
        };
        let source_id = first(&rules.id_selector)
            .unwrap_or_else(|| format!("{}#{}", ctx.source_name, ordinal + 1));
        let base = first(&rules.base_selector).or_else(|| el.attr("xml:base").map(str::to_string));
        let mut b = RecordBuilder::new(minter.mint(ctx, &source_id), ctx.repo.clone(), base);
        for rule in &rules.rules {
            let selected = el.select(&rule.selector);
            for (value, lang) in selected {
                let values = rule
                    .transforms
                    .iter()
                    .fold(vec![value], |vs, t| t.apply(vs));
                for v in values {
                    b.add(rule.target, &v, lang.as_deref());
                }
            }
        }
        report.repairs.append(&mut b.repairs);
        if b.filled == 0 {
            report.failures.push(Failure {
                location: format!("{}:{}:{}", ctx.source_name, raw.line, raw.column),
                reason: "no rule matched".into(),
            });
            continue;
        }
        report.records_emitted += 1;
        records.push(b.record);
    }
    Ok((records, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> IngestContext {
        IngestContext::new("http://lrhub.example", SourceRepo::Clarin, "test.xml")
    }

    #[test]
    fn repair_examples() {
        assert_eq!(repair_term("http://ex/a", None), (Term::Iri("http://ex/a".into()), None));
        assert_eq!(
            repair_term("isbn 12345", None),
            (Term::literal("isbn 12345"), Some(RepairKind::WhitespaceDowngrade))
        );
        assert_eq!(repair_term("javascript:void(0)", None).1, Some(RepairKind::SchemeDowngrade));
        assert_eq!(repair_term("http://ex/a|b", None).1, Some(RepairKind::IllegalCharDowngrade));
        assert_eq!(repair_term("data/x.zip", None).1, Some(RepairKind::RelativeDowngrade));
        assert_eq!(
            repair_term("data/x.zip", Some("http://ex.org/repo/")),
            (
                Term::Iri("http://ex.org/repo/data/x.zip".into()),
                Some(RepairKind::RelativeResolved)
            )
        );
        assert_eq!(repair_term("doi:10.1000/182", None).1, None);
    }

    #[test]
    fn three_records() {
        let xml = b"<r><t>a</t></r><r><t>b</t></r><r><t>c</t></r>";
        let rules = load_ruleset(b"@root r\nt/text() -> Title").unwrap();
        let (recs, rep) = ingest_xml(xml, &rules, &ctx()).unwrap();
        assert_eq!(recs.len(), 3);
        assert!(rep.failures.is_empty());
        assert_eq!(rep.records_read, 3);
    }

    #[test]
    fn unknown_root_is_a_failure() {
        let rules = load_ruleset(b"@root r\nt/text() -> Title").unwrap();
        let (recs, rep) = ingest_xml(b"<q><t>a</t></q>", &rules, &ctx()).unwrap();
        assert!(recs.is_empty());
        assert_eq!(rep.failures.len(), 1);
        assert_eq!(rep.records_read, 1);
    }

    #[test]
    fn unmatched_record_is_a_failure() {
        let rules = load_ruleset(b"@root r\nt/text() -> Title").unwrap();
        let (recs, rep) = ingest_xml(b"<r><u>a</u></r><r><t>b</t></r>", &rules, &ctx()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(rep.failures.len(), 1);
        assert_eq!(rep.records_read, rep.records_emitted + rep.failures.len());
    }

    #[test]
    fn gzip_input() {
        use std::io::Write;
        let mut enc = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(b"<r><t>a</t></r>").unwrap();
        let gz = enc.finish().unwrap();
        let rules = load_ruleset(b"@root r\nt/text() -> Title").unwrap();
        let (recs, _) = ingest_xml(&gz, &rules, &ctx()).unwrap();
        assert_eq!(recs[0].title[0].value, "a");
    }

    #[test]
    fn duplicate_source_ids_get_distinct_ids() {
        let rules = load_ruleset(b"@root r\n@id @id\nt/text() -> Title").unwrap();
        let (recs, _) =
            ingest_xml(br#"<r id="x"><t>a</t></r><r id="x"><t>b</t></r>"#, &rules, &ctx()).unwrap();
        assert_ne!(recs[0].id, recs[1].id);
    }

    #[test]
    fn url_repairs_are_reported_and_dropped() {
        let rules = load_ruleset(b"@root r\nt -> Title\nu -> AccessUrl").unwrap();
        let (recs, rep) = ingest_xml(
            b"<r><t>a</t><u>http://ok/x</u><u>not a url</u></r>",
            &rules,
            &ctx(),
        )
        .unwrap();
        assert_eq!(recs[0].access_urls, vec!["http://ok/x"]);
        assert_eq!(rep.repairs.len(), 1);
        assert_eq!(rep.repairs[0].kind, RepairKind::WhitespaceDowngrade);
    }
}
