//! The unified record model: DCAT datasets extended with a handful of
//! language-resource properties, and its mapping to and from RDF.

pub mod vocab;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rdf::{Graph, Term, Triple};
use vocab::*;

/// The nine browsable facets, in completeness-report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FacetKind {
    Title,
    Description,
    Language,
    Type,
    Rights,
    Creator,
    Subject,
    ContactPoint,
    AccessUrl,
}

impl FacetKind {
    pub const ALL: [FacetKind; 9] = [
        FacetKind::Title,
        FacetKind::Description,
        FacetKind::Language,
        FacetKind::Type,
        FacetKind::Rights,
        FacetKind::Creator,
        FacetKind::Subject,
        FacetKind::ContactPoint,
        FacetKind::AccessUrl,
    ];

    pub fn property_iri(self) -> &'static str {
        match self {
            FacetKind::Title => DCT_TITLE,
            FacetKind::Description => DCT_DESCRIPTION,
            FacetKind::Language => DCT_LANGUAGE,
            FacetKind::Type => DCT_TYPE,
            FacetKind::Rights => DCT_RIGHTS,
            FacetKind::Creator => DCT_CREATOR,
            FacetKind::Subject => DCT_SUBJECT,
            FacetKind::ContactPoint => DCAT_CONTACT_POINT,
            FacetKind::AccessUrl => DCAT_ACCESS_URL,
        }
    }

    /// Human label, e.g. "Contact Point".
    pub fn label(self) -> &'static str {
        match self {
            FacetKind::Title => "Title",
            FacetKind::Description => "Description",
            FacetKind::Language => "Language",
            FacetKind::Type => "Type",
            FacetKind::Rights => "Rights",
            FacetKind::Creator => "Creator",
            FacetKind::Subject => "Subject",
            FacetKind::ContactPoint => "Contact Point",
            FacetKind::AccessUrl => "Access URL",
        }
    }

    /// Parameter name used by the HTTP API, e.g. "contactPoint".
    pub fn name(self) -> &'static str {
        match self {
            FacetKind::Title => "title",
            FacetKind::Description => "description",
            FacetKind::Language => "language",
            FacetKind::Type => "type",
            FacetKind::Rights => "rights",
            FacetKind::Creator => "creator",
            FacetKind::Subject => "subject",
            FacetKind::ContactPoint => "contactPoint",
            FacetKind::AccessUrl => "accessUrl",
        }
    }

    /// Accepts the API name, the variant name or the label, case-insensitively.
    pub fn from_name(name: &str) -> Option<Self> {
        let wanted: String = name
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        FacetKind::ALL.into_iter().find(|f| {
            f.name().to_lowercase() == wanted
                || f.label().replace(' ', "").to_lowercase() == wanted
        })
    }
}

impl fmt::Display for FacetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResourceType {
    Corpus,
    LexicalConceptualResource,
    ToolService,
    Other(String),
}

impl ResourceType {
    pub fn label(&self) -> &str {
        match self {
            ResourceType::Corpus => "Corpus",
            ResourceType::LexicalConceptualResource => "Lexical Conceptual Resource",
            ResourceType::ToolService => "Tool/Service",
            ResourceType::Other(label) => label,
        }
    }

    /// Maps the canonical labels and their common spellings (`lexicalConceptualResource`,
    /// `tool service`, ...) to the named variants; anything else becomes `Other`.
    pub fn from_label(label: &str) -> Self {
        let key: String = label
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        match key.as_str() {
            "corpus" => ResourceType::Corpus,
            "lexicalconceptualresource" => ResourceType::LexicalConceptualResource,
            "toolservice" => ResourceType::ToolService,
            _ => ResourceType::Other(label.trim().to_string()),
        }
    }

    pub fn is_named(&self) -> bool {
        !matches!(self, ResourceType::Other(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SourceRepo {
    MetaShare,
    Clarin,
    DatahubIo,
    LreMap,
    Other(String),
}

impl SourceRepo {
    pub fn slug(&self) -> String {
        match self {
            SourceRepo::MetaShare => "metashare".into(),
            SourceRepo::Clarin => "clarin".into(),
            SourceRepo::DatahubIo => "datahub".into(),
            SourceRepo::LreMap => "lremap".into(),
            SourceRepo::Other(name) => slugify(name),
        }
    }

    pub fn from_slug(slug: &str) -> Self {
        match slug.to_lowercase().as_str() {
            "metashare" | "meta-share" => SourceRepo::MetaShare,
            "clarin" => SourceRepo::Clarin,
            "datahub" | "datahub.io" | "datahubio" => SourceRepo::DatahubIo,
            "lremap" | "lre-map" => SourceRepo::LreMap,
            other => SourceRepo::Other(slugify(other)),
        }
    }
}

impl fmt::Display for SourceRepo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.slug())
    }
}

fn slugify(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '-'
            }
        })
        .collect();
    let s = s.trim_matches('-').to_string();
    if s.is_empty() {
        "other".into()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LangString {
    pub value: String,
    pub lang: Option<String>,
}

impl LangString {
    pub fn new(value: impl Into<String>, lang: Option<&str>) -> Self {
        LangString {
            value: value.into(),
            lang: lang.map(str::to_ascii_lowercase),
        }
    }

    pub fn plain(value: impl Into<String>) -> Self {
        Self::new(value, None)
    }
}

/// A language as given by the source, with the normalized ISO 639-3 code if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageRef {
    pub raw: String,
    pub iso639_3: Option<String>,
    pub confidence: f64,
}

impl LanguageRef {
    pub fn unresolved(raw: impl Into<String>) -> Self {
        LanguageRef {
            raw: raw.into(),
            iso639_3: None,
            confidence: 0.0,
        }
    }

    pub fn resolved(raw: impl Into<String>, code: impl Into<String>, confidence: f64) -> Self {
        LanguageRef {
            raw: raw.into(),
            iso639_3: Some(code.into()),
            confidence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RightsRef {
    pub raw: String,
    pub license_iri: Option<String>,
}

impl RightsRef {
    pub fn raw(raw: impl Into<String>) -> Self {
        RightsRef {
            raw: raw.into(),
            license_iri: None,
        }
    }
}

/// The four language-resource aspects carried as flat string properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetashareKey {
    Contact,
    Version,
    Validation,
    Usage,
}

impl MetashareKey {
    pub const ALL: [MetashareKey; 4] = [
        MetashareKey::Contact,
        MetashareKey::Version,
        MetashareKey::Validation,
        MetashareKey::Usage,
    ];

    pub fn property_iri(self) -> &'static str {
        match self {
            MetashareKey::Contact => MS_CONTACT,
            MetashareKey::Version => MS_VERSION,
            MetashareKey::Validation => MS_VALIDATION,
            MetashareKey::Usage => MS_USAGE,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetashareKey::Contact => "contact",
            MetashareKey::Version => "version",
            MetashareKey::Validation => "validation",
            MetashareKey::Usage => "usage",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let name = name.trim().trim_start_matches("ms:").to_lowercase();
        MetashareKey::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// One language resource in the unified model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub id: String,
    pub source_repo: SourceRepo,
    pub title: Vec<LangString>,
    pub description: Vec<LangString>,
    pub languages: Vec<LanguageRef>,
    pub resource_type: Option<ResourceType>,
    pub rights: Option<RightsRef>,
    pub creators: Vec<String>,
    pub subjects: Vec<String>,
    pub contact_point: Option<String>,
    pub access_urls: Vec<String>,
    pub see_also: Vec<String>,
    pub metashare_extras: BTreeMap<MetashareKey, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("{0} is not typed as a dcat:Dataset")]
    NotARecord(String),
    #[error("record {id}: {reason}")]
    Invalid { id: String, reason: String },
}

/// Mints `<base>/resource/<repo>/<hash>` from a source identifier.
pub fn mint_id(base: &str, repo: &SourceRepo, source_id: &str) -> String {
    let digest = Sha256::digest(source_id.as_bytes());
    format!(
        "{}/resource/{}/{}",
        base.trim_end_matches('/'),
        repo.slug(),
        &hex::encode(digest)[..16]
    )
}

/// The repository slug embedded in a minted id, if the id has that shape.
pub fn repo_from_id(id: &str) -> Option<SourceRepo> {
    let rest = &id[id.find("/resource/")? + "/resource/".len()..];
    let (slug, key) = rest.split_once('/')?;
    (!slug.is_empty() && !key.is_empty()).then(|| SourceRepo::from_slug(slug))
}

fn short_hash(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())[..16].to_string()
}

impl CatalogRecord {
    pub fn new(id: impl Into<String>, source_repo: SourceRepo) -> Self {
        CatalogRecord {
            id: id.into(),
            source_repo,
            title: Vec::new(),
            description: Vec::new(),
            languages: Vec::new(),
            resource_type: None,
            rights: None,
            creators: Vec::new(),
            subjects: Vec::new(),
            contact_point: None,
            access_urls: Vec::new(),
            see_also: Vec::new(),
            metashare_extras: BTreeMap::new(),
        }
    }

    /// First title, for display.
    pub fn display_title(&self) -> Option<&str> {
        self.title.first().map(|t| t.value.as_str())
    }

    /// Checks the structural invariants: an HTTP id, absolute URLs, well-formed
    /// ISO codes and confidences in [0, 1].
    pub fn validate(&self) -> Result<(), CatalogError> {
        let invalid = |reason: String| CatalogError::Invalid {
            id: self.id.clone(),
            reason,
        };
        let scheme = crate::rdf::scheme_of(&self.id).map(str::to_ascii_lowercase);
        if !crate::rdf::is_valid_iri(&self.id) || !matches!(scheme.as_deref(), Some("http" | "https"))
        {
            return Err(invalid("id is not an HTTP IRI".into()));
        }
        for url in self.access_urls.iter().chain(&self.see_also) {
            if !crate::rdf::is_valid_iri(url) {
                return Err(invalid(format!("{url:?} is not an absolute IRI")));
            }
        }
        for l in &self.languages {
            if !(0.0..=1.0).contains(&l.confidence) {
                return Err(invalid(format!("confidence {} out of range", l.confidence)));
            }
            if let Some(code) = &l.iso639_3 {
                if code.len() != 3 || !code.chars().all(|c| c.is_ascii_lowercase()) {
                    return Err(invalid(format!("{code:?} is not an ISO 639-3 code")));
                }
            }
        }
        if let Some(RightsRef {
            license_iri: Some(iri),
            ..
        }) = &self.rights
        {
            if !crate::rdf::is_valid_iri(iri) {
                return Err(invalid(format!("license {iri:?} is not an IRI")));
            }
        }
        Ok(())
    }

    /// A copy with every list sorted and deduplicated, for order-insensitive comparison.
    pub fn normalized(&self) -> CatalogRecord {
        let mut r = self.clone();
        r.title.sort();
        r.title.dedup();
        r.description.sort();
        r.description.dedup();
        r.languages.sort_by(|a, b| {
            (&a.raw, &a.iso639_3)
                .cmp(&(&b.raw, &b.iso639_3))
                .then(a.confidence.total_cmp(&b.confidence))
        });
        r.languages.dedup();
        for v in [
            &mut r.creators,
            &mut r.subjects,
            &mut r.access_urls,
            &mut r.see_also,
        ] {
            v.sort();
            v.dedup();
        }
        r
    }
}

/// The record's values for one facet, in record order. Languages report the
/// raw source strings.
pub fn facet_values(record: &CatalogRecord, facet: FacetKind) -> Vec<String> {
    match facet {
        FacetKind::Title => record.title.iter().map(|t| t.value.clone()).collect(),
        FacetKind::Description => record.description.iter().map(|t| t.value.clone()).collect(),
        FacetKind::Language => record.languages.iter().map(|l| l.raw.clone()).collect(),
        FacetKind::Type => record
            .resource_type
            .iter()
            .map(|t| t.label().to_string())
            .collect(),
        FacetKind::Rights => record.rights.iter().map(|r| r.raw.clone()).collect(),
        FacetKind::Creator => record.creators.clone(),
        FacetKind::Subject => record.subjects.clone(),
        FacetKind::ContactPoint => record.contact_point.iter().cloned().collect(),
        FacetKind::AccessUrl => record.access_urls.clone(),
    }
}

fn iri(value: &str) -> Term {
    Term::Iri(value.to_string())
}

fn push(g: &mut Graph, s: &Term, p: &str, o: Term) {
    let t = Triple::new(s.clone(), iri(p), o).expect("subject and predicate positions are valid");
    g.insert(t);
}

fn text_term(s: &LangString) -> Term {
    Term::text(s.value.clone(), s.lang.as_deref()).unwrap_or_else(|_| Term::literal(s.value.clone()))
}

fn url_term(url: &str) -> Term {
    Term::iri(url).unwrap_or_else(|_| Term::literal(url))
}

/// Renders a record as RDF. Blank node labels are derived from the record id
/// and the node content so that the output does not depend on list order.
pub fn to_graph(record: &CatalogRecord) -> Graph {
    let mut g = Graph::new();
    let s = iri(&record.id);
    push(&mut g, &s, RDF_TYPE, iri(DCAT_DATASET));
    for t in &record.title {
        push(&mut g, &s, DCT_TITLE, text_term(t));
    }
    for d in &record.description {
        push(&mut g, &s, DCT_DESCRIPTION, text_term(d));
    }
    for lang in &record.languages {
        push(&mut g, &s, DCT_LANGUAGE, Term::literal(lang.raw.clone()));
        if let Some(code) = &lang.iso639_3 {
            push(&mut g, &s, DCT_LANGUAGE, iri(&format!("{LEXVO_ISO639_3}{code}")));
            let node = Term::Blank(format!("l{}", short_hash(&[&record.id, &lang.raw, code])));
            push(&mut g, &s, MS_LANGUAGE_MAPPING, node.clone());
            push(&mut g, &node, MS_LABEL, Term::literal(lang.raw.clone()));
            push(&mut g, &node, MS_CODE, Term::literal(code.clone()));
            push(
                &mut g,
                &node,
                MS_CONFIDENCE,
                Term::typed_literal(format_confidence(lang.confidence), XSD_DECIMAL)
                    .expect("xsd:decimal is a valid IRI"),
            );
        }
    }
    if let Some(t) = &record.resource_type {
        push(&mut g, &s, DCT_TYPE, Term::literal(t.label()));
    }
    if let Some(r) = &record.rights {
        push(&mut g, &s, DCT_RIGHTS, Term::literal(r.raw.clone()));
        if let Some(license) = &r.license_iri {
            push(&mut g, &s, DCT_RIGHTS, url_term(license));
        }
    }
    for c in &record.creators {
        push(&mut g, &s, DCT_CREATOR, Term::literal(c.clone()));
    }
    for subj in &record.subjects {
        push(&mut g, &s, DCT_SUBJECT, Term::literal(subj.clone()));
    }
    if let Some(c) = &record.contact_point {
        push(&mut g, &s, DCAT_CONTACT_POINT, Term::literal(c.clone()));
    }
    for url in &record.access_urls {
        let node = Term::Blank(format!("d{}", short_hash(&[&record.id, url])));
        push(&mut g, &s, DCAT_DISTRIBUTION, node.clone());
        push(&mut g, &node, DCAT_ACCESS_URL, url_term(url));
        push(&mut g, &s, DCAT_ACCESS_URL, url_term(url));
    }
    for url in &record.see_also {
        push(&mut g, &s, RDFS_SEE_ALSO, url_term(url));
    }
    for (key, value) in &record.metashare_extras {
        push(&mut g, &s, key.property_iri(), Term::literal(value.clone()));
    }
    g
}

fn format_confidence(c: f64) -> String {
    let s = format!("{c}");
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

/// What `from_graph` skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Triples on the record node whose predicate is not part of the model.
    pub unknown_predicates: usize,
    /// Known predicates whose object had an unexpected kind of term.
    pub ignored_values: usize,
}

/// Reads the record rooted at `id` back out of a graph.
pub fn from_graph(graph: &Graph, id: &str) -> Result<(CatalogRecord, Diagnostics), CatalogError> {
    let s = iri(id);
    let typed = graph
        .objects(&s, RDF_TYPE)
        .any(|o| o.as_iri() == Some(DCAT_DATASET));
    if !typed {
        return Err(CatalogError::NotARecord(id.to_string()));
    }
    let repo = repo_from_id(id).unwrap_or_else(|| SourceRepo::Other("other".into()));
    let mut rec = CatalogRecord::new(id, repo);
    let mut diag = Diagnostics::default();
    let mut raw_langs: Vec<String> = Vec::new();
    let mut codes: Vec<String> = Vec::new();
    let mut mappings: Vec<(String, String, f64)> = Vec::new();
    let mut rights_raw: Vec<String> = Vec::new();
    let mut rights_iri: Vec<String> = Vec::new();
    let mut types: Vec<String> = Vec::new();
    let mut contacts: Vec<String> = Vec::new();

    let literal = |t: &Term| t.as_literal().map(|l| l.lexical().to_string());
    for t in graph.with_subject(&s) {
        let o = t.object();
        let mut ok = true;
        match t.predicate_iri() {
            RDF_TYPE => {}
            DCT_TITLE | DCT_DESCRIPTION => match o.as_literal() {
                Some(l) => {
                    let v = LangString::new(l.lexical(), l.lang());
                    if t.predicate_iri() == DCT_TITLE {
                        rec.title.push(v)
                    } else {
                        rec.description.push(v)
                    }
                }
                None => ok = false,
            },
            DCT_LANGUAGE => match o {
                Term::Literal(l) => raw_langs.push(l.lexical().to_string()),
                Term::Iri(v) if v.starts_with(LEXVO_ISO639_3) => {
                    codes.push(v[LEXVO_ISO639_3.len()..].to_string())
                }
                _ => ok = false,
            },
            MS_LANGUAGE_MAPPING => {
                let label = graph.objects(o, MS_LABEL).find_map(literal);
                let code = graph.objects(o, MS_CODE).find_map(literal);
                let conf = graph
                    .objects(o, MS_CONFIDENCE)
                    .find_map(literal)
                    .and_then(|c| c.parse::<f64>().ok());
                match (label, code, conf) {
                    (Some(l), Some(c), Some(conf)) => mappings.push((l, c, conf)),
                    _ => ok = false,
                }
            }
            DCT_TYPE => match literal(o) {
                Some(v) => types.push(v),
                None => ok = false,
            },
            DCT_RIGHTS => match o {
                Term::Literal(l) => rights_raw.push(l.lexical().to_string()),
                Term::Iri(v) => rights_iri.push(v.clone()),
                Term::Blank(_) => ok = false,
            },
            DCT_CREATOR => match literal(o) {
                Some(v) => rec.creators.push(v),
                None => ok = false,
            },
            DCT_SUBJECT => match literal(o) {
                Some(v) => rec.subjects.push(v),
                None => ok = false,
            },
            DCAT_CONTACT_POINT => match o {
                Term::Blank(_) => ok = false,
                other => contacts.push(other.value().to_string()),
            },
            DCAT_ACCESS_URL => match o.as_iri() {
                Some(v) => rec.access_urls.push(v.to_string()),
                None => ok = false,
            },
            DCAT_DISTRIBUTION => {
                for url in graph.objects(o, DCAT_ACCESS_URL).filter_map(Term::as_iri) {
                    rec.access_urls.push(url.to_string());
                }
            }
            RDFS_SEE_ALSO => match o.as_iri() {
                Some(v) => rec.see_also.push(v.to_string()),
                None => ok = false,
            },
            other => match MetashareKey::ALL.into_iter().find(|k| k.property_iri() == other) {
                Some(key) => match literal(o) {
                    Some(v) => {
                        rec.metashare_extras.entry(key).or_insert(v);
                    }
                    None => ok = false,
                },
                None => diag.unknown_predicates += 1,
            },
        }
        if !ok {
            diag.ignored_values += 1;
        }
    }

    mappings.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    raw_langs.sort();
    codes.sort();
    for (label, code, conf) in mappings {
        if let Some(i) = raw_langs.iter().position(|r| *r == label) {
            raw_langs.remove(i);
        }
        if let Some(i) = codes.iter().position(|c| *c == code) {
            codes.remove(i);
        }
        rec.languages.push(LanguageRef::resolved(label, code, conf));
    }
    for raw in raw_langs {
        rec.languages.push(LanguageRef::unresolved(raw));
    }
    for code in codes {
        rec.languages.push(LanguageRef::resolved(code.clone(), code, 1.0));
    }

    types.sort();
    rec.resource_type = types.first().map(|t| ResourceType::from_label(t));
    rights_raw.sort();
    rights_iri.sort();
    rec.rights = match (rights_raw.first(), rights_iri.first()) {
        (Some(raw), license) => Some(RightsRef {
            raw: raw.clone(),
            license_iri: license.cloned(),
        }),
        (None, Some(license)) => Some(RightsRef {
            raw: license.clone(),
            license_iri: Some(license.clone()),
        }),
        (None, None) => None,
    };
    contacts.sort();
    rec.contact_point = contacts.into_iter().next();

    rec.title.sort();
    rec.description.sort();
    for v in [
        &mut rec.creators,
        &mut rec.subjects,
        &mut rec.access_urls,
        &mut rec.see_also,
    ] {
        v.sort();
        v.dedup();
    }
    Ok((rec, diag))
}

/// Ids of every dcat:Dataset node in a graph, sorted.
pub fn record_ids(graph: &Graph) -> Vec<String> {
    let mut ids: Vec<String> = graph
        .with_object(&iri(DCAT_DATASET))
        .filter(|t| t.predicate_iri() == RDF_TYPE)
        .filter_map(|t| t.subject().as_iri().map(str::to_string))
        .collect();
    ids.sort();
    ids.dedup();
    ids
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "http://lrhub.example/";

    pub(crate) fn apertium_record() -> CatalogRecord {
        let mut r = CatalogRecord::new(
            mint_id(BASE, &SourceRepo::MetaShare, "c19c566292c211e2"),
            SourceRepo::MetaShare,
        );
        r.title.push(LangString::plain("Spanish LMF Apertium Dictionary"));
        r.description.push(LangString::plain(
            "This is the LMF version of the Apertium Spanish dictionary.",
        ));
        r.languages.push(LanguageRef::unresolved("es"));
        r.languages.push(LanguageRef::resolved("Spanish", "spa", 1.0));
        r.rights = Some(RightsRef::raw("GPL"));
        r.see_also.push("http://metashare.elda.org/repository/browse/c19c566292c211e28763000c291ecfc80a823eb7acd74cda8594e986e44407eb/".into());
        r
    }

    #[test]
    fn minted_ids_are_stable_and_parseable() {
        let id = mint_id("http://h/", &SourceRepo::Clarin, "abc");
        assert_eq!(id, mint_id("http://h", &SourceRepo::Clarin, "abc"));
        assert!(id.starts_with("http://h/resource/clarin/"));
        assert_eq!(id.len(), "http://h/resource/clarin/".len() + 16);
        assert_eq!(repo_from_id(&id), Some(SourceRepo::Clarin));
    }

    #[test]
    fn apertium_language_and_rights_triples() {
        let g = to_graph(&apertium_record());
        let langs: Vec<_> = g
            .with_predicate(&iri(DCT_LANGUAGE))
            .filter_map(|t| t.object().as_literal())
            .map(|l| l.lexical().to_string())
            .collect();
        let mut sorted = langs.clone();
        sorted.sort();
        assert_eq!(sorted, vec!["Spanish", "es"]);
        let rights: Vec<_> = g.with_predicate(&iri(DCT_RIGHTS)).collect();
        assert_eq!(rights.len(), 1);
        assert_eq!(rights[0].object(), &Term::literal("GPL"));
    }

    #[test]
    fn minimal_record_has_two_triples() {
        let mut r = CatalogRecord::new(mint_id(BASE, &SourceRepo::Clarin, "x"), SourceRepo::Clarin);
        r.title.push(LangString::plain("t"));
        assert_eq!(to_graph(&r).len(), 2);
    }

    #[test]
    fn apertium_round_trip() {
        let r = apertium_record();
        let (back, diag) = from_graph(&to_graph(&r), &r.id).unwrap();
        assert_eq!(back.normalized(), r.normalized());
        assert_eq!(diag, Diagnostics::default());
    }

    #[test]
    fn unknown_predicate_counted() {
        let r = apertium_record();
        let mut g = to_graph(&r);
        g.insert(
            Triple::new(iri(&r.id), iri("http://ex/unknown"), Term::literal("?")).unwrap(),
        );
        let (back, diag) = from_graph(&g, &r.id).unwrap();
        assert_eq!(back.normalized(), r.normalized());
        assert_eq!(diag.unknown_predicates, 1);
    }

    #[test]
    fn missing_type_is_not_a_record() {
        let g: Graph = [Triple::new(
            iri("http://lrhub.example/resource/x/y"),
            iri(DCT_TITLE),
            Term::literal("t"),
        )
        .unwrap()]
        .into_iter()
        .collect();
        assert!(matches!(
            from_graph(&g, "http://lrhub.example/resource/x/y"),
            Err(CatalogError::NotARecord(_))
        ));
    }

    #[test]
    fn facet_values_examples() {
        let r = apertium_record();
        assert_eq!(facet_values(&r, FacetKind::Language), vec!["es", "Spanish"]);
        let empty = CatalogRecord::new("http://h/resource/x/1", SourceRepo::Clarin);
        assert!(facet_values(&empty, FacetKind::Rights).is_empty());
        let mut two = empty.clone();
        two.creators = vec!["B. Author".into(), "A. Author".into()];
        assert_eq!(
            facet_values(&two, FacetKind::Creator),
            vec!["B. Author", "A. Author"]
        );
    }

    #[test]
    fn facet_iris_distinct() {
        let mut iris: Vec<_> = FacetKind::ALL.iter().map(|f| f.property_iri()).collect();
        iris.sort();
        iris.dedup();
        assert_eq!(iris.len(), 9);
        for f in FacetKind::ALL {
            assert_eq!(FacetKind::from_name(f.name()), Some(f));
            assert_eq!(FacetKind::from_name(f.label()), Some(f));
        }
        assert_eq!(FacetKind::from_name("color"), None);
    }

    #[test]
    fn resource_type_labels() {
        assert_eq!(ResourceType::Corpus.label(), "Corpus");
        assert_eq!(
            ResourceType::LexicalConceptualResource.label(),
            "Lexical Conceptual Resource"
        );
        assert_eq!(ResourceType::ToolService.label(), "Tool/Service");
        assert_eq!(
            ResourceType::from_label("toolService"),
            ResourceType::ToolService
        );
        assert_eq!(
            ResourceType::from_label("Lexical Conceptual Resource"),
            ResourceType::LexicalConceptualResource
        );
        assert_eq!(
            ResourceType::from_label("Wordnet"),
            ResourceType::Other("Wordnet".into())
        );
    }

    #[test]
    fn distribution_urls_copied_to_root() {
        let mut r = apertium_record();
        r.access_urls.push("http://x/d.zip".into());
        let g = to_graph(&r);
        let root = iri(&r.id);
        assert_eq!(g.objects(&root, DCAT_ACCESS_URL).count(), 1);
        let dist: Vec<_> = g.objects(&root, DCAT_DISTRIBUTION).cloned().collect();
        assert_eq!(dist.len(), 1);
        assert_eq!(g.objects(&dist[0], DCAT_ACCESS_URL).count(), 1);
    }

    #[test]
    fn validate_rejects_bad_ids() {
        assert!(apertium_record().validate().is_ok());
        let r = CatalogRecord::new("urn:x:y", SourceRepo::Clarin);
        assert!(r.validate().is_err());
    }
}
