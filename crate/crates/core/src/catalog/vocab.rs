//! Property IRIs of the unified record model.

use crate::rdf::prefixes::{RDF, RDFS, XSD};
use crate::rdf::PrefixMap;

pub const DCT: &str = "http://purl.org/dc/terms/";
pub const DCAT: &str = "http://www.w3.org/ns/dcat#";
/// Portal-owned namespace for the language-resource specific extras.
pub const MS: &str = "http://lrhub.org/ns/ms#";
/// ISO 639-3 code IRIs.
pub const LEXVO_ISO639_3: &str = "http://lexvo.org/id/iso639-3/";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const DCAT_DATASET: &str = "http://www.w3.org/ns/dcat#Dataset";
pub const DCAT_DISTRIBUTION: &str = "http://www.w3.org/ns/dcat#distribution";
pub const RDFS_SEE_ALSO: &str = "http://www.w3.org/2000/01/rdf-schema#seeAlso";

pub const DCT_TITLE: &str = "http://purl.org/dc/terms/title";
pub const DCT_DESCRIPTION: &str = "http://purl.org/dc/terms/description";
pub const DCT_LANGUAGE: &str = "http://purl.org/dc/terms/language";
pub const DCT_TYPE: &str = "http://purl.org/dc/terms/type";
pub const DCT_RIGHTS: &str = "http://purl.org/dc/terms/rights";
pub const DCT_CREATOR: &str = "http://purl.org/dc/terms/creator";
pub const DCT_SUBJECT: &str = "http://purl.org/dc/terms/subject";
pub const DCAT_CONTACT_POINT: &str = "http://www.w3.org/ns/dcat#contactPoint";
pub const DCAT_ACCESS_URL: &str = "http://www.w3.org/ns/dcat#accessURL";

pub const MS_CONTACT: &str = "http://lrhub.org/ns/ms#contact";
pub const MS_VERSION: &str = "http://lrhub.org/ns/ms#version";
pub const MS_VALIDATION: &str = "http://lrhub.org/ns/ms#validation";
pub const MS_USAGE: &str = "http://lrhub.org/ns/ms#usage";
pub const MS_LANGUAGE_MAPPING: &str = "http://lrhub.org/ns/ms#languageMapping";
pub const MS_LABEL: &str = "http://lrhub.org/ns/ms#label";
pub const MS_CODE: &str = "http://lrhub.org/ns/ms#code";
pub const MS_CONFIDENCE: &str = "http://lrhub.org/ns/ms#confidence";

pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";

/// `(term, IRI, meaning)` for every property the model emits.
pub const VOCABULARY: &[(&str, &str, &str)] = &[
    ("rdf:type", RDF_TYPE, "typed dcat:Dataset for every record"),
    ("dct:title", DCT_TITLE, "Title facet; language-tagged when the source tags it"),
    ("dct:description", DCT_DESCRIPTION, "Description facet"),
    ("dct:language", DCT_LANGUAGE, "Language facet: raw source string, plus an ISO 639-3 IRI when normalized"),
    ("dct:type", DCT_TYPE, "Type facet: Corpus, Lexical Conceptual Resource, Tool/Service or a source label"),
    ("dct:rights", DCT_RIGHTS, "Rights facet: raw statement, plus a license IRI when registered"),
    ("dct:creator", DCT_CREATOR, "Creator facet"),
    ("dct:subject", DCT_SUBJECT, "Subject facet (keywords, tags)"),
    ("dcat:contactPoint", DCAT_CONTACT_POINT, "Contact Point facet"),
    ("dcat:accessURL", DCAT_ACCESS_URL, "Access URL facet; also on each distribution node"),
    ("dcat:distribution", DCAT_DISTRIBUTION, "links a record to one blank distribution node per access URL"),
    ("rdfs:seeAlso", RDFS_SEE_ALSO, "backlinks to the source records"),
    ("ms:contact", MS_CONTACT, "contact information"),
    ("ms:version", MS_VERSION, "version"),
    ("ms:validation", MS_VALIDATION, "validation"),
    ("ms:usage", MS_USAGE, "usage"),
    ("ms:languageMapping", MS_LANGUAGE_MAPPING, "blank node pairing a raw language label (ms:label) with its code (ms:code) and score (ms:confidence)"),
];

/// Prefixes used when writing record graphs.
pub fn prefixes() -> PrefixMap {
    let mut m = PrefixMap::new();
    m.insert("rdf", RDF);
    m.insert("rdfs", RDFS);
    m.insert("xsd", XSD);
    m.insert("dct", DCT);
    m.insert("dcat", DCAT);
    m.insert("ms", MS);
    m.insert("iso639-3", LEXVO_ISO639_3);
    m
}
