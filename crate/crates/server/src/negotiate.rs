use std::fmt;

use lrhub_core::rdf::RdfFormat;
use thiserror::Error;

/// A representation the resource pages can be served in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NegotiatedFormat {
    Html,
    RdfXml,
    Turtle,
    NTriples,
    JsonLd,
}

impl NegotiatedFormat {
    /// Server preference, used to break q-value ties.
    pub const PREFERENCE: [NegotiatedFormat; 5] = [
        NegotiatedFormat::Html,
        NegotiatedFormat::Turtle,
        NegotiatedFormat::NTriples,
        NegotiatedFormat::JsonLd,
        NegotiatedFormat::RdfXml,
    ];

    pub fn media_type(self) -> &'static str {
        match self {
            NegotiatedFormat::Html => "text/html",
            NegotiatedFormat::RdfXml => "application/rdf+xml",
            NegotiatedFormat::Turtle => "text/turtle",
            NegotiatedFormat::NTriples => "application/n-triples",
            NegotiatedFormat::JsonLd => "application/ld+json",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            NegotiatedFormat::Html => "html",
            NegotiatedFormat::RdfXml => "rdf",
            NegotiatedFormat::Turtle => "ttl",
            NegotiatedFormat::NTriples => "nt",
            NegotiatedFormat::JsonLd => "jsonld",
        }
    }

    pub fn label(self) -> &'static str {
        match self.rdf() {
            Some(f) => f.label(),
            None => "HTML",
        }
    }

    pub fn from_extension(ext: &str) -> Option<Self> {
        Self::PREFERENCE.into_iter().find(|f| f.extension().eq_ignore_ascii_case(ext))
    }

    /// The RDF serialization behind this format; `None` for HTML.
    pub fn rdf(self) -> Option<RdfFormat> {
        match self {
            NegotiatedFormat::Html => None,
            NegotiatedFormat::RdfXml => Some(RdfFormat::RdfXml),
            NegotiatedFormat::Turtle => Some(RdfFormat::Turtle),
            NegotiatedFormat::NTriples => Some(RdfFormat::NTriples),
            NegotiatedFormat::JsonLd => Some(RdfFormat::JsonLd),
        }
    }
}

impl fmt::Display for NegotiatedFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NegotiationError {
    #[error("none of the acceptable media types can be produced")]
    NotAcceptable,
    #[error("unknown format extension .{0}")]
    UnknownExtension(String),
}

struct Range<'a> {
    kind: &'a str,
    sub: &'a str,
    q: f64,
}

impl Range<'_> {
    /// Specificity when the range covers `media`, or `None`.
    fn covers(&self, media: &str) -> Option<u8> {
        let (kind, sub) = media.split_once('/')?;
        if self.kind == "*" && self.sub == "*" {
            Some(0)
        } else if self.kind.eq_ignore_ascii_case(kind) && self.sub == "*" {
            Some(1)
        } else if self.kind.eq_ignore_ascii_case(kind) && self.sub.eq_ignore_ascii_case(sub) {
            Some(2)
        } else {
            None
        }
    }
}

/// Elements that do not parse as `type/subtype` with a valid q are ignored.
fn parse_ranges(header: &str) -> Vec<Range<'_>> {
    header
        .split(',')
        .filter_map(|element| {
            let mut parts = element.split(';');
            let (kind, sub) = parts.next()?.trim().split_once('/')?;
            let (kind, sub) = (kind.trim(), sub.trim());
            if kind.is_empty() || sub.is_empty() || (kind == "*" && sub != "*") {
                return None;
            }
            let mut q = 1.0;
            for p in parts {
                if let Some((k, v)) = p.split_once('=') {
                    if k.trim().eq_ignore_ascii_case("q") {
                        q = v.trim().parse::<f64>().ok().filter(|q| (0.0..=1.0).contains(q))?;
                    }
                }
            }
            Some(Range { kind, sub, q })
        })
        .collect()
}

/// The q-value the header assigns to `format`: that of the most specific
/// range covering its media type.
fn quality(ranges: &[Range<'_>], format: NegotiatedFormat) -> f64 {
    let mut best: Option<(u8, f64)> = None;
    for r in ranges {
        if let Some(spec) = r.covers(format.media_type()) {
            best = match best {
                Some((s, q)) if s > spec || (s == spec && q >= r.q) => Some((s, q)),
                _ => Some((spec, r.q)),
            };
        }
    }
    best.map_or(0.0, |(_, q)| q)
}

/// Picks the representation for a request. An extension override wins;
/// otherwise the highest-q supported type, with ties going to
/// [`NegotiatedFormat::PREFERENCE`] order. A missing or blank header means HTML.
pub fn negotiate(accept: Option<&str>, extension: Option<&str>) -> Result<NegotiatedFormat, NegotiationError> {
    if let Some(ext) = extension {
        return NegotiatedFormat::from_extension(ext).ok_or_else(|| NegotiationError::UnknownExtension(ext.to_string()));
    }
    let Some(header) = accept.filter(|h| !h.trim().is_empty()) else {
        return Ok(NegotiatedFormat::Html);
    };
    let ranges = parse_ranges(header);
    let mut best: Option<(NegotiatedFormat, f64)> = None;
    for f in NegotiatedFormat::PREFERENCE {
        let q = quality(&ranges, f);
        if q > 0.0 && best.is_none_or(|(_, b)| q > b) {
            best = Some((f, q));
        }
    }
    best.map(|(f, _)| f).ok_or(NegotiationError::NotAcceptable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use NegotiatedFormat::*;

    fn pick(h: &str) -> Result<NegotiatedFormat, NegotiationError> {
        negotiate(Some(h), None)
    }

    #[test]
    fn examples() {
        assert_eq!(pick("text/turtle"), Ok(Turtle));
        assert_eq!(negotiate(None, None), Ok(Html));
        assert_eq!(pick("application/rdf+xml;q=0.9, text/html"), Ok(Html));
        assert_eq!(pick("*/*"), Ok(Html));
        assert_eq!(pick("image/png"), Err(NegotiationError::NotAcceptable));
    }

    #[test]
    fn extension_wins() {
        assert_eq!(negotiate(Some("text/html"), Some("ttl")), Ok(Turtle));
        assert_eq!(negotiate(None, Some("JSONLD")), Ok(JsonLd));
        assert!(matches!(negotiate(None, Some("png")), Err(NegotiationError::UnknownExtension(_))));
    }

    #[test]
    fn specificity_and_ties() {
        assert_eq!(pick("text/*;q=0.5, text/html;q=0"), Ok(Turtle));
        assert_eq!(pick("application/ld+json, application/rdf+xml"), Ok(JsonLd));
        assert_eq!(pick("application/*"), Ok(NTriples));
        assert_eq!(pick("*/*;q=0.1, application/rdf+xml"), Ok(RdfXml));
        assert_eq!(pick("text/html;q=0"), Err(NegotiationError::NotAcceptable));
        assert_eq!(pick("text/turtle;q=2, application/n-triples;q=0.3"), Ok(NTriples));
        assert_eq!(pick("TEXT/Turtle ; Q=0.4"), Ok(Turtle));
    }

    #[test]
    fn media_types_and_extensions_are_unique() {
        let media: std::collections::BTreeSet<_> = PREFERENCE_ALL.iter().map(|f| f.media_type()).collect();
        let ext: std::collections::BTreeSet<_> = PREFERENCE_ALL.iter().map(|f| f.extension()).collect();
        assert_eq!((media.len(), ext.len()), (5, 5));
        for f in PREFERENCE_ALL {
            assert_eq!(NegotiatedFormat::from_extension(f.extension()), Some(f));
            assert_eq!(pick(f.media_type()), Ok(f));
        }
    }

    const PREFERENCE_ALL: [NegotiatedFormat; 5] = NegotiatedFormat::PREFERENCE;
}
