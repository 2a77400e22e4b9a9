use std::fmt;

use thiserror::Error;

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid IRI {0:?}: {1}")]
    InvalidIri(String, &'static str),
    #[error("invalid blank node label {0:?}")]
    InvalidBlankLabel(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("{0} may not appear in the {1} position")]
    Position(&'static str, &'static str),
}

/// An RDF term.
///
/// Construct through [`Term::iri`], [`Term::blank`] and the literal constructors so
/// the variant invariants hold; the enum is still matchable by callers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal(Literal),
    Blank(String),
}

/// A literal. At most one of language tag and datatype is set; `xsd:string` is
/// stored as no datatype, and a language tag implies `rdf:langString`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    lang: Option<String>,
    datatype: Option<String>,
}

impl Literal {
    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn lang(&self) -> Option<&str> {
        self.lang.as_deref()
    }

    /// The explicit datatype, `None` for simple and language-tagged literals.
    pub fn datatype(&self) -> Option<&str> {
        self.datatype.as_deref()
    }

    /// The datatype IRI including the implicit ones.
    pub fn effective_datatype(&self) -> &str {
        match (&self.lang, &self.datatype) {
            (Some(_), _) => RDF_LANG_STRING,
            (None, Some(dt)) => dt,
            (None, None) => XSD_STRING,
        }
    }

    /// A simple literal has neither language tag nor a non-string datatype.
    pub fn is_simple(&self) -> bool {
        self.lang.is_none() && self.datatype.is_none()
    }
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Result<Self, TermError> {
        let value = value.into();
        check_iri(&value).map_err(|reason| TermError::InvalidIri(value.clone(), reason))?;
        Ok(Term::Iri(value))
    }

    pub fn blank(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        if is_valid_blank_label(&label) {
            Ok(Term::Blank(label))
        } else {
            Err(TermError::InvalidBlankLabel(label))
        }
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal {
            lexical: lexical.into(),
            lang: None,
            datatype: None,
        })
    }

    pub fn lang_literal(
        lexical: impl Into<String>,
        lang: impl Into<String>,
    ) -> Result<Self, TermError> {
        let lang = lang.into();
        if !is_valid_lang_tag(&lang) {
            return Err(TermError::InvalidLanguageTag(lang));
        }
        Ok(Term::Literal(Literal {
            lexical: lexical.into(),
            lang: Some(lang.to_ascii_lowercase()),
            datatype: None,
        }))
    }

    pub fn typed_literal(
        lexical: impl Into<String>,
        datatype: impl Into<String>,
    ) -> Result<Self, TermError> {
        let datatype = datatype.into();
        check_iri(&datatype).map_err(|reason| TermError::InvalidIri(datatype.clone(), reason))?;
        if datatype == RDF_LANG_STRING {
            return Err(TermError::InvalidIri(
                datatype,
                "rdf:langString requires a language tag",
            ));
        }
        let datatype = (datatype != XSD_STRING).then_some(datatype);
        Ok(Term::Literal(Literal {
            lexical: lexical.into(),
            lang: None,
            datatype,
        }))
    }

    /// Literal with an optional language tag; `None` gives a simple literal.
    pub fn text(lexical: impl Into<String>, lang: Option<&str>) -> Result<Self, TermError> {
        match lang {
            Some(lang) => Term::lang_literal(lexical, lang),
            None => Ok(Term::literal(lexical)),
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_blank(&self) -> Option<&str> {
        match self {
            Term::Blank(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// The value a user would read: IRI string, literal lexical form or blank label.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri(v) | Term::Blank(v) => v,
            Term::Literal(l) => &l.lexical,
        }
    }
}

/// N-Triples rendering of the term.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(v) => write_iri(f, v),
            Term::Blank(b) => write!(f, "_:{b}"),
            Term::Literal(l) => {
                f.write_str("\"")?;
                write_escaped_string(f, &l.lexical)?;
                f.write_str("\"")?;
                if let Some(lang) = &l.lang {
                    write!(f, "@{lang}")
                } else if let Some(dt) = &l.datatype {
                    f.write_str("^^")?;
                    write_iri(f, dt)
                } else {
                    Ok(())
                }
            }
        }
    }
}

pub(crate) fn write_iri(out: &mut impl fmt::Write, iri: &str) -> fmt::Result {
    out.write_char('<')?;
    for c in iri.chars() {
        if is_iri_forbidden(c) {
            write!(out, "\\u{:04X}", c as u32)?;
        } else {
            out.write_char(c)?;
        }
    }
    out.write_char('>')
}

/// Escapes a string body with the ECHAR subset `\" \\ \n \r \t`; other control
/// characters become `\uXXXX` and everything else is written verbatim.
pub(crate) fn write_escaped_string(out: &mut impl fmt::Write, s: &str) -> fmt::Result {
    for c in s.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\r' => out.write_str("\\r")?,
            '\t' => out.write_str("\\t")?,
            c if (c as u32) < 0x20 || c as u32 == 0x7f => write!(out, "\\u{:04X}", c as u32)?,
            c => out.write_char(c)?,
        }
    }
    Ok(())
}

fn is_iri_forbidden(c: char) -> bool {
    (c as u32) <= 0x20 || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

fn check_iri(value: &str) -> Result<(), &'static str> {
    if value.is_empty() {
        return Err("empty");
    }
    if value.chars().any(char::is_whitespace) {
        return Err("contains whitespace");
    }
    if value.chars().any(is_iri_forbidden) {
        return Err("contains a character not allowed in IRIs");
    }
    if scheme_of(value).is_none() {
        return Err("missing scheme");
    }
    Ok(())
}

/// True when `value` would be accepted by [`Term::iri`].
pub fn is_valid_iri(value: &str) -> bool {
    check_iri(value).is_ok()
}

/// The scheme component (`ALPHA *( ALPHA / DIGIT / "+" / "-" / "." ) ":"`), if any.
pub fn scheme_of(value: &str) -> Option<&str> {
    let colon = value.find(':')?;
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    let first = chars.next()?;
    if !first.is_ascii_alphabetic() {
        return None;
    }
    chars
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        .then_some(scheme)
}

fn is_valid_blank_label(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        Some(c) if c.is_alphanumeric() || c == '_' => {}
        _ => return false,
    }
    !label.ends_with('.') && chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

pub(crate) fn is_valid_lang_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let Some(primary) = parts.next() else {
        return false;
    };
    if primary.is_empty() || primary.len() > 8 || !primary.chars().all(|c| c.is_ascii_alphabetic())
    {
        return false;
    }
    parts.all(|p| !p.is_empty() && p.len() <= 8 && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

/// An RDF triple. The subject is never a literal and the predicate is always an IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, TermError> {
        if subject.is_literal() {
            return Err(TermError::Position("a literal", "subject"));
        }
        if predicate.as_iri().is_none() {
            return Err(TermError::Position("a non-IRI term", "predicate"));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn predicate_iri(&self) -> &str {
        self.predicate.value()
    }

    pub fn into_parts(self) -> (Term, Term, Term) {
        (self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}
