//! Independent parsing through oxrdfio, for checking serializer output.

use ::oxrdf as ox;
use lrhub_core::rdf::{Graph, RdfFormat, Term, Triple};
use oxrdfio::{RdfFormat as OxFormat, RdfParser};

fn ox_format(f: RdfFormat) -> OxFormat {
    match f {
        RdfFormat::NTriples => OxFormat::NTriples,
        RdfFormat::Turtle => OxFormat::Turtle,
        RdfFormat::RdfXml => OxFormat::RdfXml,
        RdfFormat::JsonLd => OxFormat::JsonLd {
            profile: oxrdfio::JsonLdProfileSet::empty(),
        },
    }
}

fn subject(s: ox::NamedOrBlankNode) -> Term {
    match s {
        ox::NamedOrBlankNode::NamedNode(n) => Term::iri(n.into_string()).expect("oxrdf IRI"),
        ox::NamedOrBlankNode::BlankNode(b) => Term::blank(format!("ox{}", b.as_str())).expect("label"),
    }
}

fn object(o: ox::Term) -> Term {
    match o {
        ox::Term::NamedNode(n) => Term::iri(n.into_string()).expect("oxrdf IRI"),
        ox::Term::BlankNode(b) => Term::blank(format!("ox{}", b.as_str())).expect("label"),
        ox::Term::Literal(l) => match l.language() {
            Some(lang) => Term::lang_literal(l.value(), lang).expect("tag"),
            None => Term::typed_literal(l.value(), l.datatype().as_str()).expect("datatype"),
        },
        #[allow(unreachable_patterns)]
        other => panic!("unexpected term {other}"),
    }
}

/// Parses `bytes` with oxrdfio into a graph; panics on a syntax error.
pub fn reparse(bytes: &[u8], format: RdfFormat) -> Graph {
    RdfParser::from_format(ox_format(format))
        .for_slice(bytes)
        .map(|q| {
            let q = q.unwrap_or_else(|e| panic!("oxrdfio rejects {} output: {e}\n{}", format.label(), String::from_utf8_lossy(bytes)));
            Triple::new(subject(q.subject), Term::iri(q.predicate.into_string()).expect("IRI"), object(q.object))
                .expect("valid positions")
        })
        .collect()
}
