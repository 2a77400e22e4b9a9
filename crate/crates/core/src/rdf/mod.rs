//! RDF terms, indexed graphs, the N-Triples and Turtle parsers, and writers for
//! N-Triples, Turtle, RDF/XML and JSON-LD.

mod graph;
mod iso;
mod lex;
mod ntriples;
pub mod prefixes;
mod term;
mod turtle;
mod writer;

use thiserror::Error;

pub use graph::Graph;
pub use iso::graph_isomorphic;
pub use ntriples::parse_ntriples;
pub use prefixes::PrefixMap;
pub use term::{is_valid_iri, scheme_of, Literal, Term, TermError, Triple, RDF_LANG_STRING, XSD_STRING};
pub use turtle::parse_turtle;
pub use writer::{
    serialize, serialize_with_prefixes, split_qname, to_jsonld, to_ntriples, to_rdfxml, to_turtle,
    RdfFormat, SerializeError,
};

/// A located parse failure. Lines and columns are 1-based; columns count characters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {column}: {reason}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub reason: String,
}

/// Parses `input` in one of the formats that have a reader.
pub fn parse(input: &[u8], format: RdfFormat) -> Result<Graph, ParseError> {
    match format {
        RdfFormat::NTriples => Ok(parse_ntriples(input)?),
        RdfFormat::Turtle => Ok(parse_turtle(input)?),
        other => Err(ParseError::NoReader(other)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("no reader for {}", .0.label())]
    NoReader(RdfFormat),
}
