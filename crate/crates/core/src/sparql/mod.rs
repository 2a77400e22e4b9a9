//! A SELECT-only SPARQL subset over [`Store`](crate::store::Store).
//!
//! Supported: PREFIX, SELECT [DISTINCT], basic graph patterns with `;` and
//! `,` abbreviations, FILTER, OPTIONAL, UNION, nested groups, ORDER BY,
//! LIMIT and OFFSET. Anything else is rejected with
//! [`SparqlError::UnsupportedFeature`].
//!
//! Regular expressions use the `regex` crate, which matches in linear time
//! and rejects backreferences and lookaround.

mod ast;
mod eval;
mod lexer;
mod parser;

use std::fmt::Write as _;

use thiserror::Error;

use crate::rdf::Term;

pub use ast::{
    CmpOp, Element, Expr, Func, GroupPattern, OrderKey, Projection, Query, TriplePattern, VarOrTerm,
};
pub use eval::{evaluate, evaluate_with};
pub use parser::parse_query;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparqlError {
    /// `position` is a character offset; line and column are 1-based.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        position: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("invalid regular expression {pattern:?}: {reason}")]
    Regex { pattern: String, reason: String },
    #[error("query exceeded its time budget")]
    Timeout,
}

/// Query results. Each row has one cell per entry of `vars`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solutions {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

impl Solutions {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The value bound to `var` in row `row`.
    pub fn get(&self, row: usize, var: &str) -> Option<&Term> {
        let col = self.vars.iter().position(|v| v == var)?;
        self.rows.get(row)?.get(col)?.as_ref()
    }

    /// SPARQL 1.1 JSON results. Unbound cells are omitted from bindings.
    pub fn to_json_results(&self) -> String {
        let mut out = String::from("{\"head\":{\"vars\":[");
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&json_str(v));
        }
        out.push_str("]},\"results\":{\"bindings\":[");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('{');
            let mut first = true;
            for (var, cell) in self.vars.iter().zip(row) {
                let Some(term) = cell else { continue };
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{}:{}", json_str(var), json_cell(term));
            }
            out.push('}');
        }
        out.push_str("]}}");
        out
    }

    /// Tab-separated results: a `?var` header, then terms in N-Triples form
    /// with empty cells for unbound variables.
    pub fn to_tsv(&self) -> String {
        let header: Vec<String> = self.vars.iter().map(|v| format!("?{v}")).collect();
        let mut out = header.join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.as_ref().map_or(String::new(), |t| t.to_string()))
                .collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn json_cell(term: &Term) -> String {
    match term {
        Term::Iri(i) => format!("{{\"type\":\"uri\",\"value\":{}}}", json_str(i)),
        Term::Blank(b) => format!("{{\"type\":\"bnode\",\"value\":{}}}", json_str(b)),
        Term::Literal(l) => {
            let mut s = format!("{{\"type\":\"literal\",\"value\":{}", json_str(l.lexical()));
            if let Some(lang) = l.lang() {
                let _ = write!(s, ",\"xml:lang\":{}", json_str(lang));
            } else if let Some(dt) = l.datatype() {
                let _ = write!(s, ",\"datatype\":{}", json_str(dt));
            }
            s.push('}');
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_empty() {
        let s = Solutions {
            vars: vec!["s".into()],
            rows: vec![],
        };
        assert_eq!(s.to_json_results(), r#"{"head":{"vars":["s"]},"results":{"bindings":[]}}"#);
    }

    #[test]
    fn json_cells() {
        let s = Solutions {
            vars: vec!["s".into(), "l".into(), "n".into(), "b".into()],
            rows: vec![
                vec![
                    Some(Term::iri("http://ex/a").unwrap()),
                    Some(Term::lang_literal("hola", "es").unwrap()),
                    Some(Term::typed_literal("3", "http://www.w3.org/2001/XMLSchema#integer").unwrap()),
                    Some(Term::blank("b0").unwrap()),
                ],
                vec![None, Some(Term::literal("say \"hi\"")), None, None],
            ],
        };
        assert_eq!(
            s.to_json_results(),
            concat!(
                r#"{"head":{"vars":["s","l","n","b"]},"results":{"bindings":["#,
                r#"{"s":{"type":"uri","value":"http://ex/a"},"l":{"type":"literal","value":"hola","xml:lang":"es"},"#,
                r#""n":{"type":"literal","value":"3","datatype":"http://www.w3.org/2001/XMLSchema#integer"},"#,
                r#""b":{"type":"bnode","value":"b0"}},"#,
                r#"{"l":{"type":"literal","value":"say \"hi\""}}]}}"#
            )
        );
        let v: serde_json::Value = serde_json::from_str(&s.to_json_results()).unwrap();
        assert_eq!(v["results"]["bindings"][0]["l"]["xml:lang"], "es");
        assert_eq!(s.to_tsv().lines().next(), Some("?s\t?l\t?n\t?b"));
        assert_eq!(s.to_tsv().lines().nth(2), Some("\t\"say \\\"hi\\\"\"\t\t"));
    }
}
