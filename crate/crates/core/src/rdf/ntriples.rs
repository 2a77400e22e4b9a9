use super::lex::{decode_utf8, BlankScope, Cursor};
use super::{Graph, SyntaxError, Term, Triple};

/// Parses an N-Triples document. Blank node labels are renamed to `b<n>`.
pub fn parse_ntriples(input: &[u8]) -> Result<Graph, SyntaxError> {
    let text = decode_utf8(input)?;
    let mut graph = Graph::new();
    let mut blanks = BlankScope::default();
    for (idx, line) in text.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut cur = Cursor::at_line(line, idx + 1);
        cur.skip_inline_ws();
        if cur.is_eof() || cur.peek() == Some('#') {
            continue;
        }
        let triple = parse_statement(&mut cur, &mut blanks)?;
        graph.insert(triple);
    }
    Ok(graph)
}

fn parse_statement(cur: &mut Cursor<'_>, blanks: &mut BlankScope) -> Result<Triple, SyntaxError> {
    let subject = match cur.peek() {
        Some('<') => iri_term(cur)?,
        Some('_') => blank_term(cur, blanks)?,
        _ => return Err(cur.error("expected IRI or blank node as subject")),
    };
    cur.skip_inline_ws();
    if cur.peek() != Some('<') {
        return Err(cur.error("expected IRI as predicate"));
    }
    let predicate = iri_term(cur)?;
    cur.skip_inline_ws();
    let object = match cur.peek() {
        Some('<') => iri_term(cur)?,
        Some('_') => blank_term(cur, blanks)?,
        Some('"') => literal_term(cur)?,
        _ => return Err(cur.error("expected IRI, blank node or literal as object")),
    };
    cur.skip_inline_ws();
    cur.expect('.')?;
    cur.skip_inline_ws();
    if !(cur.is_eof() || cur.peek() == Some('#')) {
        return Err(cur.error("unexpected content after '.'"));
    }
    Triple::new(subject, predicate, object).map_err(|e| cur.error(e.to_string()))
}

fn iri_term(cur: &mut Cursor<'_>) -> Result<Term, SyntaxError> {
    let err_at = cur.error("");
    let iri = cur.iriref()?;
    Term::iri(iri).map_err(|e| SyntaxError {
        reason: e.to_string(),
        ..err_at
    })
}

fn blank_term(cur: &mut Cursor<'_>, blanks: &mut BlankScope) -> Result<Term, SyntaxError> {
    if !cur.starts_with("_:") {
        return Err(cur.error("expected '_:'"));
    }
    cur.advance(2);
    let label = cur.blank_label()?;
    Ok(Term::Blank(blanks.named(&label)))
}

fn literal_term(cur: &mut Cursor<'_>) -> Result<Term, SyntaxError> {
    cur.expect('"')?;
    let lexical = cur.string_body('"', false)?;
    if cur.eat('@') {
        let at = cur.error("");
        let lang = cur.lang_tag()?;
        Term::lang_literal(lexical, lang).map_err(|e| SyntaxError {
            reason: e.to_string(),
            ..at
        })
    } else if cur.starts_with("^^") {
        cur.advance(2);
        let at = cur.error("");
        let dt = cur.iriref()?;
        Term::typed_literal(lexical, dt).map_err(|e| SyntaxError {
            reason: e.to_string(),
            ..at
        })
    } else {
        Ok(Term::literal(lexical))
    }
}
