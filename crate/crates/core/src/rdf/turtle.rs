use url::Url;

use super::lex::{decode_utf8, BlankScope, Cursor};
use super::prefixes::{PrefixMap, RDF_TYPE, XSD};
use super::{Graph, SyntaxError, Term, Triple};

/// Parses a Turtle document.
///
/// Supported: `@prefix`/`PREFIX`, `@base`/`BASE`, the `a` keyword, predicate-object
/// lists, object lists, blank node property lists, and string, numeric and
/// boolean literals. Collections are rejected.
pub fn parse_turtle(input: &[u8]) -> Result<Graph, SyntaxError> {
    let text = decode_utf8(input)?;
    let mut p = TurtleParser {
        cur: Cursor::new(text),
        prefixes: PrefixMap::new(),
        base: None,
        blanks: BlankScope::default(),
        graph: Graph::new(),
    };
    p.document()?;
    Ok(p.graph)
}

struct TurtleParser<'a> {
    cur: Cursor<'a>,
    prefixes: PrefixMap,
    base: Option<Url>,
    blanks: BlankScope,
    graph: Graph,
}

impl TurtleParser<'_> {
    fn document(&mut self) -> Result<(), SyntaxError> {
        loop {
            self.cur.skip_ws_and_comments();
            if self.cur.is_eof() {
                return Ok(());
            }
            self.statement()?;
        }
    }

    fn statement(&mut self) -> Result<(), SyntaxError> {
        if self.cur.starts_with("@prefix") {
            self.cur.advance("@prefix".len());
            self.prefix_decl()?;
            self.cur.skip_ws_and_comments();
            return self.cur.expect('.');
        }
        if self.cur.starts_with("@base") {
            self.cur.advance("@base".len());
            self.base_decl()?;
            self.cur.skip_ws_and_comments();
            return self.cur.expect('.');
        }
        if self.cur.starts_with_keyword("PREFIX") {
            self.cur.advance("PREFIX".len());
            return self.prefix_decl();
        }
        if self.cur.starts_with_keyword("BASE") {
            self.cur.advance("BASE".len());
            return self.base_decl();
        }
        self.triples()?;
        self.cur.skip_ws_and_comments();
        self.cur.expect('.')
    }

    fn prefix_decl(&mut self) -> Result<(), SyntaxError> {
        self.cur.skip_ws_and_comments();
        let prefix = self.pn_prefix()?;
        self.cur.expect(':')?;
        self.cur.skip_ws_and_comments();
        let ns = self.iri_ref_resolved()?;
        self.prefixes.insert(prefix, ns);
        Ok(())
    }

    fn base_decl(&mut self) -> Result<(), SyntaxError> {
        self.cur.skip_ws_and_comments();
        let at = self.cur.error("");
        let iri = self.iri_ref_resolved()?;
        self.base = Some(Url::parse(&iri).map_err(|e| SyntaxError {
            reason: format!("invalid base IRI: {e}"),
            ..at
        })?);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), SyntaxError> {
        if self.cur.peek() == Some('[') {
            let subject = self.blank_property_list()?;
            self.cur.skip_ws_and_comments();
            if self.cur.peek() != Some('.') {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = self.subject()?;
        self.cur.skip_ws_and_comments();
        self.predicate_object_list(&subject)
    }

    fn subject(&mut self) -> Result<Term, SyntaxError> {
        match self.cur.peek() {
            Some('<') => self.iri_term(),
            Some('_') if self.cur.starts_with("_:") => self.blank_label_term(),
            Some('(') => Err(self.cur.error("collections are not supported")),
            Some('"' | '\'') => Err(self.cur.error("literal not allowed as subject")),
            Some(_) => self.prefixed_name_term(),
            None => Err(self.cur.error("expected subject")),
        }
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), SyntaxError> {
        loop {
            self.cur.skip_ws_and_comments();
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.cur.skip_ws_and_comments();
            if !self.cur.eat(';') {
                return Ok(());
            }
            // repeated ';' and a trailing ';' are allowed
            loop {
                self.cur.skip_ws_and_comments();
                if !self.cur.eat(';') {
                    break;
                }
            }
            match self.cur.peek() {
                Some('.' | ']') | None => return Ok(()),
                _ => {}
            }
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Term) -> Result<(), SyntaxError> {
        loop {
            self.cur.skip_ws_and_comments();
            let at = self.cur.error("");
            let object = self.object()?;
            let triple = Triple::new(subject.clone(), predicate.clone(), object).map_err(|e| {
                SyntaxError {
                    reason: e.to_string(),
                    ..at
                }
            })?;
            self.graph.insert(triple);
            self.cur.skip_ws_and_comments();
            if !self.cur.eat(',') {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Term, SyntaxError> {
        if self.cur.peek() == Some('a')
            && self
                .cur
                .peek_nth(1)
                .is_some_and(|c| c.is_whitespace() || matches!(c, '<' | '"' | '[' | '_' | '#'))
        {
            self.cur.bump();
            return Ok(Term::Iri(RDF_TYPE.to_string()));
        }
        match self.cur.peek() {
            Some('<') => self.iri_term(),
            Some('_' | '"' | '\'' | '[' | '(') => Err(self.cur.error("predicate must be an IRI")),
            Some(_) => self.prefixed_name_term(),
            None => Err(self.cur.error("expected predicate")),
        }
    }

    fn object(&mut self) -> Result<Term, SyntaxError> {
        match self.cur.peek() {
            Some('<') => self.iri_term(),
            Some('_') if self.cur.starts_with("_:") => self.blank_label_term(),
            Some('[') => self.blank_property_list(),
            Some('(') => Err(self.cur.error("collections are not supported")),
            Some('"' | '\'') => self.rdf_literal(),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => self.numeric(),
            Some(_) if self.cur.starts_with_keyword("true") => {
                self.cur.advance(4);
                Ok(boolean("true"))
            }
            Some(_) if self.cur.starts_with_keyword("false") => {
                self.cur.advance(5);
                Ok(boolean("false"))
            }
            Some(_) => self.prefixed_name_term(),
            None => Err(self.cur.error("expected object")),
        }
    }

    fn blank_property_list(&mut self) -> Result<Term, SyntaxError> {
        self.cur.expect('[')?;
        let node = Term::Blank(self.blanks.fresh());
        self.cur.skip_ws_and_comments();
        if self.cur.eat(']') {
            return Ok(node);
        }
        self.predicate_object_list(&node)?;
        self.cur.skip_ws_and_comments();
        self.cur.expect(']')?;
        Ok(node)
    }

    fn blank_label_term(&mut self) -> Result<Term, SyntaxError> {
        self.cur.advance(2);
        let label = self.cur.blank_label()?;
        Ok(Term::Blank(self.blanks.named(&label)))
    }

    fn iri_ref_resolved(&mut self) -> Result<String, SyntaxError> {
        let at = self.cur.error("");
        let raw = self.cur.iriref()?;
        if super::term::scheme_of(&raw).is_some() {
            return Ok(raw);
        }
        match &self.base {
            Some(base) => base.join(&raw).map(String::from).map_err(|e| SyntaxError {
                reason: format!("cannot resolve relative IRI {raw:?}: {e}"),
                ..at
            }),
            None => Err(SyntaxError {
                reason: format!("relative IRI {raw:?} without a base"),
                ..at
            }),
        }
    }

    fn iri_term(&mut self) -> Result<Term, SyntaxError> {
        let at = self.cur.error("");
        let iri = self.iri_ref_resolved()?;
        Term::iri(iri).map_err(|e| SyntaxError {
            reason: e.to_string(),
            ..at
        })
    }

    fn pn_prefix(&mut self) -> Result<String, SyntaxError> {
        let start = self.cur.rest();
        let mut len = 0;
        if let Some(c) = self.cur.peek() {
            if c.is_alphabetic() {
                while let Some(c) = self.cur.peek() {
                    if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                        self.cur.bump();
                        len += c.len_utf8();
                    } else {
                        break;
                    }
                }
            }
        }
        let prefix = &start[..len];
        if prefix.ends_with('.') {
            return Err(self.cur.error("prefix may not end with '.'"));
        }
        if self.cur.peek() != Some(':') {
            return Err(self.cur.error("expected prefixed name"));
        }
        Ok(prefix.to_string())
    }

    fn prefixed_name_term(&mut self) -> Result<Term, SyntaxError> {
        let at = self.cur.error("");
        let prefix = self.pn_prefix()?;
        self.cur.expect(':')?;
        let local = self.pn_local()?;
        let ns = self.prefixes.namespace(&prefix).ok_or_else(|| SyntaxError {
            reason: format!("undeclared prefix {prefix:?}"),
            ..at.clone()
        })?;
        Term::iri(format!("{ns}{local}")).map_err(|e| SyntaxError {
            reason: e.to_string(),
            ..at
        })
    }

    fn pn_local(&mut self) -> Result<String, SyntaxError> {
        let mut out = String::new();
        loop {
            match self.cur.peek() {
                Some(c) if c.is_alphanumeric() || matches!(c, '_' | '-' | ':') => {
                    self.cur.bump();
                    out.push(c);
                }
                Some('.') => {
                    // '.' only inside a local name, never at its end
                    match self.cur.peek_nth(1) {
                        Some(n) if n.is_alphanumeric() || matches!(n, '_' | '-' | ':' | '.' | '%' | '\\') => {
                            self.cur.bump();
                            out.push('.');
                        }
                        _ => break,
                    }
                }
                Some('%') => {
                    self.cur.bump();
                    out.push('%');
                    for _ in 0..2 {
                        match self.cur.peek() {
                            Some(h) if h.is_ascii_hexdigit() => {
                                self.cur.bump();
                                out.push(h);
                            }
                            _ => return Err(self.cur.error("invalid percent escape")),
                        }
                    }
                }
                Some('\\') => {
                    self.cur.bump();
                    match self.cur.peek() {
                        Some(
                            c @ ('_' | '~' | '.' | '-' | '!' | '$' | '&' | '\'' | '(' | ')' | '*'
                            | '+' | ',' | ';' | '=' | '/' | '?' | '#' | '@' | '%'),
                        ) => {
                            self.cur.bump();
                            out.push(c);
                        }
                        _ => return Err(self.cur.error("invalid local name escape")),
                    }
                }
                _ => break,
            }
        }
        Ok(out)
    }

    fn rdf_literal(&mut self) -> Result<Term, SyntaxError> {
        let quote = self.cur.bump().unwrap_or('"');
        let long = self.cur.peek() == Some(quote) && self.cur.peek_nth(1) == Some(quote);
        if long {
            self.cur.bump();
            self.cur.bump();
        }
        let lexical = self.cur.string_body(quote, long)?;
        let at = self.cur.error("");
        if self.cur.eat('@') {
            let lang = self.cur.lang_tag()?;
            return Term::lang_literal(lexical, lang).map_err(|e| SyntaxError {
                reason: e.to_string(),
                ..at
            });
        }
        if self.cur.starts_with("^^") {
            self.cur.advance(2);
            let dt = match self.cur.peek() {
                Some('<') => self.iri_term()?,
                _ => self.prefixed_name_term()?,
            };
            return Term::typed_literal(lexical, dt.value()).map_err(|e| SyntaxError {
                reason: e.to_string(),
                ..at
            });
        }
        Ok(Term::literal(lexical))
    }

    fn numeric(&mut self) -> Result<Term, SyntaxError> {
        let rest = self.cur.rest();
        let bytes = rest.as_bytes();
        let mut i = 0;
        if matches!(bytes.first(), Some(b'+' | b'-')) {
            i += 1;
        }
        let int_start = i;
        while bytes.get(i).is_some_and(u8::is_ascii_digit) {
            i += 1;
        }
        let int_digits = i - int_start;
        let mut frac_digits = 0;
        if bytes.get(i) == Some(&b'.') && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
            i += 1;
            while bytes.get(i).is_some_and(u8::is_ascii_digit) {
                i += 1;
                frac_digits += 1;
            }
        }
        if int_digits == 0 && frac_digits == 0 {
            return Err(self.cur.error("invalid numeric literal"));
        }
        let mut kind = if frac_digits > 0 { "decimal" } else { "integer" };
        if matches!(bytes.get(i), Some(b'e' | b'E')) {
            let mut j = i + 1;
            if matches!(bytes.get(j), Some(b'+' | b'-')) {
                j += 1;
            }
            let exp_start = j;
            while bytes.get(j).is_some_and(u8::is_ascii_digit) {
                j += 1;
            }
            if j == exp_start {
                return Err(self.cur.error("invalid exponent"));
            }
            i = j;
            kind = "double";
        }
        let lexical = rest[..i].to_string();
        self.cur.advance(i);
        Ok(Term::typed_literal(lexical, format!("{XSD}{kind}")).expect("xsd datatype is valid"))
    }
}

fn boolean(v: &str) -> Term {
    Term::typed_literal(v, format!("{XSD}boolean")).expect("xsd datatype is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn object_list_expansion() {
        let g = parse_turtle(b"@prefix ex: <http://ex/> . ex:a ex:p \"x\", \"y\" .").unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn a_keyword() {
        let g = parse_turtle(b"@prefix ex: <http://ex/> . ex:a a ex:T .").unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.predicate_iri(), RDF_TYPE);
        assert_eq!(t.object(), &Term::iri("http://ex/T").unwrap());
    }

    #[test]
    fn predicate_lists_and_blank_property_lists() {
        let g = parse_turtle(
            br#"PREFIX ex: <http://ex/>
            ex:a ex:p ex:b ;
                 ex:q [ ex:r "1"@en ; ex:s 2 ] ;
                 ex:t 3.5, 1e3, true .
            [ ex:p ex:c ] .
            _:n ex:p ex:d ."#,
        )
        .unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.blank_nodes().len(), 3);
        let nums: Vec<_> = g
            .iter()
            .filter_map(|t| t.object().as_literal())
            .filter_map(|l| l.datatype().map(|d| d.trim_start_matches(XSD).to_string()))
            .collect();
        for kind in ["integer", "decimal", "double", "boolean"] {
            assert!(nums.iter().any(|n| n == kind), "{kind}");
        }
    }

    #[test]
    fn base_resolution() {
        let g = parse_turtle(b"@base <http://ex/dir/> . <a> <p> <../b> .").unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject().value(), "http://ex/dir/a");
        assert_eq!(t.object().value(), "http://ex/b");
        assert!(parse_turtle(b"<a> <http://ex/p> <b> .").is_err());
    }

    #[test]
    fn long_strings_and_single_quotes() {
        let g = parse_turtle(
            b"@prefix ex: <http://ex/> . ex:a ex:p \"\"\"multi\nline \"quoted\" \"\"\" ; ex:q 'single' .",
        )
        .unwrap();
        let lits: Vec<_> = g
            .iter()
            .map(|t| t.object().value().to_string())
            .collect();
        assert!(lits.contains(&"multi\nline \"quoted\" ".to_string()));
        assert!(lits.contains(&"single".to_string()));
    }

    #[test]
    fn errors() {
        let e = parse_turtle(b"@prefix ex: <http://ex/> .\nex:a ex:p ( 1 2 ) .").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.reason.contains("collections"));
        assert!(parse_turtle(b"ex:a ex:p ex:b .").unwrap_err().reason.contains("undeclared"));
        assert!(parse_turtle(b"<http://ex/a> <http://ex/p> \"x\"").is_err());
        assert!(parse_turtle(b"<http://ex/a> \"p\" \"x\" .").is_err());
    }

    #[test]
    fn local_names_with_dots_and_trailing_terminator() {
        let g = parse_turtle(b"@prefix ex: <http://ex/> . ex:a.b ex:p ex:c.").unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject().value(), "http://ex/a.b");
        assert_eq!(t.object().value(), "http://ex/c");
    }
}
