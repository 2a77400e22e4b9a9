use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SparqlError;
use crate::catalog::vocab;
use crate::rdf::{PrefixMap, Term};

const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// Keywords outside the subset that are reported by name.
const UNSUPPORTED: &[&str] = &[
    "BASE", "CONSTRUCT", "ASK", "DESCRIBE", "REDUCED", "FROM", "NAMED", "GROUP", "HAVING", "MINUS",
    "BIND", "VALUES", "GRAPH", "SERVICE", "INSERT", "DELETE", "LOAD", "CLEAR", "CREATE", "DROP", "COPY",
    "MOVE", "ADD", "WITH", "AS", "EXISTS", "NOT", "IN", "COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE",
    "GROUP_CONCAT", "IF", "COALESCE", "CONCAT", "STRLEN", "SUBSTR", "REPLACE", "DATATYPE", "IRI", "URI",
    "BNODE", "STRENDS", "STRBEFORE", "STRAFTER", "ABS", "ROUND", "CEIL", "FLOOR", "NOW", "SAMETERM",
];

struct Parser {
    toks: Vec<Token>,
    i: usize,
    prefixes: PrefixMap,
}

/// Parses a query in the supported subset. The catalog vocabulary prefixes
/// (rdf, rdfs, xsd, dct, dcat, ms) are predeclared; PREFIX overrides them.
pub fn parse_query(text: &str) -> Result<Query, SparqlError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        i: 0,
        prefixes: vocab::prefixes(),
    };
    p.query()
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn peek_tok(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error_at(t: &Token, message: impl Into<String>) -> SparqlError {
        SparqlError::Syntax {
            position: t.pos,
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> SparqlError {
        let t = self.peek();
        if let Some(f) = self.unsupported_here() {
            return f;
        }
        Self::error_at(t, format!("expected {wanted}, found {}", t.describe()))
    }

    /// Tokens that start a construct outside the subset.
    fn unsupported_here(&self) -> Option<SparqlError> {
        match self.peek_tok() {
            Tok::Word(w) if UNSUPPORTED.contains(&w.to_ascii_uppercase().as_str()) => {
                Some(SparqlError::UnsupportedFeature(w.to_ascii_uppercase()))
            }
            Tok::Punct(p @ ("+" | "-" | "/" | "|" | "^" | "[" | "]" | "?")) => {
                Some(SparqlError::UnsupportedFeature(p.to_string()))
            }
            _ => None,
        }
    }

    fn negative_number(&self) -> bool {
        self.is_punct("-")
            && matches!(
                self.toks.get(self.i + 1).map(|t| &t.tok),
                Some(Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_))
            )
    }

    fn is_word(&self, kw: &str) -> bool {
        matches!(self.peek_tok(), Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_word(&mut self, kw: &str) -> bool {
        let hit = self.is_word(kw);
        if hit {
            self.advance();
        }
        hit
    }

    fn expect_word(&mut self, kw: &str) -> Result<(), SparqlError> {
        if self.eat_word(kw) {
            Ok(())
        } else {
            Err(self.unexpected(kw))
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek_tok(), Tok::Punct(x) if *x == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.advance();
        }
        hit
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), SparqlError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{p}'")))
        }
    }

    fn query(&mut self) -> Result<Query, SparqlError> {
        while self.is_word("PREFIX") {
            self.advance();
            let t = self.advance();
            let Tok::PName(prefix, local) = &t.tok else {
                return Err(Self::error_at(&t, "expected a prefix declaration such as `ex:`"));
            };
            if !local.is_empty() {
                return Err(Self::error_at(&t, "prefix name must end with ':'"));
            }
            let t = self.advance();
            let Tok::Iri(ns) = t.tok else {
                return Err(Self::error_at(&t, "expected a namespace IRI"));
            };
            self.prefixes.insert(prefix.clone(), ns);
        }
        if !self.is_word("SELECT") {
            return Err(self.unexpected("SELECT"));
        }
        self.advance();
        let distinct = self.eat_word("DISTINCT");
        let projection = if self.eat_punct("*") {
            Projection::All
        } else {
            let mut vars = Vec::new();
            while let Tok::Var(v) = self.peek_tok() {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
                self.advance();
            }
            if vars.is_empty() {
                if self.is_punct("(") {
                    return Err(SparqlError::UnsupportedFeature("SELECT expression".into()));
                }
                return Err(self.unexpected("a variable or '*'"));
            }
            Projection::Vars(vars)
        };
        self.eat_word("WHERE");
        let pattern = self.group()?;
        let mut order_by = Vec::new();
        let mut limit = None;
        let mut offset = 0;
        if self.eat_word("ORDER") {
            self.expect_word("BY")?;
            loop {
                if self.is_word("ASC") || self.is_word("DESC") {
                    let descending = self.is_word("DESC");
                    self.advance();
                    self.expect_punct("(")?;
                    let expr = self.expr()?;
                    self.expect_punct(")")?;
                    order_by.push(OrderKey { expr, descending });
                } else if let Tok::Var(v) = self.peek_tok() {
                    order_by.push(OrderKey {
                        expr: Expr::Var(v.clone()),
                        descending: false,
                    });
                    self.advance();
                } else if self.is_punct("(") {
                    self.advance();
                    let expr = self.expr()?;
                    self.expect_punct(")")?;
                    order_by.push(OrderKey { expr, descending: false });
                } else if matches!(self.peek_tok(), Tok::Word(w) if Func::from_name(w).is_some()) {
                    let expr = self.primary()?;
                    order_by.push(OrderKey { expr, descending: false });
                } else {
                    break;
                }
            }
            if order_by.is_empty() {
                return Err(self.unexpected("an ordering condition"));
            }
        }
        loop {
            if self.eat_word("LIMIT") {
                limit = Some(self.count()?);
            } else if self.eat_word("OFFSET") {
                offset = self.count()?;
            } else {
                break;
            }
        }
        if *self.peek_tok() != Tok::Eof {
            return Err(self.unexpected("end of query"));
        }
        Ok(Query {
            projection,
            distinct,
            pattern,
            order_by,
            limit,
            offset,
        })
    }

    fn count(&mut self) -> Result<usize, SparqlError> {
        let t = self.advance();
        match &t.tok {
            Tok::Integer(n) => n.parse().map_err(|_| Self::error_at(&t, "count too large")),
            _ => Err(Self::error_at(&t, format!("expected an integer, found {}", t.describe()))),
        }
    }

    fn group(&mut self) -> Result<GroupPattern, SparqlError> {
        self.expect_punct("{")?;
        let mut elements = Vec::new();
        loop {
            if self.eat_punct("}") {
                return Ok(GroupPattern { elements });
            }
            if self.is_word("FILTER") {
                self.advance();
                let e = if self.is_punct("(") {
                    self.advance();
                    let e = self.expr()?;
                    self.expect_punct(")")?;
                    e
                } else {
                    self.primary()?
                };
                elements.push(Element::Filter(e));
                self.eat_punct(".");
            } else if self.is_word("OPTIONAL") {
                self.advance();
                elements.push(Element::Optional(self.group()?));
                self.eat_punct(".");
            } else if self.is_punct("{") {
                let first = self.group()?;
                let mut alts = vec![first];
                while self.eat_word("UNION") {
                    alts.push(self.group()?);
                }
                if alts.len() == 1 {
                    elements.push(Element::Group(alts.pop().expect("one group")));
                } else {
                    elements.push(Element::Union(alts));
                }
                self.eat_punct(".");
            } else if let Some(f) = self.unsupported_here() {
                return Err(f);
            } else {
                self.triples_block(&mut elements)?;
            }
        }
    }

    /// subject predicate object (`;` predicate object)* (`,` object)* `.`?
    fn triples_block(&mut self, out: &mut Vec<Element>) -> Result<(), SparqlError> {
        let subject = self.var_or_term(false)?;
        if let VarOrTerm::Term(Term::Literal(_)) = subject {
            return Err(Self::error_at(&self.toks[self.i - 1], "a literal cannot be a subject"));
        }
        loop {
            let predicate = if self.is_word("a") {
                self.advance();
                VarOrTerm::Term(Term::Iri(RDF_TYPE.into()))
            } else {
                let start = self.i;
                let p = self.var_or_term(true)?;
                if matches!(p, VarOrTerm::Term(Term::Literal(_) | Term::Blank(_))) {
                    return Err(Self::error_at(&self.toks[start], "a predicate must be an IRI or variable"));
                }
                p
            };
            if let Some(f) = self.unsupported_here().filter(|_| !self.negative_number()) {
                return Err(f);
            }
            loop {
                let object = self.var_or_term(false)?;
                out.push(Element::Triple(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                }));
                if !self.eat_punct(",") {
                    break;
                }
            }
            if !self.eat_punct(";") {
                break;
            }
            // a trailing ';' before '.' or '}' is allowed
            if self.is_punct(".") || self.is_punct("}") {
                break;
            }
        }
        let next_element = self.is_punct("}") || self.is_punct("{") || self.is_word("FILTER") || self.is_word("OPTIONAL");
        if !self.eat_punct(".") && !next_element {
            if let Some(f) = self.unsupported_here() {
                return Err(f);
            }
            return Err(self.unexpected("'.' or '}'"));
        }
        Ok(())
    }

    fn iri_of(&self, t: &Token) -> Result<Option<String>, SparqlError> {
        Ok(match &t.tok {
            Tok::Iri(i) => Some(i.clone()),
            Tok::PName(p, l) => {
                let ns = self
                    .prefixes
                    .namespace(p)
                    .ok_or_else(|| Self::error_at(t, format!("undeclared prefix '{p}:'")))?;
                Some(format!("{ns}{l}"))
            }
            _ => None,
        })
    }

    fn var_or_term(&mut self, predicate: bool) -> Result<VarOrTerm, SparqlError> {
        if let Some(f) = self.unsupported_here().filter(|_| !self.negative_number()) {
            return Err(f);
        }
        let t = self.peek().clone();
        if let Tok::Var(v) = &t.tok {
            self.advance();
            return Ok(VarOrTerm::Var(v.clone()));
        }
        if let Tok::Blank(b) = &t.tok {
            if predicate {
                return Err(Self::error_at(&t, "a predicate must be an IRI or variable"));
            }
            self.advance();
            return Ok(VarOrTerm::Var(format!("_:{b}")));
        }
        Ok(VarOrTerm::Term(self.term_const()?))
    }

    /// An IRI or literal constant.
    fn term_const(&mut self) -> Result<Term, SparqlError> {
        let t = self.peek().clone();
        if let Some(iri) = self.iri_of(&t)? {
            self.advance();
            return Term::iri(iri).map_err(|e| Self::error_at(&t, e.to_string()));
        }
        let negative = self.negative_number();
        if negative {
            self.advance();
        }
        let sign = if negative { "-" } else { "" };
        let t = self.peek().clone();
        let typed = |lex: String, dt: &str| Term::typed_literal(lex, format!("{XSD}{dt}")).expect("xsd IRIs are valid");
        let term = match &t.tok {
            Tok::Integer(n) => typed(format!("{sign}{n}"), "integer"),
            Tok::Decimal(n) => typed(format!("{sign}{n}"), "decimal"),
            Tok::Double(n) => typed(format!("{sign}{n}"), "double"),
            Tok::Word(w) if w == "true" || w == "false" => typed(w.clone(), "boolean"),
            Tok::Str(s) => {
                self.advance();
                return match self.peek_tok().clone() {
                    Tok::LangTag(l) => {
                        let at = self.advance();
                        Term::lang_literal(s.clone(), l).map_err(|e| Self::error_at(&at, e.to_string()))
                    }
                    Tok::Punct("^^") => {
                        self.advance();
                        let dt_tok = self.advance();
                        let dt = self
                            .iri_of(&dt_tok)?
                            .ok_or_else(|| Self::error_at(&dt_tok, "expected a datatype IRI"))?;
                        Term::typed_literal(s.clone(), dt).map_err(|e| Self::error_at(&dt_tok, e.to_string()))
                    }
                    _ => Ok(Term::literal(s.clone())),
                };
            }
            _ => return Err(self.unexpected("a variable, IRI or literal")),
        };
        self.advance();
        Ok(term)
    }

    fn expr(&mut self) -> Result<Expr, SparqlError> {
        let mut left = self.and_expr()?;
        while self.eat_punct("||") {
            let right = self.and_expr()?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Expr, SparqlError> {
        let mut left = self.relational()?;
        while self.eat_punct("&&") {
            let right = self.relational()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn relational(&mut self) -> Result<Expr, SparqlError> {
        let left = self.unary()?;
        let op = match self.peek_tok() {
            Tok::Punct("=") => CmpOp::Eq,
            Tok::Punct("!=") => CmpOp::Ne,
            Tok::Punct("<") => CmpOp::Lt,
            Tok::Punct("<=") => CmpOp::Le,
            Tok::Punct(">") => CmpOp::Gt,
            Tok::Punct(">=") => CmpOp::Ge,
            Tok::Punct(p @ ("+" | "-" | "*" | "/")) => {
                return Err(SparqlError::UnsupportedFeature(format!("arithmetic '{p}'")))
            }
            _ => return Ok(left),
        };
        self.advance();
        let right = self.unary()?;
        Ok(Expr::Cmp(op, Box::new(left), Box::new(right)))
    }

    fn unary(&mut self) -> Result<Expr, SparqlError> {
        if self.eat_punct("!") {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, SparqlError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Punct("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Var(v) => {
                self.advance();
                Ok(Expr::Var(v.clone()))
            }
            Tok::Word(w) if w != "true" && w != "false" => {
                let Some(f) = Func::from_name(w) else {
                    if UNSUPPORTED.contains(&w.to_ascii_uppercase().as_str()) {
                        return Err(SparqlError::UnsupportedFeature(w.to_ascii_uppercase()));
                    }
                    if matches!(self.toks.get(self.i + 1).map(|t| &t.tok), Some(Tok::Punct("("))) {
                        return Err(SparqlError::UnsupportedFeature(w.to_ascii_uppercase()));
                    }
                    return Err(Self::error_at(&t, format!("unexpected {w}")));
                };
                self.advance();
                self.expect_punct("(")?;
                let mut args = Vec::new();
                if !self.is_punct(")") {
                    loop {
                        args.push(self.expr()?);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.expect_punct(")")?;
                let (lo, hi) = f.arity();
                if args.len() < lo || args.len() > hi {
                    return Err(Self::error_at(&t, format!("{} takes {lo} to {hi} arguments", w.to_ascii_uppercase())));
                }
                if f == Func::Bound && !matches!(args[0], Expr::Var(_)) {
                    return Err(Self::error_at(&t, "BOUND takes a variable"));
                }
                Ok(Expr::Call(f, args))
            }
            _ => Ok(Expr::Const(self.term_const()?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_elements(g: &GroupPattern, pred: &dyn Fn(&Element) -> bool) -> usize {
        g.elements
            .iter()
            .map(|e| {
                let nested = match e {
                    Element::Optional(g) | Element::Group(g) => count_elements(g, pred),
                    Element::Union(gs) => gs.iter().map(|g| count_elements(g, pred)).sum(),
                    _ => 0,
                };
                nested + usize::from(pred(e))
            })
            .sum()
    }

    #[test]
    fn one_pattern() {
        let q = parse_query("SELECT ?s WHERE { ?s <http://purl.org/dc/terms/language> \"es\" }").unwrap();
        assert_eq!(q.pattern.elements.len(), 1);
        assert_eq!(q.result_vars(), vec!["s"]);
    }

    #[test]
    fn unsupported_forms() {
        for (q, name) in [
            ("CONSTRUCT { ?s ?p ?o } WHERE { ?s ?p ?o }", "CONSTRUCT"),
            ("ASK { ?s ?p ?o }", "ASK"),
            ("SELECT ?s WHERE { ?s ?p ?o } GROUP BY ?s", "GROUP"),
            ("SELECT ?s WHERE { ?s dct:title/dct:x ?o }", "/"),
            ("SELECT ?s WHERE { ?s ?p ?o BIND(1 AS ?x) }", "BIND"),
            ("SELECT ?s WHERE { ?s ?p ?o FILTER(strlen(?o) > 1) }", "STRLEN"),
            ("SELECT (COUNT(*) AS ?n) WHERE { ?s ?p ?o }", "SELECT expression"),
        ] {
            assert_eq!(parse_query(q), Err(SparqlError::UnsupportedFeature(name.into())), "{q}");
        }
    }

    #[test]
    fn workload_shape() {
        let q = parse_query(
            r#"PREFIX dct: <http://purl.org/dc/terms/>
SELECT DISTINCT ?s WHERE {
  ?s dct:type "Corpus" .
  { ?s dct:language "es" } UNION { ?s dct:description ?d . FILTER regex(?d, "spanish", "i") }
} LIMIT 100"#,
        )
        .unwrap();
        assert!(q.distinct);
        assert_eq!(q.limit, Some(100));
        assert_eq!(count_elements(&q.pattern, &|e| matches!(e, Element::Union(_))), 1);
        assert_eq!(
            count_elements(&q.pattern, &|e| matches!(e, Element::Filter(Expr::Call(Func::Regex, _)))),
            1
        );
    }

    #[test]
    fn abbreviations_and_literals() {
        let q = parse_query(
            "SELECT * { ?s a dcat:Dataset ; dct:title ?t , 'x'@EN ; ms:confidence -1.5 . _:b dct:x 3 } ORDER BY DESC(?t) ?s OFFSET 2 LIMIT 1",
        )
        .unwrap();
        assert_eq!(q.result_vars(), vec!["s", "t"]);
        assert_eq!(q.pattern.elements.len(), 5);
        assert_eq!(q.order_by.len(), 2);
        assert!(q.order_by[0].descending);
        assert_eq!((q.offset, q.limit), (2, Some(1)));
        let Element::Triple(t) = &q.pattern.elements[3] else { panic!() };
        assert_eq!(t.object, VarOrTerm::Term(Term::typed_literal("-1.5", format!("{XSD}decimal")).unwrap()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_query("SELEC ?s WHERE { ?s ?p ?o }") {
            Err(SparqlError::Syntax { position: 0, line: 1, column: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_query("SELECT ?s WHERE { ?s ?p }") {
            Err(SparqlError::Syntax { position, .. }) => assert_eq!(position, 24),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_query("SELECT ?s { ?s nope:x ?o }"), Err(SparqlError::Syntax { .. })));
        assert!(matches!(parse_query("SELECT ?s { ?s ?p ?o } LIMIT x"), Err(SparqlError::Syntax { .. })));
    }

    #[test]
    fn optional_and_filters() {
        let q = parse_query(
            "SELECT ?s ?l WHERE { ?s ?p ?o OPTIONAL { ?s dct:language ?l FILTER(langMatches(lang(?l), 'en')) } FILTER(!bound(?l) || ?o != 3 && contains(lcase(str(?o)), 'x')) }",
        )
        .unwrap();
        assert!(matches!(q.pattern.elements[1], Element::Optional(_)));
        assert!(matches!(q.pattern.elements[2], Element::Filter(Expr::Or(..))));
    }
}
