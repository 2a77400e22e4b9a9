//! Brute-force reference evaluator for the SPARQL subset and generators for
//! small random stores and queries.
//!
//! The oracle follows the algebra literally: every basic graph pattern is the
//! filtered product of all triples per pattern, groups are evaluated bottom-up
//! and joined with nested loops. Nothing is shared with the engine except the
//! parsed query.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use lrhub_core::rdf::{parse_ntriples, Graph, Term, Triple};
use lrhub_core::sparql::{
    CmpOp, Element, Expr, Func, GroupPattern, Query, Solutions, SparqlError, VarOrTerm,
};
use proptest::prelude::*;

const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

type Binding = BTreeMap<String, Term>;

#[derive(Debug)]
enum Fail {
    Type,
    Regex(SparqlError),
}

#[derive(Debug, Clone)]
enum Val {
    Bool(bool),
    Term(Term),
}

/// Evaluates `query` over `triples` by exhaustive enumeration.
pub fn oracle_eval(query: &Query, triples: &[Triple]) -> Result<Solutions, SparqlError> {
    let o = Oracle { triples };
    let mut rows = o.group(&query.pattern, true)?;
    if !query.order_by.is_empty() {
        let mut keyed = Vec::new();
        for r in rows {
            let mut keys = Vec::new();
            for k in &query.order_by {
                keys.push(match o.eval(&k.expr, &r) {
                    Ok(v) => Some(as_term(v)),
                    Err(Fail::Type) => None,
                    Err(Fail::Regex(e)) => return Err(e),
                });
            }
            keyed.push((keys, r));
        }
        // Insertion sort keeps equal keys in their original order.
        let mut sorted: Vec<(Vec<Option<Term>>, Binding)> = Vec::new();
        for item in keyed {
            let at = sorted
                .iter()
                .position(|(k, _)| key_cmp(&item.0, k, query) == Ordering::Less)
                .unwrap_or(sorted.len());
            sorted.insert(at, item);
        }
        rows = sorted.into_iter().map(|(_, r)| r).collect();
    }
    let vars = query.result_vars();
    let mut out: Vec<Vec<Option<Term>>> = Vec::new();
    for r in rows {
        let row: Vec<Option<Term>> = vars.iter().map(|v| r.get(v).cloned()).collect();
        if query.distinct && out.contains(&row) {
            continue;
        }
        out.push(row);
    }
    let rows = out
        .into_iter()
        .skip(query.offset)
        .take(query.limit.unwrap_or(usize::MAX))
        .collect();
    Ok(Solutions { vars, rows })
}

fn key_cmp(a: &[Option<Term>], b: &[Option<Term>], q: &Query) -> Ordering {
    for (i, k) in q.order_by.iter().enumerate() {
        let mut o = term_order(a[i].as_ref(), b[i].as_ref());
        if k.descending {
            o = o.reverse();
        }
        if o.is_ne() {
            return o;
        }
    }
    Ordering::Equal
}

/// Unbound < blank < IRI < literal; literals numerically when both are
/// numbers, then by lexical form, language and datatype.
pub fn term_order(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    let kind = |t: Option<&Term>| match t {
        None => 0,
        Some(t) if t.is_blank() => 1,
        Some(t) if t.as_iri().is_some() => 2,
        Some(_) => 3,
    };
    let (ka, kb) = (kind(a), kind(b));
    if ka != kb {
        return ka.cmp(&kb);
    }
    let (Some(a), Some(b)) = (a, b) else {
        return Ordering::Equal;
    };
    match (a.as_literal(), b.as_literal()) {
        (Some(x), Some(y)) => {
            if let (Some(p), Some(q)) = (number(a), number(b)) {
                if p < q {
                    return Ordering::Less;
                }
                if p > q {
                    return Ordering::Greater;
                }
            }
            (x.lexical(), x.lang(), x.datatype()).cmp(&(y.lexical(), y.lang(), y.datatype()))
        }
        _ => a.value().cmp(b.value()),
    }
}

fn is_numeric_datatype(dt: &str) -> bool {
    let Some(local) = dt.strip_prefix(XSD) else { return false };
    local.ends_with("nteger")
        || matches!(
            local,
            "decimal" | "double" | "float" | "int" | "long" | "short" | "byte" | "unsignedInt" | "unsignedLong"
                | "unsignedShort" | "unsignedByte"
        )
}

fn number(t: &Term) -> Option<f64> {
    let l = t.as_literal()?;
    if l.lang().is_some() || l.datatype().is_some_and(|d| !is_numeric_datatype(d)) {
        return None;
    }
    let s = l.lexical();
    let chars_ok = s.chars().all(|c| c.is_ascii_digit() || "+-.eE".contains(c));
    if !chars_ok || !s.chars().any(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn as_term(v: Val) -> Term {
    match v {
        Val::Term(t) => t,
        Val::Bool(b) => Term::typed_literal(b.to_string(), format!("{XSD}boolean")).unwrap(),
    }
}

fn to_bool(v: &Val) -> Result<bool, Fail> {
    let t = match v {
        Val::Bool(b) => return Ok(*b),
        Val::Term(t) => t,
    };
    let l = t.as_literal().ok_or(Fail::Type)?;
    match (l.lang(), l.datatype()) {
        (Some(_), _) => Err(Fail::Type),
        (None, None) => Ok(!l.lexical().is_empty()),
        (None, Some(dt)) if dt == format!("{XSD}boolean") => Ok(l.lexical() == "true" || l.lexical() == "1"),
        (None, Some(dt)) if is_numeric_datatype(dt) => Ok(number(t).is_some_and(|n| n != 0.0)),
        _ => Err(Fail::Type),
    }
}

/// Lexical form and language of a plain or language-tagged literal.
fn str_lit(v: &Val) -> Result<(String, Option<String>), Fail> {
    match v {
        Val::Term(t) => match t.as_literal() {
            Some(l) if l.datatype().is_none() => Ok((l.lexical().to_string(), l.lang().map(str::to_string))),
            _ => Err(Fail::Type),
        },
        Val::Bool(_) => Err(Fail::Type),
    }
}

fn plain(v: &Val) -> Result<String, Fail> {
    match str_lit(v)? {
        (s, None) => Ok(s),
        _ => Err(Fail::Type),
    }
}

fn compatible(a: &Binding, b: &Binding) -> bool {
    a.iter().all(|(k, v)| b.get(k).is_none_or(|w| w == v))
}

fn union(a: &Binding, b: &Binding) -> Binding {
    let mut m = a.clone();
    m.extend(b.iter().map(|(k, v)| (k.clone(), v.clone())));
    m
}

fn join(left: &[Binding], right: &[Binding]) -> Vec<Binding> {
    let mut out = Vec::new();
    for l in left {
        for r in right {
            if compatible(l, r) {
                out.push(union(l, r));
            }
        }
    }
    out
}

struct Oracle<'a> {
    triples: &'a [Triple],
}

impl Oracle<'_> {
    fn group(&self, g: &GroupPattern, with_filters: bool) -> Result<Vec<Binding>, SparqlError> {
        let mut acc = vec![Binding::new()];
        let mut bgp = Vec::new();
        for e in &g.elements {
            if let Element::Triple(t) = e {
                bgp.push(t);
                continue;
            }
            if !bgp.is_empty() {
                acc = join(&acc, &self.bgp(&bgp));
                bgp.clear();
            }
            match e {
                Element::Optional(b) => {
                    let right = self.group(b, false)?;
                    let cond: Vec<&Expr> = b.filters().collect();
                    let mut out = Vec::new();
                    for l in &acc {
                        let mut matched = false;
                        for r in &right {
                            if compatible(l, r) {
                                let m = union(l, r);
                                if self.all_true(&cond, &m)? {
                                    out.push(m);
                                    matched = true;
                                }
                            }
                        }
                        if !matched {
                            out.push(l.clone());
                        }
                    }
                    acc = out;
                }
                Element::Group(b) => acc = join(&acc, &self.group(b, true)?),
                Element::Union(bs) => {
                    let mut all = Vec::new();
                    for b in bs {
                        all.extend(self.group(b, true)?);
                    }
                    acc = join(&acc, &all);
                }
                Element::Triple(_) | Element::Filter(_) => {}
            }
        }
        if !bgp.is_empty() {
            acc = join(&acc, &self.bgp(&bgp));
        }
        if !with_filters {
            return Ok(acc);
        }
        let filters: Vec<&Expr> = g.filters().collect();
        let mut out = Vec::new();
        for b in acc {
            if self.all_true(&filters, &b)? {
                out.push(b);
            }
        }
        Ok(out)
    }

    fn all_true(&self, filters: &[&Expr], b: &Binding) -> Result<bool, SparqlError> {
        for f in filters {
            match self.eval(f, b).and_then(|v| to_bool(&v)) {
                Ok(true) => {}
                Ok(false) | Err(Fail::Type) => return Ok(false),
                Err(Fail::Regex(e)) => return Err(e),
            }
        }
        Ok(true)
    }

    fn bgp(&self, pats: &[&lrhub_core::sparql::TriplePattern]) -> Vec<Binding> {
        let mut acc = vec![Binding::new()];
        for p in pats {
            let mut next = Vec::new();
            for b in &acc {
                for t in self.triples {
                    let mut m = b.clone();
                    let ok = [(&p.subject, t.subject()), (&p.predicate, t.predicate()), (&p.object, t.object())]
                        .into_iter()
                        .all(|(pos, term)| match pos {
                            VarOrTerm::Term(c) => c == term,
                            VarOrTerm::Var(v) => match m.get(v) {
                                Some(x) => x == term,
                                None => {
                                    m.insert(v.clone(), term.clone());
                                    true
                                }
                            },
                        });
                    if ok {
                        next.push(m);
                    }
                }
            }
            acc = next;
        }
        acc
    }

    fn eval(&self, e: &Expr, b: &Binding) -> Result<Val, Fail> {
        match e {
            Expr::Var(v) => b.get(v).cloned().map(Val::Term).ok_or(Fail::Type),
            Expr::Const(t) => Ok(Val::Term(t.clone())),
            Expr::Not(x) => Ok(Val::Bool(!to_bool(&self.eval(x, b)?)?)),
            Expr::And(x, y) | Expr::Or(x, y) => {
                let is_and = matches!(e, Expr::And(..));
                let l = self.eval(x, b).and_then(|v| to_bool(&v));
                let r = self.eval(y, b).and_then(|v| to_bool(&v));
                match (l, r) {
                    (Err(Fail::Regex(e)), _) | (_, Err(Fail::Regex(e))) => Err(Fail::Regex(e)),
                    (Ok(p), Ok(q)) => Ok(Val::Bool(if is_and { p && q } else { p || q })),
                    (Ok(p), Err(_)) | (Err(_), Ok(p)) => {
                        // and: false dominates; or: true dominates
                        if p != is_and {
                            Ok(Val::Bool(p))
                        } else {
                            Err(Fail::Type)
                        }
                    }
                    _ => Err(Fail::Type),
                }
            }
            Expr::Cmp(op, x, y) => {
                let a = as_term(self.eval(x, b)?);
                let c = as_term(self.eval(y, b)?);
                let result = match op {
                    CmpOp::Eq | CmpOp::Ne => {
                        let eq = match (number(&a), number(&c)) {
                            (Some(p), Some(q)) => p == q,
                            _ => a == c,
                        };
                        eq == (*op == CmpOp::Eq)
                    }
                    _ => {
                        let ord = match (number(&a), number(&c)) {
                            (Some(p), Some(q)) => p.partial_cmp(&q).ok_or(Fail::Type)?,
                            (None, None) => {
                                let (la, lc) = (a.as_literal().ok_or(Fail::Type)?, c.as_literal().ok_or(Fail::Type)?);
                                if la.datatype().is_some() || lc.datatype().is_some() || la.lang() != lc.lang() {
                                    return Err(Fail::Type);
                                }
                                la.lexical().cmp(lc.lexical())
                            }
                            _ => return Err(Fail::Type),
                        };
                        match op {
                            CmpOp::Lt => ord.is_lt(),
                            CmpOp::Le => ord.is_le(),
                            CmpOp::Gt => ord.is_gt(),
                            _ => ord.is_ge(),
                        }
                    }
                };
                Ok(Val::Bool(result))
            }
            Expr::Call(f, args) => self.call(*f, args, b),
        }
    }

    fn call(&self, f: Func, args: &[Expr], b: &Binding) -> Result<Val, Fail> {
        if let (Func::Bound, Some(Expr::Var(v))) = (f, args.first()) {
            return Ok(Val::Bool(b.contains_key(v)));
        }
        let mut vals = Vec::new();
        for a in args {
            vals.push(self.eval(a, b)?);
        }
        let keep_lang = |s: String, lang: Option<String>| {
            Val::Term(match lang {
                Some(l) => Term::lang_literal(s, l).unwrap(),
                None => Term::literal(s),
            })
        };
        let term = |v: &Val| match v {
            Val::Term(t) => Some(t.clone()),
            Val::Bool(_) => None,
        };
        match f {
            Func::Regex => {
                let (text, _) = str_lit(&vals[0])?;
                let pattern = plain(&vals[1])?;
                let flags = match vals.get(2) {
                    Some(v) => plain(v)?,
                    None => String::new(),
                };
                let mut inline = String::new();
                for c in flags.chars() {
                    if !"ismx".contains(c) {
                        return Err(Fail::Regex(SparqlError::Regex {
                            pattern,
                            reason: format!("unknown flag '{c}'"),
                        }));
                    }
                    inline.push(c);
                }
                let source = if inline.is_empty() { pattern.clone() } else { format!("(?{inline}){pattern}") };
                let re = regex::Regex::new(&source).map_err(|e| {
                    Fail::Regex(SparqlError::Regex {
                        pattern,
                        reason: e.to_string(),
                    })
                })?;
                Ok(Val::Bool(re.is_match(&text)))
            }
            Func::Lang => {
                let t = term(&vals[0]).ok_or(Fail::Type)?;
                let l = t.as_literal().ok_or(Fail::Type)?;
                Ok(Val::Term(Term::literal(l.lang().unwrap_or_default())))
            }
            Func::LangMatches => {
                let tag = plain(&vals[0])?.to_lowercase();
                let range = plain(&vals[1])?.to_lowercase();
                Ok(Val::Bool(if range == "*" {
                    !tag.is_empty()
                } else {
                    tag == range || tag.starts_with(&format!("{range}-"))
                }))
            }
            Func::Contains | Func::StrStarts => {
                let (a, la) = str_lit(&vals[0])?;
                let (c, lc) = str_lit(&vals[1])?;
                if lc.is_some() && lc != la {
                    return Err(Fail::Type);
                }
                Ok(Val::Bool(if f == Func::Contains { a.contains(&c) } else { a.starts_with(&c) }))
            }
            Func::Lcase => {
                let (s, l) = str_lit(&vals[0])?;
                Ok(keep_lang(s.to_lowercase(), l))
            }
            Func::Ucase => {
                let (s, l) = str_lit(&vals[0])?;
                Ok(keep_lang(s.to_uppercase(), l))
            }
            Func::Str => {
                let t = term(&vals[0]).ok_or(Fail::Type)?;
                if t.is_blank() {
                    return Err(Fail::Type);
                }
                Ok(Val::Term(Term::literal(t.value())))
            }
            Func::IsIri | Func::IsLiteral | Func::IsBlank => {
                let t = as_term(vals[0].clone());
                Ok(Val::Bool(match f {
                    Func::IsIri => t.as_iri().is_some(),
                    Func::IsLiteral => t.is_literal(),
                    _ => t.is_blank(),
                }))
            }
            Func::Bound => Err(Fail::Type),
        }
    }
}

/// Subjects used by generated stores and queries.
pub const SUBJECTS: &[&str] = &["<http://ex/a>", "<http://ex/b>", "<http://ex/c>", "<http://ex/d>", "_:k1"];
pub const PREDICATES: &[&str] = &["<http://ex/p>", "<http://ex/q>", "<http://ex/r>"];
pub const LITERALS: &[&str] = &[
    "\"1\"",
    "\"2\"",
    "\"10\"",
    "\"x\"",
    "\"\"",
    "\"Ab\"@en",
    "\"ab\"@en-gb",
    "\"hola\"@es",
    "\"3\"^^<http://www.w3.org/2001/XMLSchema#integer>",
    "\"2.5\"^^<http://www.w3.org/2001/XMLSchema#decimal>",
    "\"true\"^^<http://www.w3.org/2001/XMLSchema#boolean>",
];

/// N-Triples text of a third of `max` to `max` distinct triples over the small alphabets.
pub fn arb_store(max: usize) -> impl Strategy<Value = String> {
    let objects: Vec<&'static str> = SUBJECTS.iter().chain(LITERALS).copied().collect();
    proptest::collection::btree_set(
        (
            proptest::sample::select(SUBJECTS),
            proptest::sample::select(PREDICATES),
            proptest::sample::select(objects),
        ),
        max / 3..=max,
    )
    .prop_map(|set| set.into_iter().map(|(s, p, o)| format!("{s} {p} {o} .\n")).collect())
}

pub fn store_triples(nt: &str) -> Vec<Triple> {
    parse_ntriples(nt.as_bytes()).expect("generated N-Triples parse").into_triples()
}

pub fn store_graph(nt: &str) -> Graph {
    parse_ntriples(nt.as_bytes()).expect("generated N-Triples parse")
}

fn position(vars: &'static [&'static str], pool: &'static [&'static str]) -> BoxedStrategy<String> {
    prop_oneof![
        12 => proptest::sample::select(vars).prop_map(str::to_string),
        5 => proptest::sample::select(pool).prop_map(|t| t.replace("_:k1", "<http://ex/a>")),
        1 => Just("<http://ex/absent>".to_string()),
    ]
    .boxed()
}

fn object_pool() -> &'static [&'static str] {
    static POOL: std::sync::OnceLock<Vec<&'static str>> = std::sync::OnceLock::new();
    POOL.get_or_init(|| SUBJECTS.iter().chain(LITERALS).copied().collect())
}

pub fn arb_pattern() -> BoxedStrategy<String> {
    // Per-position variable pools make joins between patterns likely while
    // still letting ?y link a subject to an object.
    (
        position(&["?x", "?y"], SUBJECTS),
        position(&["?p"], PREDICATES),
        position(&["?y", "?z"], object_pool()),
    )
        .prop_map(|(s, p, o)| format!("{s} {p} {o}"))
        .boxed()
}

/// Filter expressions over the pattern variables and the never-bound ?w.
pub fn arb_expr() -> BoxedStrategy<String> {
    // Weighted toward ?z, the object position where literals live.
    let var = proptest::sample::select(&["?z", "?z", "?z", "?z", "?y", "?y", "?x", "?p", "?w"][..]);
    let constant = proptest::sample::select(
        &["1", "2.5", "\"x\"", "\"10\"", "\"Ab\"@en", "<http://ex/a>", "true", "\"2\"", "3"][..],
    );
    let op = proptest::sample::select(&["=", "!=", "<", "<=", ">", ">="][..]);
    let leaf = prop_oneof![
        6 => (var.clone(), op.clone(), constant).prop_map(|(v, o, c)| format!("{v} {o} {c}")),
        3 => (var.clone(), op, var.clone()).prop_map(|(v, o, w)| format!("{v} {o} {w}")),
        1 => (var.clone(), proptest::sample::select(&["\"a\", \"i\"", "\"^1\"", "\"x|b\"", "\"^$\""][..]))
            .prop_map(|(v, p)| format!("regex({v}, {p})")),
        1 => var.clone().prop_map(|v| format!("regex(str({v}), \"^http://ex/[ab]\")")),
        1 => (proptest::sample::select(&["bound", "isIRI", "isLiteral", "isBlank"][..]), var.clone())
            .prop_map(|(f, v)| format!("{f}({v})")),
        1 => (var.clone(), proptest::sample::select(&["\"en\"", "\"*\"", "\"es\""][..]))
            .prop_map(|(v, r)| format!("langMatches(lang({v}), {r})")),
        1 => var.clone().prop_map(|v| format!("contains(lcase(str({v})), \"a\")")),
        1 => var.clone().prop_map(|v| format!("strstarts({v}, \"1\")")),
        1 => var.clone().prop_map(|v| format!("ucase({v}) = \"AB\"@en")),
        1 => var.prop_map(|v| v.to_string()),
    ];
    leaf.prop_recursive(1, 4, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| format!("!({e})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} && {b})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("({a} || {b})")),
        ]
    })
    .boxed()
}

/// Random queries: 1 to 3 patterns plus at most one FILTER, OPTIONAL or
/// UNION, with optional DISTINCT and modifiers. LIMIT and OFFSET only come
/// with an ORDER BY over every projected variable, so the expected slice is
/// unique.
pub fn arb_query() -> impl Strategy<Value = String> {
    let extra = prop_oneof![
        1 => Just(String::new()),
        2 => arb_expr().prop_map(|e| format!("FILTER({e})")),
        1 => (arb_pattern(), proptest::option::of(arb_expr())).prop_map(|(p, f)| match f {
            Some(f) => format!("OPTIONAL {{ {p} FILTER({f}) }}"),
            None => format!("OPTIONAL {{ {p} }}"),
        }),
        1 => (arb_pattern(), arb_pattern(), proptest::option::of(arb_expr())).prop_map(|(a, b, f)| {
            let f = f.map(|f| format!(" FILTER({f})")).unwrap_or_default();
            format!("{{ {a}{f} }} UNION {{ {b} }}")
        }),
    ];
    let projection = proptest::sample::subsequence(&["?x", "?y", "?z", "?p", "?w"][..], 0..=3);
    (
        proptest::collection::vec(arb_pattern(), 1..=3),
        extra,
        projection,
        proptest::bool::ANY,
        proptest::option::of((proptest::collection::vec(proptest::bool::ANY, 5), 0usize..3, proptest::option::of(0usize..5))),
    )
        .prop_map(|(pats, extra, proj, distinct, order)| {
            let projected: Vec<&str> = if proj.is_empty() { vec!["?x", "?y", "?z", "?p", "?w"] } else { proj.clone() };
            let head = if proj.is_empty() { "*".to_string() } else { proj.join(" ") };
            let mut q = format!(
                "SELECT {}{head} WHERE {{ {} . {extra} }}",
                if distinct { "DISTINCT " } else { "" },
                pats.join(" . ")
            );
            if let Some((desc, offset, limit)) = order {
                let keys: Vec<String> = projected
                    .iter()
                    .zip(desc)
                    .map(|(v, d)| if d { format!("DESC({v})") } else { v.to_string() })
                    .collect();
                q.push_str(&format!(" ORDER BY {}", keys.join(" ")));
                if offset > 0 {
                    q.push_str(&format!(" OFFSET {offset}"));
                }
                if let Some(l) = limit {
                    q.push_str(&format!(" LIMIT {l}"));
                }
            }
            q
        })
}

/// Rows sorted into a canonical order, for multiset comparison.
pub fn canonical_rows(s: &Solutions) -> Vec<Vec<Option<Term>>> {
    let mut rows = s.rows.clone();
    rows.sort();
    rows
}
