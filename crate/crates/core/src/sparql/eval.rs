use std::borrow::Cow;
use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::time::Instant;

use regex::{Regex, RegexBuilder};

use super::ast::*;
use super::{Solutions, SparqlError};
use crate::rdf::{Literal, Term};
use crate::store::{Store, TermId};

const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
const NUMERIC_TYPES: &[&str] = &[
    "integer", "decimal", "double", "float", "int", "long", "short", "byte", "nonNegativeInteger",
    "positiveInteger", "negativeInteger", "nonPositiveInteger", "unsignedInt", "unsignedLong",
    "unsignedShort", "unsignedByte",
];
const TICKS_PER_CLOCK_CHECK: u64 = 4096;

type Row = Vec<Option<TermId>>;

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    /// None when the constant does not occur in the store.
    Const(Option<TermId>),
}

enum ExprError {
    /// Evaluates to "no match" inside a filter.
    Type,
    Fatal(SparqlError),
}

type ExprResult<T> = Result<T, ExprError>;

pub fn evaluate(query: &Query, store: &Store) -> Result<Solutions, SparqlError> {
    evaluate_with(query, store, None)
}

/// Like [`evaluate`], failing with [`SparqlError::Timeout`] once `deadline` passes.
pub fn evaluate_with(query: &Query, store: &Store, deadline: Option<Instant>) -> Result<Solutions, SparqlError> {
    let mut vars = query.pattern.variables();
    for v in query.result_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let ev = Evaluator {
        store,
        slots: vars.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect(),
        width: vars.len(),
        deadline,
        ticks: Cell::new(0),
        regexes: RefCell::new(HashMap::new()),
    };
    ev.precompile(&query.pattern)?;
    for k in &query.order_by {
        ev.precompile_expr(&k.expr)?;
    }

    let mut rows = ev.independent(&query.pattern)?;

    if !query.order_by.is_empty() {
        let mut keyed = Vec::with_capacity(rows.len());
        for row in rows {
            ev.tick()?;
            let mut keys = Vec::with_capacity(query.order_by.len());
            for k in &query.order_by {
                keys.push(match ev.value(&k.expr, &row, None) {
                    Ok(t) => Some(t.into_owned()),
                    Err(ExprError::Type) => None,
                    Err(ExprError::Fatal(e)) => return Err(e),
                });
            }
            keyed.push((keys, row));
        }
        keyed.sort_by(|(a, _), (b, _)| {
            for ((x, y), k) in a.iter().zip(b).zip(&query.order_by) {
                let o = order_terms(x.as_ref(), y.as_ref());
                let o = if k.descending { o.reverse() } else { o };
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        });
        rows = keyed.into_iter().map(|(_, r)| r).collect();
    }

    let out_vars = query.result_vars();
    let cols: Vec<usize> = out_vars.iter().map(|v| ev.slots[v]).collect();
    let mut projected: Vec<Row> = rows
        .into_iter()
        .map(|r| cols.iter().map(|&c| r[c]).collect())
        .collect();
    if query.distinct {
        let mut seen = HashSet::new();
        projected.retain(|r| seen.insert(r.clone()));
    }
    let rows = projected
        .into_iter()
        .skip(query.offset)
        .take(query.limit.unwrap_or(usize::MAX))
        .map(|r| r.into_iter().map(|c| c.map(|id| store.term(id).clone())).collect())
        .collect();
    Ok(Solutions { vars: out_vars, rows })
}

/// Total order used by ORDER BY: unbound, blank nodes, IRIs, literals.
/// Literals that both read as numbers compare numerically first; remaining
/// ties fall back to lexical form, language tag and datatype so only equal
/// terms tie.
pub fn order_terms(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    fn rank(t: Option<&Term>) -> u8 {
        match t {
            None => 0,
            Some(Term::Blank(_)) => 1,
            Some(Term::Iri(_)) => 2,
            Some(Term::Literal(_)) => 3,
        }
    }
    match (a, b) {
        (Some(Term::Blank(x)), Some(Term::Blank(y))) | (Some(Term::Iri(x)), Some(Term::Iri(y))) => x.cmp(y),
        (Some(Term::Literal(x)), Some(Term::Literal(y))) => {
            let numeric = match (numeric_value(x), numeric_value(y)) {
                (Some(p), Some(q)) => p.partial_cmp(&q).unwrap_or(Ordering::Equal),
                _ => Ordering::Equal,
            };
            numeric
                .then_with(|| x.lexical().cmp(y.lexical()))
                .then_with(|| x.lang().cmp(&y.lang()))
                .then_with(|| x.datatype().cmp(&y.datatype()))
        }
        _ => rank(a).cmp(&rank(b)),
    }
}

/// A literal without language tag, plain or of an XSD numeric type, whose
/// lexical form is a decimal or double.
fn numeric_value(l: &Literal) -> Option<f64> {
    if l.lang().is_some() {
        return None;
    }
    if let Some(dt) = l.datatype() {
        let local = dt.strip_prefix(XSD)?;
        if !NUMERIC_TYPES.contains(&local) {
            return None;
        }
    }
    let lex = l.lexical();
    if lex.is_empty()
        || !lex.bytes().any(|b| b.is_ascii_digit())
        || !lex.bytes().all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b))
    {
        return None;
    }
    lex.parse::<f64>().ok()
}

/// A string literal: plain, xsd:string or language-tagged.
fn string_value(t: &Term) -> Option<(&str, Option<&str>)> {
    match t {
        Term::Literal(l) if l.datatype().is_none() => Some((l.lexical(), l.lang())),
        _ => None,
    }
}

fn boolean(b: bool) -> Term {
    Term::typed_literal(if b { "true" } else { "false" }, format!("{XSD}boolean")).expect("valid datatype")
}

/// Effective boolean value.
fn ebv(t: &Term) -> ExprResult<bool> {
    let Term::Literal(l) = t else {
        return Err(ExprError::Type);
    };
    match l.datatype() {
        None if l.lang().is_none() => Ok(!l.lexical().is_empty()),
        None => Err(ExprError::Type),
        Some(dt) if dt == format!("{XSD}boolean") => Ok(matches!(l.lexical(), "true" | "1")),
        Some(_) => match numeric_value(l) {
            Some(v) => Ok(v != 0.0 && !v.is_nan()),
            None if NUMERIC_TYPES.iter().any(|n| l.datatype() == Some(&format!("{XSD}{n}"))) => Ok(false),
            None => Err(ExprError::Type),
        },
    }
}

fn equal(a: &Term, b: &Term) -> bool {
    if let (Term::Literal(x), Term::Literal(y)) = (a, b) {
        if let (Some(p), Some(q)) = (numeric_value(x), numeric_value(y)) {
            return p == q;
        }
    }
    a == b
}

fn compare(a: &Term, b: &Term) -> ExprResult<Ordering> {
    let (Term::Literal(x), Term::Literal(y)) = (a, b) else {
        return Err(ExprError::Type);
    };
    match (numeric_value(x), numeric_value(y)) {
        (Some(p), Some(q)) => p.partial_cmp(&q).ok_or(ExprError::Type),
        (None, None) if x.datatype().is_none() && y.datatype().is_none() && x.lang() == y.lang() => {
            Ok(x.lexical().cmp(y.lexical()))
        }
        _ => Err(ExprError::Type),
    }
}

fn lang_matches(tag: &str, range: &str) -> bool {
    if range == "*" {
        return !tag.is_empty();
    }
    let tag = tag.to_ascii_lowercase();
    let range = range.to_ascii_lowercase();
    tag == range || tag.strip_prefix(&range).is_some_and(|rest| rest.starts_with('-'))
}

fn compile_regex(pattern: &str, flags: &str) -> Result<Regex, SparqlError> {
    let err = |reason: String| SparqlError::Regex {
        pattern: pattern.to_string(),
        reason,
    };
    let mut b = RegexBuilder::new(pattern);
    for f in flags.chars() {
        match f {
            'i' => b.case_insensitive(true),
            's' => b.dot_matches_new_line(true),
            'm' => b.multi_line(true),
            'x' => b.ignore_whitespace(true),
            other => return Err(err(format!("unknown flag '{other}'"))),
        };
    }
    b.build().map_err(|e| err(e.to_string()))
}

struct Evaluator<'s> {
    store: &'s Store,
    slots: HashMap<String, usize>,
    width: usize,
    deadline: Option<Instant>,
    ticks: Cell<u64>,
    regexes: RefCell<HashMap<(String, String), Result<Regex, SparqlError>>>,
}

impl<'s> Evaluator<'s> {
    fn tick(&self) -> Result<(), SparqlError> {
        let n = self.ticks.get() + 1;
        self.ticks.set(n);
        if n.is_multiple_of(TICKS_PER_CLOCK_CHECK) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(SparqlError::Timeout);
                }
            }
        }
        Ok(())
    }

    /// Compiles constant regex patterns up front so a malformed one is
    /// reported even when no row reaches it.
    fn precompile(&self, g: &GroupPattern) -> Result<(), SparqlError> {
        for e in &g.elements {
            match e {
                Element::Filter(f) => self.precompile_expr(f)?,
                Element::Optional(g) | Element::Group(g) => self.precompile(g)?,
                Element::Union(gs) => {
                    for g in gs {
                        self.precompile(g)?;
                    }
                }
                Element::Triple(_) => {}
            }
        }
        Ok(())
    }

    fn precompile_expr(&self, e: &Expr) -> Result<(), SparqlError> {
        match e {
            Expr::Or(a, b) | Expr::And(a, b) | Expr::Cmp(_, a, b) => {
                self.precompile_expr(a)?;
                self.precompile_expr(b)
            }
            Expr::Not(a) => self.precompile_expr(a),
            Expr::Call(f, args) => {
                if *f == Func::Regex {
                    let pattern = match args.get(1) {
                        Some(Expr::Const(t)) => string_value(t).map(|(s, _)| s),
                        _ => None,
                    };
                    let flags = match args.get(2) {
                        None => Some(""),
                        Some(Expr::Const(t)) => string_value(t).map(|(s, _)| s),
                        _ => None,
                    };
                    if let (Some(p), Some(f)) = (pattern, flags) {
                        self.regex(p, f)?;
                    }
                }
                args.iter().try_for_each(|a| self.precompile_expr(a))
            }
            Expr::Var(_) | Expr::Const(_) => Ok(()),
        }
    }

    fn regex(&self, pattern: &str, flags: &str) -> Result<Regex, SparqlError> {
        let key = (pattern.to_string(), flags.to_string());
        self.regexes
            .borrow_mut()
            .entry(key)
            .or_insert_with(|| compile_regex(pattern, flags))
            .clone()
    }

    fn slot(&self, v: &VarOrTerm) -> Slot {
        match v {
            VarOrTerm::Var(name) => Slot::Var(self.slots[name]),
            VarOrTerm::Term(t) => Slot::Const(self.store.term_id(t)),
        }
    }

    /// Solutions of `g` on its own, filters applied.
    fn independent(&self, g: &GroupPattern) -> Result<Vec<Row>, SparqlError> {
        let rows = self.extend(g, vec![vec![None; self.width]])?;
        self.filter_rows(&g.filters().collect::<Vec<_>>(), rows, None)
    }

    /// Joins `rows` with the non-filter elements of `g`, left to right.
    fn extend(&self, g: &GroupPattern, mut rows: Vec<Row>) -> Result<Vec<Row>, SparqlError> {
        let mut bgp = Vec::new();
        for e in &g.elements {
            if let Element::Triple(t) = e {
                bgp.push(t.positions().map(|p| self.slot(p)));
                continue;
            }
            if !bgp.is_empty() {
                rows = self.bgp_join(&bgp, rows)?;
                bgp.clear();
            }
            match e {
                Element::Triple(_) | Element::Filter(_) => {}
                Element::Optional(opt) => rows = self.left_join(opt, rows)?,
                Element::Group(sub) => rows = self.join_group(sub, rows)?,
                Element::Union(alts) => {
                    let mut out = Vec::new();
                    for alt in alts {
                        out.extend(self.join_group(alt, rows.clone())?);
                    }
                    rows = out;
                }
            }
        }
        if !bgp.is_empty() {
            rows = self.bgp_join(&bgp, rows)?;
        }
        Ok(rows)
    }

    /// Join with a nested group whose filters only see its own variables.
    fn join_group(&self, g: &GroupPattern, rows: Vec<Row>) -> Result<Vec<Row>, SparqlError> {
        if is_flat(g) {
            // Every variable of a flat group is bound by its triples, so
            // extending the outer rows and masking to those variables gives
            // the filters exactly the group's own solutions.
            let mask = self.mask(g);
            let rows = self.extend(g, rows)?;
            self.filter_rows(&g.filters().collect::<Vec<_>>(), rows, Some(&mask))
        } else {
            let right = self.independent(g)?;
            self.hash_join(rows, &right)
        }
    }

    /// OPTIONAL: the optional group's filters are the join condition and see
    /// the merged row.
    fn left_join(&self, g: &GroupPattern, rows: Vec<Row>) -> Result<Vec<Row>, SparqlError> {
        let filters: Vec<&Expr> = g.filters().collect();
        let mut out = Vec::with_capacity(rows.len());
        if is_flat(g) {
            for row in rows {
                let ext = self.extend(g, vec![row.clone()])?;
                let kept = self.filter_rows(&filters, ext, None)?;
                if kept.is_empty() {
                    out.push(row);
                } else {
                    out.extend(kept);
                }
            }
        } else {
            let right = self.extend(g, vec![vec![None; self.width]])?;
            for row in rows {
                let mut any = false;
                for r in &right {
                    self.tick()?;
                    if let Some(m) = merge(&row, r) {
                        if self.passes(&filters, &m, None)? {
                            out.push(m);
                            any = true;
                        }
                    }
                }
                if !any {
                    out.push(row);
                }
            }
        }
        Ok(out)
    }

    fn hash_join(&self, left: Vec<Row>, right: &[Row]) -> Result<Vec<Row>, SparqlError> {
        let always_bound = |rows: &[Row], i: usize| rows.iter().all(|r| r[i].is_some());
        let keys: Vec<usize> = (0..self.width)
            .filter(|&i| always_bound(&left, i) && always_bound(right, i))
            .collect();
        let mut buckets: HashMap<Vec<TermId>, Vec<&Row>> = HashMap::new();
        for r in right {
            buckets.entry(keys.iter().map(|&i| r[i].expect("key bound")).collect()).or_default().push(r);
        }
        let mut out = Vec::new();
        for l in &left {
            let key: Vec<TermId> = keys.iter().map(|&i| l[i].expect("key bound")).collect();
            for r in buckets.get(&key).into_iter().flatten() {
                self.tick()?;
                if let Some(m) = merge(l, r) {
                    out.push(m);
                }
            }
        }
        Ok(out)
    }

    fn mask(&self, g: &GroupPattern) -> Vec<bool> {
        let mut mask = vec![false; self.width];
        for v in g.variables() {
            mask[self.slots[&v]] = true;
        }
        mask
    }

    fn bgp_join(&self, pats: &[[Slot; 3]], rows: Vec<Row>) -> Result<Vec<Row>, SparqlError> {
        if pats.iter().flatten().any(|s| matches!(s, Slot::Const(None))) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut done = vec![false; pats.len()];
        for mut row in rows {
            self.bgp_row(pats, &mut done, &mut row, &mut out)?;
        }
        Ok(out)
    }

    /// Depth-first matching; at each step picks the remaining pattern with
    /// the most bound positions, then the fewest candidate triples.
    fn bgp_row(&self, pats: &[[Slot; 3]], done: &mut [bool], row: &mut Row, out: &mut Vec<Row>) -> Result<(), SparqlError> {
        self.tick()?;
        let bound = |s: &Slot| match *s {
            Slot::Const(id) => id,
            Slot::Var(i) => row[i],
        };
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, p) in pats.iter().enumerate() {
            if done[i] {
                continue;
            }
            let ids = p.each_ref().map(bound);
            let nbound = ids.iter().filter(|x| x.is_some()).count();
            let count = self.store.count(ids[0], ids[1], ids[2]);
            let better = match best {
                None => true,
                Some((_, b, c)) => nbound > b || (nbound == b && count < c),
            };
            if better {
                best = Some((i, nbound, count));
            }
        }
        let Some((i, _, count)) = best else {
            out.push(row.clone());
            return Ok(());
        };
        if count == 0 {
            return Ok(());
        }
        let pat = pats[i];
        let ids = pat.each_ref().map(bound);
        done[i] = true;
        for t in self.store.match_ids(ids[0], ids[1], ids[2]) {
            let mut newly = Vec::new();
            let mut ok = true;
            for (slot, id) in pat.iter().zip(t) {
                if let Slot::Var(v) = *slot {
                    match row[v] {
                        Some(x) if x != id => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            row[v] = Some(id);
                            newly.push(v);
                        }
                    }
                }
            }
            if ok {
                self.bgp_row(pats, done, row, out)?;
            }
            for v in newly {
                row[v] = None;
            }
        }
        done[i] = false;
        Ok(())
    }

    fn filter_rows(
        &self,
        filters: &[&Expr],
        rows: Vec<Row>,
        mask: Option<&[bool]>,
    ) -> Result<Vec<Row>, SparqlError> {
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            self.tick()?;
            if self.passes(filters, &row, mask)? {
                out.push(row);
            }
        }
        Ok(out)
    }

    fn passes(&self, filters: &[&Expr], row: &Row, mask: Option<&[bool]>) -> Result<bool, SparqlError> {
        for f in filters {
            match self.truth(f, row, mask) {
                Ok(true) => {}
                Ok(false) | Err(ExprError::Type) => return Ok(false),
                Err(ExprError::Fatal(e)) => return Err(e),
            }
        }
        Ok(true)
    }

    fn lookup(&self, name: &str, row: &Row, mask: Option<&[bool]>) -> Option<TermId> {
        let &i = self.slots.get(name)?;
        if mask.is_some_and(|m| !m[i]) {
            return None;
        }
        row[i]
    }

    fn truth(&self, e: &Expr, row: &Row, mask: Option<&[bool]>) -> ExprResult<bool> {
        match e {
            Expr::Or(a, b) => match (self.truth(a, row, mask), self.truth(b, row, mask)) {
                (Err(ExprError::Fatal(x)), _) | (_, Err(ExprError::Fatal(x))) => Err(ExprError::Fatal(x)),
                (Ok(true), _) | (_, Ok(true)) => Ok(true),
                (Ok(false), Ok(false)) => Ok(false),
                _ => Err(ExprError::Type),
            },
            Expr::And(a, b) => match (self.truth(a, row, mask), self.truth(b, row, mask)) {
                (Err(ExprError::Fatal(x)), _) | (_, Err(ExprError::Fatal(x))) => Err(ExprError::Fatal(x)),
                (Ok(false), _) | (_, Ok(false)) => Ok(false),
                (Ok(true), Ok(true)) => Ok(true),
                _ => Err(ExprError::Type),
            },
            Expr::Not(a) => self.truth(a, row, mask).map(|b| !b),
            _ => ebv(&*self.value(e, row, mask)?),
        }
    }

    fn value(&self, e: &Expr, row: &Row, mask: Option<&[bool]>) -> ExprResult<Cow<'s, Term>> {
        Ok(match e {
            Expr::Var(v) => {
                let id = self.lookup(v, row, mask).ok_or(ExprError::Type)?;
                Cow::Borrowed(self.store.term(id))
            }
            Expr::Const(t) => Cow::Owned(t.clone()),
            Expr::Or(..) | Expr::And(..) | Expr::Not(_) => Cow::Owned(boolean(self.truth(e, row, mask)?)),
            Expr::Cmp(op, a, b) => {
                let x = self.value(a, row, mask)?;
                let y = self.value(b, row, mask)?;
                let r = match op {
                    CmpOp::Eq => equal(&x, &y),
                    CmpOp::Ne => !equal(&x, &y),
                    CmpOp::Lt => compare(&x, &y)? == Ordering::Less,
                    CmpOp::Le => compare(&x, &y)? != Ordering::Greater,
                    CmpOp::Gt => compare(&x, &y)? == Ordering::Greater,
                    CmpOp::Ge => compare(&x, &y)? != Ordering::Less,
                };
                Cow::Owned(boolean(r))
            }
            Expr::Call(f, args) => Cow::Owned(self.call(*f, args, row, mask)?),
        })
    }

    fn call(&self, f: Func, args: &[Expr], row: &Row, mask: Option<&[bool]>) -> ExprResult<Term> {
        if f == Func::Bound {
            let Expr::Var(v) = &args[0] else {
                return Err(ExprError::Type);
            };
            return Ok(boolean(self.lookup(v, row, mask).is_some()));
        }
        let vals = args
            .iter()
            .map(|a| self.value(a, row, mask))
            .collect::<ExprResult<Vec<_>>>()?;
        let string = |i: usize| string_value(&vals[i]).ok_or(ExprError::Type);
        let simple = |i: usize| match string_value(&vals[i]) {
            Some((s, None)) => Ok(s),
            _ => Err(ExprError::Type),
        };
        let same_lang = |lex: String, lang: Option<&str>| match lang {
            Some(l) => Term::lang_literal(lex, l).map_err(|_| ExprError::Type),
            None => Ok(Term::literal(lex)),
        };
        Ok(match f {
            Func::Regex => {
                let (text, _) = string(0)?;
                let pattern = simple(1)?;
                let flags = if vals.len() > 2 { simple(2)? } else { "" };
                let re = self.regex(pattern, flags).map_err(ExprError::Fatal)?;
                boolean(re.is_match(text))
            }
            Func::Lang => match vals[0].as_ref() {
                Term::Literal(l) => Term::literal(l.lang().unwrap_or("")),
                _ => return Err(ExprError::Type),
            },
            Func::LangMatches => boolean(lang_matches(simple(0)?, simple(1)?)),
            Func::Contains | Func::StrStarts => {
                let (a, la) = string(0)?;
                let (b, lb) = string(1)?;
                if lb.is_some() && la != lb {
                    return Err(ExprError::Type);
                }
                boolean(if f == Func::Contains { a.contains(b) } else { a.starts_with(b) })
            }
            Func::Lcase => {
                let (s, lang) = string(0)?;
                same_lang(s.to_lowercase(), lang)?
            }
            Func::Ucase => {
                let (s, lang) = string(0)?;
                same_lang(s.to_uppercase(), lang)?
            }
            Func::Str => match vals[0].as_ref() {
                Term::Iri(i) => Term::literal(i.as_str()),
                Term::Literal(l) => Term::literal(l.lexical()),
                Term::Blank(_) => return Err(ExprError::Type),
            },
            Func::IsIri => boolean(matches!(vals[0].as_ref(), Term::Iri(_))),
            Func::IsLiteral => boolean(vals[0].is_literal()),
            Func::IsBlank => boolean(vals[0].is_blank()),
            Func::Bound => unreachable!("handled above"),
        })
    }
}

/// A group made only of triple patterns and filters.
fn is_flat(g: &GroupPattern) -> bool {
    g.elements
        .iter()
        .all(|e| matches!(e, Element::Triple(_) | Element::Filter(_)))
}

fn merge(a: &Row, b: &Row) -> Option<Row> {
    a.iter()
        .zip(b)
        .map(|(x, y)| match (x, y) {
            (Some(p), Some(q)) if p != q => Err(()),
            _ => Ok(x.or(*y)),
        })
        .collect::<Result<Row, ()>>()
        .ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_ntriples;
    use crate::sparql::parse_query;

    fn store(nt: &str) -> Store {
        Store::from_graph(&parse_ntriples(nt.as_bytes()).unwrap()).unwrap()
    }

    fn run(s: &Store, q: &str) -> Result<Solutions, SparqlError> {
        evaluate(&parse_query(q).unwrap(), s)
    }

    const DATA: &str = r#"<http://ex/a> <http://ex/p> "10" .
<http://ex/a> <http://ex/q> "hola"@es .
<http://ex/b> <http://ex/p> "9" .
<http://ex/c> <http://ex/p> "x" .
<http://ex/b> <http://ex/q> "hello"@en-GB .
"#;

    #[test]
    fn numeric_vs_string_comparison() {
        let s = store(DATA);
        let r = run(&s, "SELECT ?s { ?s <http://ex/p> ?o FILTER(?o > 9) }").unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.get(0, "s"), Some(&Term::iri("http://ex/a").unwrap()));
        // "x" vs 9 errors, so ?c never passes either direction.
        let r = run(&s, "SELECT ?s { ?s <http://ex/p> ?o FILTER(!(?o > 9)) }").unwrap();
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn optional_and_order() {
        let s = store(DATA);
        let r = run(&s, "SELECT ?s ?l { ?s <http://ex/p> ?o OPTIONAL { ?s <http://ex/q> ?l FILTER(langMatches(lang(?l), 'en')) } } ORDER BY DESC(?s)").unwrap();
        let ls: Vec<Option<&Term>> = (0..r.len()).map(|i| r.get(i, "l")).collect();
        assert_eq!(ls, vec![None, Some(&Term::lang_literal("hello", "en-GB").unwrap()), None]);
    }

    #[test]
    fn union_scoping_and_distinct() {
        let s = store(DATA);
        let r = run(&s, "SELECT DISTINCT ?s { { ?s <http://ex/p> ?o } UNION { ?s <http://ex/q> ?l } }").unwrap();
        assert_eq!(r.len(), 3);
        // The inner filter cannot see ?o, so it errors and removes every row.
        let r = run(&s, "SELECT ?s { ?s <http://ex/p> ?o { ?s <http://ex/q> ?l FILTER(bound(?o)) } }").unwrap();
        assert_eq!(r.len(), 0);
    }

    #[test]
    fn regex_errors_are_reported() {
        let s = store(DATA);
        assert!(matches!(run(&s, "SELECT ?s { ?s ?p ?o FILTER regex(?o, '(') }"), Err(SparqlError::Regex { .. })));
        assert!(matches!(run(&s, "SELECT ?s { ?s ?p ?o FILTER regex(?o, 'a', 'q') }"), Err(SparqlError::Regex { .. })));
        let r = run(&s, "SELECT ?o { ?s ?p ?o FILTER regex(?o, '^H', 'i') }").unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn absent_constant_and_limits() {
        let s = store(DATA);
        assert!(run(&s, "SELECT ?s { ?s <http://ex/none> ?o }").unwrap().is_empty());
        let r = run(&s, "SELECT ?o { ?s <http://ex/p> ?o } ORDER BY ?o OFFSET 1 LIMIT 1").unwrap();
        assert_eq!(r.get(0, "o"), Some(&Term::literal("10")));
    }

    #[test]
    fn timeout() {
        let s = store(DATA);
        let q = parse_query("SELECT * { ?a ?b ?c . ?d ?e ?f . ?g ?h ?i . ?j ?k ?l . ?m ?n ?x }").unwrap();
        assert_eq!(evaluate_with(&q, &s, Some(Instant::now())), Err(SparqlError::Timeout));
    }
}
