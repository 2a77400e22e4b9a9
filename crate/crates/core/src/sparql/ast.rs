use crate::rdf::Term;

/// A position in a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarOrTerm {
    /// Variable name without the `?`. Blank nodes in patterns become
    /// variables named `_:label`, which `SELECT *` does not project.
    Var(String),
    Term(Term),
}

impl VarOrTerm {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            VarOrTerm::Var(v) => Some(v),
            VarOrTerm::Term(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: VarOrTerm,
    pub predicate: VarOrTerm,
    pub object: VarOrTerm,
}

impl TriplePattern {
    pub fn positions(&self) -> [&VarOrTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

/// One element of a group, in source order. Filters apply to the whole
/// group wherever they appear in it.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Triple(TriplePattern),
    Filter(Expr),
    Optional(GroupPattern),
    /// Two or more alternatives.
    Union(Vec<GroupPattern>),
    Group(GroupPattern),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroupPattern {
    pub elements: Vec<Element>,
}

impl GroupPattern {
    pub fn filters(&self) -> impl Iterator<Item = &Expr> {
        self.elements.iter().filter_map(|e| match e {
            Element::Filter(f) => Some(f),
            _ => None,
        })
    }

    /// Variables in order of first appearance, including blank-node ones.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        for e in &self.elements {
            match e {
                Element::Triple(t) => {
                    for p in t.positions() {
                        if let Some(v) = p.as_var() {
                            if !out.iter().any(|x| x == v) {
                                out.push(v.to_string());
                            }
                        }
                    }
                }
                Element::Filter(_) => {}
                Element::Optional(g) | Element::Group(g) => g.collect_vars(out),
                Element::Union(gs) => {
                    for g in gs {
                        g.collect_vars(out);
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Regex,
    Lang,
    LangMatches,
    Contains,
    StrStarts,
    Lcase,
    Ucase,
    Str,
    Bound,
    IsIri,
    IsLiteral,
    IsBlank,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name.to_ascii_uppercase().as_str() {
            "REGEX" => Func::Regex,
            "LANG" => Func::Lang,
            "LANGMATCHES" => Func::LangMatches,
            "CONTAINS" => Func::Contains,
            "STRSTARTS" => Func::StrStarts,
            "LCASE" => Func::Lcase,
            "UCASE" => Func::Ucase,
            "STR" => Func::Str,
            "BOUND" => Func::Bound,
            "ISIRI" | "ISURI" => Func::IsIri,
            "ISLITERAL" => Func::IsLiteral,
            "ISBLANK" => Func::IsBlank,
            _ => return None,
        })
    }

    /// Allowed argument counts, inclusive.
    pub fn arity(self) -> (usize, usize) {
        match self {
            Func::Regex => (2, 3),
            Func::LangMatches | Func::Contains | Func::StrStarts => (2, 2),
            _ => (1, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(String),
    Const(Term),
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    All,
    Vars(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderKey {
    pub expr: Expr,
    pub descending: bool,
}

/// A SELECT query.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub projection: Projection,
    pub distinct: bool,
    pub pattern: GroupPattern,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
    pub offset: usize,
}

impl Query {
    /// Result columns: the projected variables, or for `*` every named
    /// pattern variable in order of first appearance.
    pub fn result_vars(&self) -> Vec<String> {
        match &self.projection {
            Projection::Vars(v) => v.clone(),
            Projection::All => self
                .pattern
                .variables()
                .into_iter()
                .filter(|v| !v.starts_with("_:"))
                .collect(),
        }
    }

    /// Projected variables that no pattern binds; their cells are always empty.
    pub fn unbound_projection(&self) -> Vec<String> {
        let bound = self.pattern.variables();
        self.result_vars().into_iter().filter(|v| !bound.contains(v)).collect()
    }
}
