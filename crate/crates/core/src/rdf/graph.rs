use std::collections::{BTreeSet, HashMap};

use super::term::{Term, Triple};

/// A set of triples indexed by subject, predicate and object.
///
/// Inserting a triple that is already present is a no-op. Graphs are built
/// single-threaded and only read afterwards.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    triples: Vec<Triple>,
    positions: HashMap<Triple, usize>,
    by_subject: HashMap<Term, Vec<usize>>,
    by_predicate: HashMap<Term, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a triple; returns false when it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.positions.contains_key(&triple) {
            return false;
        }
        let idx = self.triples.len();
        self.by_subject
            .entry(triple.subject().clone())
            .or_default()
            .push(idx);
        self.by_predicate
            .entry(triple.predicate().clone())
            .or_default()
            .push(idx);
        self.by_object
            .entry(triple.object().clone())
            .or_default()
            .push(idx);
        self.positions.insert(triple.clone(), idx);
        self.triples.push(triple);
        true
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.positions.contains_key(triple)
    }

    /// Triples in insertion order.
    pub fn iter(&self) -> std::slice::Iter<'_, Triple> {
        self.triples.iter()
    }

    pub fn with_subject<'a>(&'a self, subject: &Term) -> impl Iterator<Item = &'a Triple> + 'a {
        self.lookup(&self.by_subject, subject)
    }

    pub fn with_predicate<'a>(
        &'a self,
        predicate: &Term,
    ) -> impl Iterator<Item = &'a Triple> + 'a {
        self.lookup(&self.by_predicate, predicate)
    }

    pub fn with_object<'a>(&'a self, object: &Term) -> impl Iterator<Item = &'a Triple> + 'a {
        self.lookup(&self.by_object, object)
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(
        &'a self,
        subject: &Term,
        predicate: &'a str,
    ) -> impl Iterator<Item = &'a Term> + 'a {
        self.with_subject(subject)
            .filter(move |t| t.predicate_iri() == predicate)
            .map(Triple::object)
    }

    fn lookup<'a>(
        &'a self,
        index: &'a HashMap<Term, Vec<usize>>,
        key: &Term,
    ) -> impl Iterator<Item = &'a Triple> + 'a {
        index
            .get(key)
            .map(|v| v.as_slice())
            .unwrap_or_default()
            .iter()
            .map(|&i| &self.triples[i])
    }

    pub fn subjects(&self) -> impl Iterator<Item = &Term> {
        self.by_subject.keys()
    }

    /// Distinct blank node labels, sorted.
    pub fn blank_nodes(&self) -> BTreeSet<&str> {
        self.triples
            .iter()
            .flat_map(|t| [t.subject(), t.object()])
            .filter_map(Term::as_blank)
            .collect()
    }

    /// Triples sorted by their subject, predicate and object renderings.
    pub fn sorted_triples(&self) -> Vec<&Triple> {
        let mut keyed: Vec<(String, String, String, &Triple)> = self
            .triples
            .iter()
            .map(|t| {
                (
                    t.subject().to_string(),
                    t.predicate().to_string(),
                    t.object().to_string(),
                    t,
                )
            })
            .collect();
        keyed.sort_by(|a, b| (&a.0, &a.1, &a.2).cmp(&(&b.0, &b.1, &b.2)));
        keyed.into_iter().map(|k| k.3).collect()
    }

    pub fn into_triples(self) -> Vec<Triple> {
        self.triples
    }
}

/// Set equality; blank node labels must match exactly. Use
/// [`super::graph_isomorphic`] to compare up to blank node renaming.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.triples.iter().all(|t| other.contains(t))
    }
}

impl Eq for Graph {}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::slice::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(
            Term::iri(s).unwrap(),
            Term::iri(p).unwrap(),
            Term::literal(o),
        )
        .unwrap()
    }

    #[test]
    fn insert_is_idempotent() {
        let mut g = Graph::new();
        assert!(g.insert(t("http://ex/a", "http://ex/p", "x")));
        assert!(!g.insert(t("http://ex/a", "http://ex/p", "x")));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn every_triple_reachable_through_all_indexes() {
        let g: Graph = [
            t("http://ex/a", "http://ex/p", "x"),
            t("http://ex/a", "http://ex/q", "y"),
            t("http://ex/b", "http://ex/p", "x"),
        ]
        .into_iter()
        .collect();
        for triple in &g {
            assert!(g.with_subject(triple.subject()).any(|x| x == triple));
            assert!(g.with_predicate(triple.predicate()).any(|x| x == triple));
            assert!(g.with_object(triple.object()).any(|x| x == triple));
        }
        assert_eq!(g.with_object(&Term::literal("x")).count(), 2);
        let a = Term::iri("http://ex/a").unwrap();
        assert_eq!(g.objects(&a, "http://ex/q").count(), 1);
    }
}
