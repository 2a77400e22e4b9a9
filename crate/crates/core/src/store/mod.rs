//! The portal's in-memory store: interned triples under three sorted
//! permutations, plus facet and free-text indexes over the records.

mod index;
mod stats;

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::catalog::{from_graph, record_ids, to_graph, CatalogError, CatalogRecord, SourceRepo};
use crate::rdf::{parse_ntriples, to_ntriples, Graph, SyntaxError, Term, Triple};

pub use index::{FacetIndex, Posting, TextIndex};
pub use stats::{
    corpus_stats, format_corpus_stats, CompletenessReport, CompletenessRow, CorpusStatsRow, SourceTally,
};
pub use index::{FacetCount, RecordSummary, SearchQuery, SearchResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("record id {0} occurs more than once")]
    DuplicateId(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Interned term id.
pub type TermId = u32;

/// Which positions of a triple pattern are bound.
type Key = [Option<TermId>; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    Spo,
    Pos,
    Osp,
}

impl Order {
    /// Where the subject, predicate and object sit in this ordering.
    fn slots(self) -> [usize; 3] {
        match self {
            Order::Spo => [0, 1, 2],
            Order::Pos => [2, 0, 1],
            Order::Osp => [1, 2, 0],
        }
    }

    fn permute(self, t: [TermId; 3]) -> [TermId; 3] {
        let s = self.slots();
        let mut out = [0; 3];
        for (i, slot) in s.iter().enumerate() {
            out[*slot] = t[i];
        }
        out
    }

    fn unpermute(self, t: [TermId; 3]) -> [TermId; 3] {
        let s = self.slots();
        [t[s[0]], t[s[1]], t[s[2]]]
    }

    /// The ordering whose leading positions are exactly the bound ones.
    fn for_key(key: &Key) -> Order {
        match (key[0].is_some(), key[1].is_some(), key[2].is_some()) {
            (true, false, true) => Order::Osp,
            (true, _, _) | (false, false, false) => Order::Spo,
            (false, true, _) => Order::Pos,
            (false, false, true) => Order::Osp,
        }
    }
}

/// Immutable once built; cloning an `Arc<Store>` is the way to share it.
#[derive(Debug, Clone)]
pub struct Store {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    spo: Vec<[TermId; 3]>,
    pos: Vec<[TermId; 3]>,
    osp: Vec<[TermId; 3]>,
    records: Vec<CatalogRecord>,
    record_pos: HashMap<String, usize>,
    tallies: BTreeMap<SourceRepo, (usize, usize)>,
    facets: FacetIndex,
    text: TextIndex,
}

impl Default for Store {
    fn default() -> Self {
        Store::load(Vec::new()).expect("an empty store is valid")
    }
}

impl Store {
    /// Builds the store from records whose ids are unique.
    pub fn load(records: Vec<CatalogRecord>) -> Result<Store, StoreError> {
        let mut graph = Graph::new();
        let mut per_record = Vec::with_capacity(records.len());
        for r in &records {
            let g = to_graph(r);
            per_record.push(g.len());
            for t in g.into_triples() {
                graph.insert(t);
            }
        }
        Store::build(records, &graph, per_record)
    }

    /// Rebuilds a store from a graph such as a portal dump. The triples are
    /// kept exactly; records are read back from their dcat:Dataset subjects.
    pub fn from_graph(graph: &Graph) -> Result<Store, StoreError> {
        let mut records = Vec::new();
        for id in record_ids(graph) {
            records.push(from_graph(graph, &id)?.0);
        }
        let per_record = records.iter().map(|r| describe_graph(graph, &r.id).len()).collect();
        Store::build(records, graph, per_record)
    }

    pub fn from_ntriples(input: &[u8]) -> Result<Store, StoreError> {
        Store::from_graph(&parse_ntriples(input)?)
    }

    fn build(mut records: Vec<CatalogRecord>, graph: &Graph, per_record: Vec<usize>) -> Result<Store, StoreError> {
        let mut tallies: BTreeMap<SourceRepo, (usize, usize)> = BTreeMap::new();
        for (r, n) in records.iter().zip(&per_record) {
            let e = tallies.entry(r.source_repo.clone()).or_default();
            e.0 += 1;
            e.1 += n;
        }
        records.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = records.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(StoreError::DuplicateId(w[0].id.clone()));
        }
        let record_pos = records.iter().enumerate().map(|(i, r)| (r.id.clone(), i)).collect();

        // intern in canonical triple order so ids do not depend on insertion order
        let mut terms = Vec::new();
        let mut ids: HashMap<Term, TermId> = HashMap::new();
        let mut spo = Vec::with_capacity(graph.len());
        for t in graph.sorted_triples() {
            let mut row = [0; 3];
            for (slot, term) in [t.subject(), t.predicate(), t.object()].into_iter().enumerate() {
                row[slot] = *ids.entry(term.clone()).or_insert_with(|| {
                    terms.push(term.clone());
                    (terms.len() - 1) as TermId
                });
            }
            spo.push(row);
        }
        let sorted = |order: Order| {
            let mut v: Vec<[TermId; 3]> = spo.iter().map(|t| order.permute(*t)).collect();
            v.sort_unstable();
            v
        };
        let (pos, osp) = (sorted(Order::Pos), sorted(Order::Osp));
        spo.sort_unstable();
        let facets = FacetIndex::build(&records);
        let text = TextIndex::build(&records);
        Ok(Store {
            terms,
            ids,
            spo,
            pos,
            osp,
            records,
            record_pos,
            tallies,
            facets,
            text,
        })
    }

    /// Number of triples.
    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn term_id(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    /// Records sorted by id.
    pub fn records(&self) -> &[CatalogRecord] {
        &self.records
    }

    pub fn record(&self, id: &str) -> Option<&CatalogRecord> {
        self.record_pos.get(id).map(|&i| &self.records[i])
    }

    pub fn facets(&self) -> &FacetIndex {
        &self.facets
    }

    pub fn text(&self) -> &TextIndex {
        &self.text
    }

    fn index(&self, order: Order) -> &[[TermId; 3]] {
        match order {
            Order::Spo => &self.spo,
            Order::Pos => &self.pos,
            Order::Osp => &self.osp,
        }
    }

    /// The contiguous run of the chosen index that matches the bound positions.
    fn range(&self, key: Key) -> (Order, &[[TermId; 3]]) {
        let order = Order::for_key(&key);
        let slots = order.slots();
        let mut prefix = Vec::with_capacity(3);
        let mut permuted: [Option<TermId>; 3] = [None; 3];
        for (i, slot) in slots.iter().enumerate() {
            permuted[*slot] = key[i];
        }
        for p in permuted {
            match p {
                Some(v) => prefix.push(v),
                None => break,
            }
        }
        let idx = self.index(order);
        let lo = idx.partition_point(|t| t[..prefix.len()] < prefix[..]);
        let hi = lo + idx[lo..].partition_point(|t| t[..prefix.len()] == prefix[..]);
        (order, &idx[lo..hi])
    }

    /// Triples as `[s, p, o]` ids matching the bound positions, in the order
    /// of the index that serves the pattern.
    pub fn match_ids(
        &self,
        s: Option<TermId>,
        p: Option<TermId>,
        o: Option<TermId>,
    ) -> impl Iterator<Item = [TermId; 3]> + '_ {
        let (order, run) = self.range([s, p, o]);
        run.iter().map(move |t| order.unpermute(*t))
    }

    /// How many triples `match_ids` would yield.
    pub fn count(&self, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> usize {
        self.range([s, p, o]).1.len()
    }

    /// Triples matching the bound terms; a term absent from the store matches nothing.
    pub fn match_pattern(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<Triple> {
        let lookup = |t: Option<&Term>| match t {
            None => Some(None),
            Some(t) => self.term_id(t).map(Some),
        };
        let (Some(s), Some(p), Some(o)) = (lookup(s), lookup(p), lookup(o)) else {
            return Vec::new();
        };
        self.match_ids(s, p, o).map(|t| self.triple(t)).collect()
    }

    pub fn triple(&self, t: [TermId; 3]) -> Triple {
        Triple::new(self.term(t[0]).clone(), self.term(t[1]).clone(), self.term(t[2]).clone())
            .expect("stored triples are well-formed")
    }

    /// Triples about `iri` plus those of blank nodes reachable from it.
    pub fn describe(&self, iri: &str) -> Graph {
        let mut g = Graph::new();
        let Some(start) = self.term_id(&Term::Iri(iri.to_string())) else {
            return g;
        };
        let mut seen = HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            for t in self.match_ids(Some(s), None, None) {
                if self.term(t[2]).is_blank() && seen.insert(t[2]) {
                    stack.push(t[2]);
                }
                g.insert(self.triple(t));
            }
        }
        g
    }

    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new();
        for t in &self.spo {
            g.insert(self.triple(*t));
        }
        g
    }

    /// Canonical N-Triples of every stored triple.
    pub fn dump(&self) -> String {
        to_ntriples(&self.to_graph())
    }

    /// Records and triples per source repository, as counted on load.
    pub fn tallies(&self) -> Vec<SourceTally> {
        self.tallies
            .iter()
            .map(|(repo, (records, triples))| SourceTally {
                source: repo.slug(),
                records: *records,
                triples: *triples,
            })
            .collect()
    }

    pub fn completeness(&self) -> CompletenessReport {
        CompletenessReport::from_records(&self.records)
    }

    pub fn facet_search(&self, query: &SearchQuery) -> SearchResult {
        index::search(self, query)
    }
}

fn describe_graph(graph: &Graph, iri: &str) -> Graph {
    let mut g = Graph::new();
    let mut stack = vec![Term::Iri(iri.to_string())];
    let mut seen = HashSet::new();
    while let Some(s) = stack.pop() {
        for t in graph.with_subject(&s) {
            if t.object().is_blank() && seen.insert(t.object().clone()) {
                stack.push(t.object().clone());
            }
            g.insert(t.clone());
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{LangString, LanguageRef};

    fn rec(key: &str) -> CatalogRecord {
        let mut r = CatalogRecord::new(format!("http://h/resource/clarin/{key}"), SourceRepo::Clarin);
        r.title.push(LangString::plain(format!("Corpus {key}")));
        r.languages.push(LanguageRef::resolved("es", "spa", 1.0));
        r.access_urls.push(format!("http://x.org/{key}"));
        r
    }

    #[test]
    fn one_record_has_its_graph_size() {
        let r = rec("a");
        let n = to_graph(&r).len();
        let s = Store::load(vec![r.clone()]).unwrap();
        assert_eq!(s.len(), n);
        assert_eq!(s.match_ids(None, None, None).count(), n);
        assert_eq!(s.describe(&r.id).len(), n);
        assert_eq!(s.tallies()[0].triples, n);
    }

    #[test]
    fn empty_and_duplicate() {
        let s = Store::default();
        assert!(s.is_empty());
        assert_eq!(s.completeness().total, 0);
        assert!(matches!(Store::load(vec![rec("a"), rec("a")]), Err(StoreError::DuplicateId(_))));
    }

    #[test]
    fn patterns_use_every_order() {
        let s = Store::load(vec![rec("a"), rec("b")]).unwrap();
        let all: Vec<Triple> = s.match_pattern(None, None, None);
        for t in &all {
            let (sub, p, o) = (Some(t.subject()), Some(t.predicate()), Some(t.object()));
            for key in 0..8u8 {
                let pick = |bit: u8, v| if key & bit != 0 { v } else { None };
                let got = s.match_pattern(pick(1, sub), pick(2, p), pick(4, o));
                let expected = all
                    .iter()
                    .filter(|x| {
                        (key & 1 == 0 || x.subject() == t.subject())
                            && (key & 2 == 0 || x.predicate() == t.predicate())
                            && (key & 4 == 0 || x.object() == t.object())
                    })
                    .count();
                assert_eq!(got.len(), expected);
                assert!(got.contains(t));
            }
        }
        assert!(s.match_pattern(Some(&Term::Iri("http://none".into())), None, None).is_empty());
    }

    #[test]
    fn dump_restores() {
        let s = Store::load(vec![rec("a"), rec("b")]).unwrap();
        let back = Store::from_ntriples(s.dump().as_bytes()).unwrap();
        // the parser relabels blank nodes, so compare up to isomorphism
        assert!(crate::rdf::graph_isomorphic(&back.to_graph(), &s.to_graph()));
        assert_eq!(back.records().len(), 2);
        assert_eq!(back.tallies(), s.tallies());
    }
}
