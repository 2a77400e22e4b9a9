use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use super::{Graph, Term, Triple};

/// True iff a bijection between blank node labels maps `a` onto `b` exactly.
///
/// Blank nodes are first partitioned by iterative colour refinement over their
/// neighbourhoods; the remaining ambiguity is resolved by backtracking within
/// colour classes.
pub fn graph_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (ground_a, blank_a): (Vec<&Triple>, Vec<&Triple>) = a.iter().partition(|t| !has_blank(t));
    let ground_b_count = b.iter().filter(|t| !has_blank(t)).count();
    if ground_a.len() != ground_b_count || !ground_a.iter().all(|t| b.contains(t)) {
        return false;
    }
    let nodes_a: Vec<&str> = a.blank_nodes().into_iter().collect();
    let nodes_b: Vec<&str> = b.blank_nodes().into_iter().collect();
    if nodes_a.len() != nodes_b.len() {
        return false;
    }
    if nodes_a.is_empty() {
        return true;
    }
    let blank_b: Vec<&Triple> = b.iter().filter(|t| has_blank(t)).collect();

    let (colors_a, colors_b) = refine_together(&nodes_a, &blank_a, &nodes_b, &blank_b);
    let mut hist_a: HashMap<u64, usize> = HashMap::new();
    let mut hist_b: HashMap<u64, usize> = HashMap::new();
    for c in colors_a.values() {
        *hist_a.entry(*c).or_default() += 1;
    }
    for c in colors_b.values() {
        *hist_b.entry(*c).or_default() += 1;
    }
    if hist_a != hist_b {
        return false;
    }

    let mut order = nodes_a.clone();
    order.sort_by_key(|n| (hist_a[&colors_a[n]], colors_a[n], *n));

    let mut incident: HashMap<&str, Vec<&Triple>> = HashMap::new();
    for t in &blank_a {
        for term in [t.subject(), t.object()] {
            if let Term::Blank(l) = term {
                let list = incident.entry(l.as_str()).or_default();
                if !list.iter().any(|x| std::ptr::eq(*x, *t)) {
                    list.push(t);
                }
            }
        }
    }

    let mut search = Search {
        order: &order,
        candidates: &nodes_b,
        colors_a: &colors_a,
        colors_b: &colors_b,
        incident: &incident,
        target: b,
        mapping: HashMap::new(),
        used: HashSet::new(),
    };
    search.run(0)
}

fn has_blank(t: &Triple) -> bool {
    t.subject().is_blank() || t.object().is_blank()
}

fn hash_of(value: impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

fn refine_together<'a>(
    nodes_a: &[&'a str],
    triples_a: &[&'a Triple],
    nodes_b: &[&'a str],
    triples_b: &[&'a Triple],
) -> (HashMap<&'a str, u64>, HashMap<&'a str, u64>) {
    let mut ca: HashMap<&str, u64> = nodes_a.iter().map(|n| (*n, 0)).collect();
    let mut cb: HashMap<&str, u64> = nodes_b.iter().map(|n| (*n, 0)).collect();
    let classes = |m: &HashMap<&str, u64>| m.values().collect::<HashSet<_>>().len();
    let mut prev = (classes(&ca), classes(&cb));
    for _ in 0..=nodes_a.len() {
        ca = refine_step(&ca, triples_a);
        cb = refine_step(&cb, triples_b);
        let now = (classes(&ca), classes(&cb));
        if now == prev {
            break;
        }
        prev = now;
    }
    (ca, cb)
}

fn refine_step<'a>(colors: &HashMap<&'a str, u64>, triples: &[&'a Triple]) -> HashMap<&'a str, u64> {
    let key = |t: &Term, me: &str| -> u64 {
        match t {
            Term::Blank(l) if l == me => hash_of(("self",)),
            Term::Blank(l) => hash_of(("blank", colors[l.as_str()])),
            other => hash_of(("ground", other)),
        }
    };
    let mut sigs: HashMap<&str, Vec<u64>> = colors.keys().map(|k| (*k, Vec::new())).collect();
    for t in triples {
        let p = hash_of(t.predicate_iri());
        if let Term::Blank(s) = t.subject() {
            let sig = hash_of((0u8, p, key(t.object(), s)));
            sigs.get_mut(s.as_str()).expect("known node").push(sig);
        }
        if let Term::Blank(o) = t.object() {
            if t.subject() != t.object() {
                let sig = hash_of((1u8, p, key(t.subject(), o)));
                sigs.get_mut(o.as_str()).expect("known node").push(sig);
            }
        }
    }
    sigs.into_iter()
        .map(|(node, mut sig)| {
            sig.sort_unstable();
            (node, hash_of((colors[node], sig)))
        })
        .collect()
}

struct Search<'s, 'a> {
    order: &'s [&'a str],
    candidates: &'s [&'a str],
    colors_a: &'s HashMap<&'a str, u64>,
    colors_b: &'s HashMap<&'a str, u64>,
    incident: &'s HashMap<&'a str, Vec<&'a Triple>>,
    target: &'s Graph,
    mapping: HashMap<&'a str, &'a str>,
    used: HashSet<&'a str>,
}

impl<'a> Search<'_, 'a> {
    fn run(&mut self, depth: usize) -> bool {
        let Some(&node) = self.order.get(depth) else {
            return true;
        };
        let color = self.colors_a[node];
        for &cand in self.candidates {
            if self.colors_b[cand] != color || self.used.contains(cand) {
                continue;
            }
            self.mapping.insert(node, cand);
            self.used.insert(cand);
            if self.consistent(node) && self.run(depth + 1) {
                return true;
            }
            self.mapping.remove(node);
            self.used.remove(cand);
        }
        false
    }

    /// Every triple touching `node` whose blank nodes are all mapped must exist in the target.
    fn consistent(&self, node: &str) -> bool {
        let map_term = |t: &Term| -> Option<Term> {
            match t {
                Term::Blank(l) => self
                    .mapping
                    .get(l.as_str())
                    .map(|m| Term::Blank((*m).to_string())),
                other => Some(other.clone()),
            }
        };
        self.incident.get(node).into_iter().flatten().all(|t| {
            match (map_term(t.subject()), map_term(t.object())) {
                (Some(s), Some(o)) => Triple::new(s, t.predicate().clone(), o)
                    .map(|mapped| self.target.contains(&mapped))
                    .unwrap_or(false),
                _ => true,
            }
        })
    }
}
