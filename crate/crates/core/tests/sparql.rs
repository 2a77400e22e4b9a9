use std::time::Instant;

use lrhub_core::rdf::Term;
use lrhub_core::sparql::{evaluate, evaluate_with, parse_query, Solutions, SparqlError};
use lrhub_core::store::Store;
use lrhub_testkit::portal::apertium_record;
use lrhub_testkit::sparql::{arb_expr, arb_pattern, arb_query, arb_store, canonical_rows, oracle_eval, store_graph, store_triples};
use proptest::prelude::*;

fn engine(nt: &str, q: &str) -> Result<Solutions, SparqlError> {
    let store = Store::from_graph(&store_graph(nt)).unwrap();
    evaluate(&parse_query(q).unwrap(), &store)
}

fn oracle(nt: &str, q: &str) -> Result<Solutions, SparqlError> {
    oracle_eval(&parse_query(q).unwrap(), &store_triples(nt))
}

#[test]
fn apertium_language_query() {
    let rec = apertium_record();
    let id = rec.id.clone();
    let store = Store::load(vec![rec]).unwrap();
    let q = parse_query("SELECT ?s WHERE { ?s <http://purl.org/dc/terms/language> \"es\" }").unwrap();
    let r = evaluate(&q, &store).unwrap();
    assert_eq!(r.vars, vec!["s"]);
    assert_eq!(r.rows, vec![vec![Some(Term::iri(id.as_str()).unwrap())]]);
    let json: serde_json::Value = serde_json::from_str(&r.to_json_results()).unwrap();
    assert_eq!(json["results"]["bindings"][0]["s"]["type"], "uri");
    assert_eq!(json["results"]["bindings"][0]["s"]["value"], id.as_str());

    let none = parse_query("SELECT ?s WHERE { ?s <http://purl.org/dc/terms/language> \"xx\" }").unwrap();
    assert!(evaluate(&none, &store).unwrap().is_empty());
}

#[test]
fn construct_is_unsupported() {
    assert_eq!(
        parse_query("CONSTRUCT { ?s ?p ?o } WHERE { ?s ?p ?o }"),
        Err(SparqlError::UnsupportedFeature("CONSTRUCT".into()))
    );
}

#[test]
fn oracle_hand_checked() {
    // Worked by hand: ?s with p-value greater than 1, optionally with q.
    let nt = "<http://ex/a> <http://ex/p> \"2\" .\n<http://ex/b> <http://ex/p> \"1\" .\n<http://ex/a> <http://ex/q> \"x\" .\n<http://ex/c> <http://ex/p> \"10\" .\n";
    let q = "SELECT ?s ?v WHERE { ?s <http://ex/p> ?o OPTIONAL { ?s <http://ex/q> ?v } FILTER(?o > 1) } ORDER BY ?s";
    let expected = vec![
        vec![Some(Term::iri("http://ex/a").unwrap()), Some(Term::literal("x"))],
        vec![Some(Term::iri("http://ex/c").unwrap()), None],
    ];
    assert_eq!(oracle(nt, q).unwrap().rows, expected);
    assert_eq!(engine(nt, q).unwrap().rows, expected);
}

#[test]
fn malformed_regex_is_reported_by_both() {
    let nt = "<http://ex/a> <http://ex/p> \"2\" .\n";
    let q = "SELECT ?s WHERE { ?s ?p ?o FILTER regex(?o, \"[\") }";
    assert!(matches!(engine(nt, q), Err(SparqlError::Regex { .. })));
    assert!(matches!(oracle(nt, q), Err(SparqlError::Regex { .. })));
}

#[test]
fn time_budget() {
    let nt: String = (0..30).map(|i| format!("<http://ex/s{i}> <http://ex/p> <http://ex/o{i}> .\n")).collect();
    let store = Store::from_graph(&store_graph(&nt)).unwrap();
    let q = parse_query("SELECT * { ?a ?b ?c . ?d ?e ?f . ?g ?h ?i . ?j ?k ?l }").unwrap();
    assert_eq!(evaluate_with(&q, &store, Some(Instant::now())), Err(SparqlError::Timeout));
}

fn same(engine: &Solutions, oracle: &Solutions, ordered: bool) -> bool {
    engine.vars == oracle.vars
        && if ordered {
            engine.rows == oracle.rows
        } else {
            canonical_rows(engine) == canonical_rows(oracle)
        }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn matches_brute_force(nt in arb_store(30), q in arb_query()) {
        let e = engine(&nt, &q).unwrap();
        let o = oracle(&nt, &q).unwrap();
        prop_assert!(same(&e, &o, q.contains("ORDER BY")), "query {q}\nengine {e:?}\noracle {o:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn distinct_is_idempotent(nt in arb_store(30), pats in proptest::collection::vec(arb_pattern(), 1..=3)) {
        let q = format!("SELECT DISTINCT * WHERE {{ {} }}", pats.join(" . "));
        let r = engine(&nt, &q).unwrap();
        let mut again: Vec<Vec<Option<Term>>> = Vec::new();
        for row in &r.rows {
            if !again.contains(row) {
                again.push(row.clone());
            }
        }
        prop_assert_eq!(again, r.rows);
    }

    #[test]
    fn limit_is_a_prefix(nt in arb_store(30), pats in proptest::collection::vec(arb_pattern(), 1..=3), n in 0usize..6) {
        let base = format!("SELECT ?x ?y ?z WHERE {{ {} }} ORDER BY ?z ?x", pats.join(" . "));
        let all = engine(&nt, &base).unwrap();
        let limited = engine(&nt, &format!("{base} LIMIT {n}")).unwrap();
        prop_assert_eq!(&limited.rows[..], &all.rows[..n.min(all.len())]);
    }

    #[test]
    fn optional_never_removes_rows(nt in arb_store(30), p in arb_pattern(), o in arb_pattern()) {
        let without = engine(&nt, &format!("SELECT * WHERE {{ {p} }}")).unwrap();
        let with = engine(&nt, &format!("SELECT * WHERE {{ {p} OPTIONAL {{ {o} }} }}")).unwrap();
        prop_assert!(with.len() >= without.len());
    }

    #[test]
    fn filter_only_restricts(nt in arb_store(30), pats in proptest::collection::vec(arb_pattern(), 1..=3), f in arb_expr()) {
        let body = pats.join(" . ");
        let q = |filter: &str| format!("SELECT ?x ?y ?z WHERE {{ {body} {filter} }}");
        let all = canonical_rows(&engine(&nt, &q("")).unwrap());
        let mut kept = canonical_rows(&engine(&nt, &q(&format!("FILTER({f})"))).unwrap());
        // every filtered row is drawn from the unfiltered multiset
        let mut pool = all.clone();
        for row in kept.drain(..) {
            let at = pool.iter().position(|r| *r == row);
            prop_assert!(at.is_some());
            pool.remove(at.unwrap());
        }
    }
}
