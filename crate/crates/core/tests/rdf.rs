use lrhub_core::rdf::{
    graph_isomorphic, parse_ntriples, parse_turtle, serialize, to_ntriples, Graph, RdfFormat, Term, Triple,
};
use lrhub_testkit::gen::{arb_graph, relabel};
use lrhub_testkit::oxrdf::reparse;
use proptest::prelude::*;

#[test]
fn escapes_survive_every_format() {
    let g: Graph = [Triple::new(
        Term::blank("b0").unwrap(),
        Term::iri("http://purl.org/dc/terms/title").unwrap(),
        Term::lang_literal("line\none \"quoted\" \\ caf\u{e9}", "es").unwrap(),
    )
    .unwrap()]
    .into_iter()
    .collect();
    for f in RdfFormat::ALL {
        let bytes = serialize(&g, f).unwrap();
        assert!(graph_isomorphic(&reparse(&bytes, f), &g), "{}", f.label());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn own_parsers_round_trip(g in arb_graph(12)) {
        let nt = to_ntriples(&g);
        prop_assert!(graph_isomorphic(&parse_ntriples(nt.as_bytes()).unwrap(), &g));
        let ttl = serialize(&g, RdfFormat::Turtle).unwrap();
        let back = parse_turtle(&ttl).unwrap();
        prop_assert!(graph_isomorphic(&back, &g), "{}", String::from_utf8_lossy(&ttl));
    }

    #[test]
    fn independent_parser_reads_every_format(g in arb_graph(12)) {
        for f in RdfFormat::ALL {
            let bytes = serialize(&g, f).unwrap();
            prop_assert!(graph_isomorphic(&reparse(&bytes, f), &g), "{}:\n{}", f.label(), String::from_utf8_lossy(&bytes));
        }
    }

    #[test]
    fn canonical_ntriples_ignores_insertion_order(g in arb_graph(12), seed in any::<u64>()) {
        let mut triples = g.clone().into_triples();
        let n = triples.len().max(1);
        triples.rotate_left((seed as usize) % n);
        triples.reverse();
        let shuffled: Graph = triples.into_iter().collect();
        prop_assert_eq!(to_ntriples(&g), to_ntriples(&g));
        prop_assert_eq!(to_ntriples(&shuffled), to_ntriples(&g));
    }

    #[test]
    fn parsers_are_total(bytes in proptest::collection::vec(any::<u8>(), 0..64), text in "[<>_:\"@^.#a-z \n\\\\]{0,40}") {
        for input in [&bytes[..], text.as_bytes()] {
            for r in [parse_ntriples(input), parse_turtle(input)] {
                if let Err(e) = r {
                    prop_assert!(e.line >= 1 && e.column >= 1);
                }
            }
        }
    }

    #[test]
    fn isomorphism_is_an_equivalence(g in arb_graph(10)) {
        let h = relabel(&g, |b| format!("x{b}"));
        let k = relabel(&h, |b| format!("y{b}"));
        prop_assert!(graph_isomorphic(&g, &g));
        prop_assert_eq!(graph_isomorphic(&g, &h), graph_isomorphic(&h, &g));
        prop_assert!(graph_isomorphic(&g, &h) && graph_isomorphic(&h, &k) && graph_isomorphic(&g, &k));
        if let Some(first) = g.iter().next().cloned() {
            let smaller: Graph = g.iter().filter(|t| **t != first).cloned().collect();
            prop_assert!(!graph_isomorphic(&g, &smaller));
        }
    }
}
