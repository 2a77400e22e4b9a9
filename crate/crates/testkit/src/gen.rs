//! Proptest strategies over small alphabets, so values collide often enough
//! for joins, filters and facet intersections to be exercised.

use lrhub_core::catalog::{CatalogRecord, LangString, LanguageRef, MetashareKey, ResourceType, RightsRef};
use lrhub_core::rdf::{Graph, Term, Triple};
use proptest::prelude::*;

use crate::dedup::REPOS;

prop_compose! {
    pub fn arb_record(key: usize)(
        repo in 0usize..REPOS.len(),
        title in proptest::option::of("(Spanish|Basque|Greek) (corpus|lexicon|tool)"),
        lang in proptest::option::of(("[a-z]{3}", proptest::bool::ANY)),
        desc in proptest::option::of(("(a|the) (small|large) (corpus|lexicon)", proptest::option::of("(en|es)"))),
        rtype in proptest::option::of(prop_oneof![Just("Corpus"), Just("Tool/Service"), Just("Lexicon")]),
        rights in proptest::option::of(prop_oneof![Just("GPL"), Just("CC-BY")]),
        creators in proptest::collection::vec(prop_oneof![Just("ELRA"), Just("ILSP"), Just("LDC")], 0..3),
        subjects in proptest::collection::vec("(speech|text|basque)", 0..3),
        url in proptest::option::of("http://x\\.org/(a|b|c)"),
        contact in proptest::option::of("(info|help)@x\\.org"),
        see_also in proptest::collection::btree_set("http://y\\.org/(p|q)", 0..2),
        extras in proptest::collection::btree_map(proptest::sample::select(MetashareKey::ALL.to_vec()), "(1\\.0|validated|research)", 0..3),
    ) -> CatalogRecord {
        let repo = REPOS[repo].clone();
        let mut r = CatalogRecord::new(format!("http://lrhub.example/resource/{}/r{key:03}", repo.slug()), repo);
        r.title.extend(title.map(LangString::plain));
        if let Some((l, resolved)) = lang {
            r.languages.push(if resolved {
                LanguageRef::resolved(l.clone(), l, 1.0)
            } else {
                LanguageRef::unresolved(l)
            });
        }
        r.description.extend(desc.map(|(d, lang)| LangString::new(d, lang.as_deref())));
        r.resource_type = rtype.map(ResourceType::from_label);
        r.rights = rights.map(RightsRef::raw);
        r.creators = creators.into_iter().map(str::to_string).collect();
        r.creators.dedup();
        r.subjects = subjects;
        r.subjects.dedup();
        r.access_urls.extend(url);
        r.contact_point = contact;
        r.see_also = see_also.into_iter().collect();
        r.metashare_extras = extras;
        r
    }
}

/// Up to `max` records with distinct ids.
pub fn arb_records(max: usize) -> impl Strategy<Value = Vec<CatalogRecord>> {
    (0..=max).prop_flat_map(|n| (0..n).map(arb_record).collect::<Vec<_>>())
}

const IRIS: [&str; 5] = [
    "http://ex.org/a",
    "http://ex.org/b#frag",
    "http://ex.org/caf\u{e9}",
    "urn:isbn:0451450523",
    "http://ex.org/path/with%20escape",
];
const PREDICATES: [&str; 5] = [
    "http://ex.org/vocab#p",
    "http://purl.org/dc/terms/title",
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type",
    "http://www.w3.org/ns/dcat#accessURL",
    "http://ex.org/vocab/q",
];

/// IRIs, blank nodes b0..b3 and literals with escapes, tags and datatypes.
pub fn arb_object() -> impl Strategy<Value = Term> {
    prop_oneof![
        arb_subject(),
        "[a-z \"\\\\\n\t\u{e9}\u{1F600}]{0,8}".prop_map(Term::literal),
        ("[a-z]{0,6}", prop_oneof![Just("en"), Just("es"), Just("en-GB")])
            .prop_map(|(v, l)| Term::lang_literal(v, l).expect("valid tag")),
        (
            "[0-9]{1,3}",
            prop_oneof![
                Just("http://www.w3.org/2001/XMLSchema#integer"),
                Just("http://www.w3.org/2001/XMLSchema#string"),
                Just("http://ex.org/dt")
            ]
        )
            .prop_map(|(v, d)| Term::typed_literal(v, d).expect("valid datatype")),
    ]
}

pub fn arb_subject() -> impl Strategy<Value = Term> {
    prop_oneof![
        3 => proptest::sample::select(IRIS.to_vec()).prop_map(|i| Term::iri(i).expect("valid IRI")),
        1 => (0..4u8).prop_map(|n| Term::blank(format!("b{n}")).expect("valid label")),
    ]
}

pub fn arb_triple() -> impl Strategy<Value = Triple> {
    (
        arb_subject(),
        proptest::sample::select(PREDICATES.to_vec()),
        arb_object(),
    )
        .prop_map(|(s, p, o)| Triple::new(s, Term::iri(p).expect("valid IRI"), o).expect("valid positions"))
}

pub fn arb_graph(max: usize) -> impl Strategy<Value = Graph> {
    proptest::collection::vec(arb_triple(), 0..=max).prop_map(|ts| ts.into_iter().collect())
}

/// The same graph with every blank label renamed through `f`.
pub fn relabel(g: &Graph, f: impl Fn(&str) -> String) -> Graph {
    let map = |t: &Term| match t {
        Term::Blank(b) => Term::blank(f(b)).expect("valid label"),
        other => other.clone(),
    };
    g.iter()
        .map(|t| Triple::new(map(t.subject()), t.predicate().clone(), map(t.object())).expect("valid positions"))
        .collect()
}
