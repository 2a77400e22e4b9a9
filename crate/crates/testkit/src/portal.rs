//! A seeded catalog for store and server tests, with facet counts tallied
//! by the generator itself.

use std::collections::{BTreeMap, BTreeSet};

use lrhub_core::catalog::{
    mint_id, CatalogRecord, FacetKind, LangString, LanguageRef, ResourceType, RightsRef, SourceRepo,
};
use lrhub_core::harmonize::Harmonizer;
use lrhub_core::ingest::{builtin_ruleset, ingest_xml, IngestContext};
use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dedup::REPOS;
use crate::read_fixture;

pub const BASE: &str = "http://lrhub.example";

/// The Apertium dictionary source record, ingested and harmonized.
pub fn apertium_record() -> CatalogRecord {
    let rules = builtin_ruleset("metashare").expect("builtin ruleset");
    let ctx = IngestContext::new(BASE, SourceRepo::MetaShare, "metashare_apertium.xml");
    let (mut recs, _) = ingest_xml(&read_fixture("sources/metashare_apertium.xml"), &rules, &ctx).expect("fixture ingests");
    let mut r = recs.remove(0);
    Harmonizer::default().harmonize(&mut r);
    r
}

pub struct PortalFixture {
    pub records: Vec<CatalogRecord>,
    /// Records per (facet, value), as the generator assigned them.
    pub counts: BTreeMap<(FacetKind, String), usize>,
    /// Records with at least one value, per facet.
    pub present: BTreeMap<FacetKind, usize>,
}

const WORDS: [&str; 12] = [
    "Basque", "Spoken", "Parallel", "Annotated", "Treebank", "Speech", "Web", "News", "Legal",
    "Learner", "Dialect", "Medical",
];
const KINDS: [&str; 5] = ["corpus", "lexicon", "wordnet", "tagger", "dictionary"];
const LANGS: [&str; 6] = ["eng", "deu", "fra", "Basque", "es", "Dutch"];
const CREATORS: [&str; 5] = ["ELRA", "ILSP", "Univ. of the Basque Country", "LDC", "INL"];
const RIGHTS: [&str; 3] = ["CC-BY", "GPL", "ODbL"];
const TYPES: [&str; 3] = ["Corpus", "Lexical Conceptual Resource", "Tool/Service"];

/// `n` records (n ≥ 8); the first is the Apertium dictionary record and exactly seven
/// others carry the raw language "spa".
pub fn portal_fixture(seed: u64, n: usize) -> PortalFixture {
    assert!(n >= 8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spanish: BTreeSet<usize> = (1..n).choose_multiple(&mut rng, 7).into_iter().collect();
    let mut records = vec![apertium_record()];
    for i in 1..n {
        let repo = REPOS.choose(&mut rng).unwrap().clone();
        let mut r = CatalogRecord::new(mint_id(BASE, &repo, &format!("gen-{i}")), repo);
        if rng.gen_bool(0.8) {
            let w = WORDS.choose(&mut rng).unwrap();
            let k = KINDS.choose(&mut rng).unwrap();
            r.title.push(LangString::new(format!("{w} {k} {i}"), Some("en")));
        }
        if rng.gen_bool(0.3) {
            r.description.push(LangString::plain(format!("A {} resource.", KINDS.choose(&mut rng).unwrap())));
        }
        let k = rng.gen_range(0..3);
        let mut langs: Vec<&str> = LANGS.choose_multiple(&mut rng, k).copied().collect();
        if spanish.contains(&i) {
            langs.push("spa");
        }
        r.languages = langs.into_iter().map(LanguageRef::unresolved).collect();
        if rng.gen_bool(0.5) {
            r.resource_type = Some(ResourceType::from_label(TYPES.choose(&mut rng).unwrap()));
        }
        if rng.gen_bool(0.3) {
            r.rights = Some(RightsRef::raw(*RIGHTS.choose(&mut rng).unwrap()));
        }
        let k = rng.gen_range(0..3);
        r.creators = CREATORS.choose_multiple(&mut rng, k).map(|c| c.to_string()).collect();
        let k = rng.gen_range(0..4);
        r.subjects = WORDS
            .choose_multiple(&mut rng, k)
            .map(|w| w.to_lowercase())
            .collect();
        if rng.gen_bool(0.05) {
            r.contact_point = Some(format!("contact{i}@example.org"));
        }
        if rng.gen_bool(0.4) {
            r.access_urls.push(format!("http://data.example.org/{i}.zip"));
        }
        records.push(r);
    }

    let mut counts = BTreeMap::new();
    let mut present = BTreeMap::new();
    let mut tally = |facet: FacetKind, values: Vec<String>| {
        let set: BTreeSet<String> = values.into_iter().collect();
        if !set.is_empty() {
            *present.entry(facet).or_insert(0) += 1;
        }
        for v in set {
            *counts.entry((facet, v)).or_insert(0) += 1;
        }
    };
    for r in &records {
        tally(FacetKind::Title, r.title.iter().map(|t| t.value.clone()).collect());
        tally(FacetKind::Description, r.description.iter().map(|t| t.value.clone()).collect());
        tally(FacetKind::Language, r.languages.iter().map(|l| l.raw.clone()).collect());
        tally(FacetKind::Type, r.resource_type.iter().map(|t| t.label().to_string()).collect());
        tally(FacetKind::Rights, r.rights.iter().map(|x| x.raw.clone()).collect());
        tally(FacetKind::Creator, r.creators.clone());
        tally(FacetKind::Subject, r.subjects.clone());
        tally(FacetKind::ContactPoint, r.contact_point.iter().cloned().collect());
        tally(FacetKind::AccessUrl, r.access_urls.clone());
    }
    PortalFixture {
        records,
        counts,
        present,
    }
}
