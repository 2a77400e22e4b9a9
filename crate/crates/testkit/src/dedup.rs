//! A seeded duplicate fixture with known ground truth.

use lrhub_core::catalog::{mint_id, CatalogRecord, LangString, SourceRepo};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const REPOS: [SourceRepo; 4] = [
    SourceRepo::MetaShare,
    SourceRepo::Clarin,
    SourceRepo::DatahubIo,
    SourceRepo::LreMap,
];

const WORDS: [&str; 16] = [
    "basque", "spoken", "parallel", "annotated", "lexical", "treebank", "speech", "web", "news",
    "medical", "legal", "historical", "learner", "sign", "dialect", "morphological",
];
const KINDS: [&str; 6] = ["corpus", "lexicon", "wordnet", "tagger", "dictionary", "parser"];

pub struct DedupFixture {
    pub records: Vec<CatalogRecord>,
    /// True duplicates, each pair sorted by id.
    pub intra: Vec<(String, String)>,
    pub inter: Vec<(String, String)>,
    /// Distinct resources that share only a title.
    pub title_noise: Vec<(String, String)>,
    /// Distinct resources that share only an access URL.
    pub url_noise: Vec<(String, String)>,
}

impl DedupFixture {
    pub fn is_true_duplicate(&self, a: &str, b: &str) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.intra
            .iter()
            .chain(&self.inter)
            .any(|(x, y)| (x.as_str(), y.as_str()) == key)
    }
}

struct Gen {
    rng: ChaCha8Rng,
    next: usize,
}

impl Gen {
    fn title(&mut self) -> String {
        let w = WORDS.choose(&mut self.rng).unwrap();
        let k = KINDS.choose(&mut self.rng).unwrap();
        self.next += 1;
        format!("{} {} {}", capitalize(w), k, self.next)
    }

    fn url(&mut self) -> String {
        self.next += 1;
        let host = ["ex.org", "data.example.net", "lr.example.com"].choose(&mut self.rng).unwrap();
        format!("http://{host}/res/{}/data.zip", self.next)
    }

    /// A differently written copy of a title that normalizes to the same key.
    fn restyle_title(&mut self, t: &str) -> String {
        match self.rng.gen_range(0..4) {
            0 => t.to_uppercase(),
            1 => format!("{}.", t.replace(' ', "  ")),
            2 => format!("{t} (English)"),
            _ => t.replace(' ', " - "),
        }
    }

    fn restyle_url(&mut self, u: &str) -> String {
        match self.rng.gen_range(0..3) {
            0 => format!("{u}/"),
            1 => u.replacen("http://", "HTTP://", 1),
            _ => format!("{u}#top"),
        }
    }

    fn record(&mut self, repo: &SourceRepo, title: String, url: String) -> CatalogRecord {
        self.next += 1;
        let id = mint_id("http://lrhub.example", repo, &format!("src-{}", self.next));
        let mut r = CatalogRecord::new(id, repo.clone());
        r.title.push(LangString::plain(title));
        r.access_urls.push(url);
        r
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

fn sorted(a: &CatalogRecord, b: &CatalogRecord) -> (String, String) {
    if a.id < b.id {
        (a.id.clone(), b.id.clone())
    } else {
        (b.id.clone(), a.id.clone())
    }
}

/// 200 records: 15 intra-repo and 10 inter-repo true duplicate pairs, 12
/// title-only and 4 URL-only noise pairs, the rest unique.
pub fn dedup_fixture(seed: u64) -> DedupFixture {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        next: 0,
    };
    let mut f = DedupFixture {
        records: Vec::new(),
        intra: Vec::new(),
        inter: Vec::new(),
        title_noise: Vec::new(),
        url_noise: Vec::new(),
    };
    let pair = |g: &mut Gen, f: &mut DedupFixture, same_repo: bool, share_title: bool, share_url: bool| {
        let ra = REPOS.choose(&mut g.rng).unwrap().clone();
        let rb = if same_repo {
            ra.clone()
        } else {
            REPOS.iter().filter(|r| **r != ra).collect::<Vec<_>>().choose(&mut g.rng).unwrap().to_owned().clone()
        };
        let (t, u) = (g.title(), g.url());
        let tb = if share_title { g.restyle_title(&t) } else { g.title() };
        let ub = if share_url { g.restyle_url(&u) } else { g.url() };
        let a = g.record(&ra, t, u);
        let b = g.record(&rb, tb, ub);
        let p = sorted(&a, &b);
        f.records.push(a);
        f.records.push(b);
        p
    };
    for _ in 0..15 {
        let p = pair(&mut g, &mut f, true, true, true);
        f.intra.push(p);
    }
    for _ in 0..10 {
        let p = pair(&mut g, &mut f, false, true, true);
        f.inter.push(p);
    }
    for _ in 0..12 {
        let same = g.rng.gen_bool(0.5);
        let p = pair(&mut g, &mut f, same, true, false);
        f.title_noise.push(p);
    }
    for _ in 0..4 {
        let same = g.rng.gen_bool(0.5);
        let p = pair(&mut g, &mut f, same, false, true);
        f.url_noise.push(p);
    }
    while f.records.len() < 200 {
        let repo = REPOS.choose(&mut g.rng).unwrap().clone();
        let (t, u) = (g.title(), g.url());
        let r = g.record(&repo, t, u);
        f.records.push(r);
    }
    f.records.shuffle(&mut g.rng);
    f
}
