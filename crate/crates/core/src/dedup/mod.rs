//! Duplicate detection over exact normalized keys, cluster merging and
//! precision against judged samples.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::{CatalogRecord, LangString, SourceRepo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DedupError {
    #[error("{0:?} is not a URL")]
    InvalidUrl(String),
    #[error("pair {0} / {1} is not inside any cluster")]
    PairNotClustered(String, String),
    #[error("cluster member {0} has no record")]
    MissingRecord(String),
    #[error("line {line}: {reason}")]
    Sample { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatchStrategy {
    TitleOnly,
    UrlOnly,
    TitleAndUrl,
}

impl MatchStrategy {
    pub const ALL: [MatchStrategy; 3] = [
        MatchStrategy::TitleOnly,
        MatchStrategy::UrlOnly,
        MatchStrategy::TitleAndUrl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatchStrategy::TitleOnly => "title",
            MatchStrategy::UrlOnly => "url",
            MatchStrategy::TitleAndUrl => "both",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "title" | "titles" | "titleonly" => Some(MatchStrategy::TitleOnly),
            "url" | "urls" | "urlonly" => Some(MatchStrategy::UrlOnly),
            "both" | "titleandurl" => Some(MatchStrategy::TitleAndUrl),
            _ => None,
        }
    }
}

impl fmt::Display for MatchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which repositories a cluster spans. Inter clusters list every repo
/// involved, sorted, so a cluster touching three repos is still one cluster.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    IntraRepo(SourceRepo),
    InterRepo(Vec<SourceRepo>),
}

impl Scope {
    pub fn is_intra(&self) -> bool {
        matches!(self, Scope::IntraRepo(_))
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::IntraRepo(r) => write!(f, "intra:{}", r.slug()),
            Scope::InterRepo(rs) => {
                let slugs: Vec<String> = rs.iter().map(SourceRepo::slug).collect();
                write!(f, "inter:{}", slugs.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateCluster {
    /// Sorted, at least two.
    pub member_ids: Vec<String>,
    pub strategy: MatchStrategy,
    pub scope: Scope,
}

impl DuplicateCluster {
    /// Number of unordered member pairs.
    pub fn pair_count(&self) -> usize {
        let n = self.member_ids.len();
        n * (n - 1) / 2
    }

    pub fn contains_pair(&self, a: &str, b: &str) -> bool {
        a != b && self.contains(a) && self.contains(b)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.member_ids.binary_search_by(|m| m.as_str().cmp(id)).is_ok()
    }
}

/// Lowercases, turns every run of non-alphanumeric characters into one
/// space and trims. Parenthesized text survives as plain words.
pub fn normalize_title(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut gap = false;
    for c in raw.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            if gap && !out.is_empty() {
                out.push(' ');
            }
            gap = false;
            out.push(c);
        } else {
            gap = true;
        }
    }
    out
}

/// Removes `(...)` and `[...]` qualifiers, such as the language of a
/// per-language page.
pub fn strip_qualifiers(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut depth = 0usize;
    for c in raw.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' if depth > 0 => depth -= 1,
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

/// The key titles are matched on: the normalized title without qualifiers,
/// or the plain normalized title when nothing else is left.
pub fn title_key(raw: &str) -> String {
    let stripped = normalize_title(&strip_qualifiers(raw));
    if stripped.is_empty() {
        normalize_title(raw)
    } else {
        stripped
    }
}

/// Canonical form of an absolute URL: lowercase scheme and host, no default
/// port, no fragment, no trailing slashes on the path. The query is kept.
pub fn normalize_url(raw: &str) -> Result<String, DedupError> {
    let invalid = || DedupError::InvalidUrl(raw.to_string());
    let url = url::Url::parse(raw.trim()).map_err(|_| invalid())?;
    let mut out = format!("{}:", url.scheme());
    if let Some(host) = url.host_str() {
        out.push_str("//");
        if !url.username().is_empty() {
            out.push_str(url.username());
            if let Some(p) = url.password() {
                out.push(':');
                out.push_str(p);
            }
            out.push('@');
        }
        out.push_str(host);
        // the url crate already drops ports that equal the scheme default
        if let Some(port) = url.port() {
            out.push_str(&format!(":{port}"));
        }
    }
    out.push_str(url.path().trim_end_matches('/'));
    if let Some(q) = url.query() {
        out.push('?');
        out.push_str(q);
    }
    Ok(out)
}

fn record_keys(r: &CatalogRecord, strategy: MatchStrategy) -> BTreeSet<String> {
    let titles: BTreeSet<String> = r
        .title
        .iter()
        .map(|t| title_key(&t.value))
        .filter(|k| !k.is_empty())
        .collect();
    let urls: BTreeSet<String> = r
        .access_urls
        .iter()
        .filter_map(|u| normalize_url(u).ok())
        .filter(|k| !k.is_empty())
        .collect();
    match strategy {
        MatchStrategy::TitleOnly => titles,
        MatchStrategy::UrlOnly => urls,
        // sharing a combined key is the same as sharing a title and a URL
        MatchStrategy::TitleAndUrl => titles
            .iter()
            .flat_map(|t| urls.iter().map(move |u| format!("{t}\u{0}{u}")))
            .collect(),
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // the smaller index becomes the root so results do not depend on call order
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Clusters are the connected components of "shares a key". Output is
/// sorted by smallest member id.
pub fn find_duplicates(records: &[CatalogRecord], strategy: MatchStrategy) -> Vec<DuplicateCluster> {
    let keys: Vec<BTreeSet<String>> = records.par_iter().map(|r| record_keys(r, strategy)).collect();
    let mut uf = UnionFind::new(records.len());
    let mut first_with: HashMap<&str, usize> = HashMap::new();
    for (i, ks) in keys.iter().enumerate() {
        for k in ks {
            match first_with.get(k.as_str()) {
                Some(&j) => uf.union(i, j),
                None => {
                    first_with.insert(k, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        if !k.is_empty() {
            groups.entry(uf.find(i)).or_default().push(i);
        }
    }
    let mut clusters: Vec<DuplicateCluster> = groups
        .into_values()
        .filter(|g| g.len() >= 2)
        .map(|g| {
            let mut ids: Vec<String> = g.iter().map(|&i| records[i].id.clone()).collect();
            ids.sort();
            ids.dedup();
            let repos: BTreeSet<SourceRepo> = g.iter().map(|&i| records[i].source_repo.clone()).collect();
            let scope = if repos.len() == 1 {
                Scope::IntraRepo(repos.into_iter().next().expect("one repo"))
            } else {
                Scope::InterRepo(repos.into_iter().collect())
            };
            DuplicateCluster {
                member_ids: ids,
                strategy,
                scope,
            }
        })
        .filter(|c| c.member_ids.len() >= 2)
        .collect();
    clusters.sort_by(|a, b| a.member_ids[0].cmp(&b.member_ids[0]));
    clusters
}

fn push_new<T: PartialEq + Clone>(into: &mut Vec<T>, values: &[T]) {
    for v in values {
        if !into.contains(v) {
            into.push(v.clone());
        }
    }
}

fn longest_text(list: &[LangString]) -> usize {
    list.iter().map(|t| t.value.chars().count()).max().unwrap_or(0)
}

/// Takes the longest candidate; ties keep the earliest.
fn longest<'a, T, F: Fn(&T) -> usize>(candidates: impl Iterator<Item = &'a T>, len: F) -> Option<&'a T>
where
    T: 'a,
{
    let mut best: Option<&T> = None;
    for c in candidates {
        let l = len(c);
        if l > 0 && best.is_none_or(|b| l > len(b)) {
            best = Some(c);
        }
    }
    best
}

/// Merges records into one keyed by the smallest id. Members are visited in
/// id order, so unions keep the first-seen order of values.
pub fn merge_records(members: &[&CatalogRecord]) -> CatalogRecord {
    let mut members: Vec<&CatalogRecord> = members.to_vec();
    members.sort_by(|a, b| a.id.cmp(&b.id));
    let first = members[0];
    let mut out = CatalogRecord::new(first.id.clone(), first.source_repo.clone());
    if let Some(m) = longest(members.iter().copied(), |r| longest_text(&r.title)) {
        out.title = m.title.clone();
    }
    if let Some(m) = longest(members.iter().copied(), |r| longest_text(&r.description)) {
        out.description = m.description.clone();
    }
    out.resource_type = longest(members.iter().filter_map(|r| r.resource_type.as_ref()), |t| {
        t.label().chars().count()
    })
    .cloned();
    out.rights = longest(members.iter().filter_map(|r| r.rights.as_ref()), |r| r.raw.chars().count()).cloned();
    out.contact_point =
        longest(members.iter().filter_map(|r| r.contact_point.as_ref()), |c| c.chars().count()).cloned();
    for m in &members {
        push_new(&mut out.languages, &m.languages);
        push_new(&mut out.creators, &m.creators);
        push_new(&mut out.subjects, &m.subjects);
        push_new(&mut out.access_urls, &m.access_urls);
        push_new(&mut out.see_also, &m.see_also);
        for (k, v) in &m.metashare_extras {
            let keep = out
                .metashare_extras
                .get(k)
                .is_none_or(|cur| v.chars().count() > cur.chars().count());
            if keep && !v.is_empty() {
                out.metashare_extras.insert(*k, v.clone());
            }
        }
    }
    let others: Vec<String> = members[1..].iter().map(|m| m.id.clone()).collect();
    push_new(&mut out.see_also, &others);
    out
}

/// Looks the members up by id and merges them.
pub fn merge_cluster(cluster: &DuplicateCluster, records: &[CatalogRecord]) -> Result<CatalogRecord, DedupError> {
    let by_id: HashMap<&str, &CatalogRecord> = records.iter().map(|r| (r.id.as_str(), r)).collect();
    let members = cluster
        .member_ids
        .iter()
        .map(|id| by_id.get(id.as_str()).copied().ok_or_else(|| DedupError::MissingRecord(id.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(merge_records(&members))
}

/// Replaces each cluster by its merged record. Clusters must not overlap,
/// which holds for any single strategy's output.
pub fn apply_merges(records: Vec<CatalogRecord>, clusters: &[DuplicateCluster]) -> Result<Vec<CatalogRecord>, DedupError> {
    let mut merged = Vec::new();
    let mut absorbed: BTreeSet<&str> = BTreeSet::new();
    for c in clusters {
        merged.push(merge_cluster(c, &records)?);
        absorbed.extend(c.member_ids.iter().map(String::as_str));
    }
    let mut out: Vec<CatalogRecord> = records
        .iter()
        .filter(|r| !absorbed.contains(r.id.as_str()))
        .cloned()
        .collect();
    out.extend(merged);
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

/// One line per cluster: strategy, scope, space-separated member ids.
pub fn cluster_report(clusters: &[DuplicateCluster]) -> String {
    let mut out = String::new();
    for c in clusters {
        out.push_str(&format!("{}\t{}\t{}\n", c.strategy, c.scope, c.member_ids.join(" ")));
    }
    out
}

/// Three ways of counting the same clustering.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DuplicateCounts {
    pub clusters: usize,
    /// Records beyond the first in each cluster.
    pub extra_copies: usize,
    pub pairs: usize,
}

impl DuplicateCounts {
    fn add(&mut self, c: &DuplicateCluster) {
        self.clusters += 1;
        self.extra_copies += c.member_ids.len() - 1;
        self.pairs += c.pair_count();
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DuplicateSummary {
    pub intra: BTreeMap<SourceRepo, DuplicateCounts>,
    pub inter: DuplicateCounts,
}

pub fn summarize(clusters: &[DuplicateCluster]) -> DuplicateSummary {
    let mut s = DuplicateSummary::default();
    for c in clusters {
        match &c.scope {
            Scope::IntraRepo(r) => s.intra.entry(r.clone()).or_default().add(c),
            Scope::InterRepo(_) => s.inter.add(c),
        }
    }
    s
}

impl DuplicateSummary {
    pub fn to_text(&self) -> String {
        let mut out = String::from("scope\tclusters\textra_copies\tpairs\n");
        let row = |name: String, c: &DuplicateCounts| format!("{name}\t{}\t{}\t{}\n", c.clusters, c.extra_copies, c.pairs);
        for (repo, c) in &self.intra {
            out.push_str(&row(format!("intra:{}", repo.slug()), c));
        }
        out.push_str(&row("inter".into(), &self.inter));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Correct,
    Unclear,
    Incorrect,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::Unclear => "unclear",
            Verdict::Incorrect => "incorrect",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "correct" => Some(Verdict::Correct),
            "unclear" => Some(Verdict::Unclear),
            "incorrect" => Some(Verdict::Incorrect),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgedPair {
    pub a: String,
    pub b: String,
    pub verdict: Verdict,
}

/// Parses `idA <TAB> idB <TAB> verdict` lines; `#` starts a comment line.
pub fn parse_sample(text: &str) -> Result<Vec<JudgedPair>, DedupError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| DedupError::Sample {
            line: i + 1,
            reason: reason.to_string(),
        };
        let cols: Vec<&str> = line.split('\t').collect();
        let [a, b, v] = cols[..] else {
            return Err(err("expected three tab-separated columns"));
        };
        let verdict = Verdict::from_name(v).ok_or_else(|| err("unknown verdict"))?;
        out.push(JudgedPair {
            a: a.trim().to_string(),
            b: b.trim().to_string(),
            verdict,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionReport {
    pub correct: usize,
    pub unclear: usize,
    pub incorrect: usize,
    /// Correct over judged-definite pairs; None when nothing was definite.
    pub precision: Option<f64>,
}

impl PrecisionReport {
    pub fn from_counts(correct: usize, unclear: usize, incorrect: usize) -> Self {
        let definite = correct + incorrect;
        PrecisionReport {
            correct,
            unclear,
            incorrect,
            precision: (definite > 0).then(|| correct as f64 / definite as f64),
        }
    }
}

/// Counts verdicts of a sample whose pairs must all lie inside one cluster.
pub fn evaluate_precision(sample: &[JudgedPair], clusters: &[DuplicateCluster]) -> Result<PrecisionReport, DedupError> {
    let (mut c, mut u, mut i) = (0, 0, 0);
    for p in sample {
        if !clusters.iter().any(|cl| cl.contains_pair(&p.a, &p.b)) {
            return Err(DedupError::PairNotClustered(p.a.clone(), p.b.clone()));
        }
        match p.verdict {
            Verdict::Correct => c += 1,
            Verdict::Unclear => u += 1,
            Verdict::Incorrect => i += 1,
        }
    }
    Ok(PrecisionReport::from_counts(c, u, i))
}
