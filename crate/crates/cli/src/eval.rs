//! The relevance evaluation harness.
//!
//! A query set file has three kinds of sections, each opened by a header
//! line:
//!
//! ```text
//! QUERY 1                  free-text query; the following lines are the text
//! spanish dictionary
//! SPARQL 1                 SPARQL query for the same id
//! SELECT ?r WHERE { ?r dct:language "spa" }
//! QUERY 6 EXCLUDED         kept in the report but left out of the averages
//! JUDGMENTS
//! 1<TAB>http://h/resource/metashare/ab12<TAB>relevant
//! ```
//!
//! Lines starting with `#` are comments. A returned record that was not
//! judged counts as irrelevant.
//!
//! Averages are reported twice: over the queries that ran, and over every
//! listed query with the excluded and failed ones contributing zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use anyhow::{anyhow, bail, Context, Result};
use lrhub_core::rdf::Term;
use lrhub_core::sparql::{evaluate, parse_query};
use lrhub_core::store::{SearchQuery, Store};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Judgment {
    Relevant,
    Related,
    Irrelevant,
}

impl Judgment {
    pub fn from_name(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "relevant" => Some(Judgment::Relevant),
            "related" => Some(Judgment::Related),
            "irrelevant" => Some(Judgment::Irrelevant),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EvalQuery {
    pub id: String,
    pub free_text: Option<String>,
    pub sparql: Option<String>,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EvalQuerySet {
    pub queries: Vec<EvalQuery>,
    /// (query id, record id) to judgment.
    pub judgments: BTreeMap<(String, String), Judgment>,
}

enum Section {
    None,
    Text(usize),
    Sparql(usize),
    Judgments,
}

impl EvalQuerySet {
    pub fn parse(text: &str) -> Result<Self> {
        let mut set = EvalQuerySet::default();
        let mut bodies: Vec<(Vec<String>, Vec<String>)> = Vec::new();
        let mut section = Section::None;
        let slot = |set: &mut EvalQuerySet, bodies: &mut Vec<(Vec<String>, Vec<String>)>, id: &str| {
            match set.queries.iter().position(|q| q.id == id) {
                Some(i) => i,
                None => {
                    set.queries.push(EvalQuery {
                        id: id.to_string(),
                        ..EvalQuery::default()
                    });
                    bodies.push((Vec::new(), Vec::new()));
                    set.queries.len() - 1
                }
            }
        };
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if line.starts_with('#') {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.first().copied() {
                Some("QUERY") | Some("SPARQL") => {
                    let (id, flag) = match words[1..] {
                        [id] => (id, None),
                        [id, flag] => (id, Some(flag)),
                        _ => bail!("line {n}: expected `{} <id> [EXCLUDED]`", words[0]),
                    };
                    let q = slot(&mut set, &mut bodies, id);
                    match flag {
                        None => {}
                        Some("EXCLUDED") => set.queries[q].excluded = true,
                        Some(other) => bail!("line {n}: unknown flag {other:?}"),
                    }
                    section = if words[0] == "QUERY" { Section::Text(q) } else { Section::Sparql(q) };
                }
                Some("JUDGMENTS") if words.len() == 1 => section = Section::Judgments,
                _ => match section {
                    Section::Text(q) => bodies[q].0.push(line.to_string()),
                    Section::Sparql(q) => bodies[q].1.push(line.to_string()),
                    Section::Judgments if line.trim().is_empty() => {}
                    Section::Judgments => {
                        let cols: Vec<&str> = line.split('\t').collect();
                        let [q, record, verdict] = cols[..] else {
                            bail!("line {n}: judgment rows are <query>\\t<record>\\t<judgment>");
                        };
                        let j = Judgment::from_name(verdict).ok_or_else(|| anyhow!("line {n}: unknown judgment {verdict:?}"))?;
                        set.judgments.insert((q.trim().to_string(), record.trim().to_string()), j);
                    }
                    Section::None if line.trim().is_empty() => {}
                    Section::None => bail!("line {n}: text before the first section"),
                },
            }
        }
        for (q, (text, sparql)) in set.queries.iter_mut().zip(bodies) {
            let text = text.join(" ").split_whitespace().collect::<Vec<_>>().join(" ");
            let sparql = sparql.join("\n").trim().to_string();
            q.free_text = (!text.is_empty()).then_some(text);
            q.sparql = (!sparql.is_empty()).then_some(sparql);
            if q.free_text.is_none() && q.sparql.is_none() {
                bail!("query {} has neither free text nor SPARQL", q.id);
            }
        }
        for (q, _) in set.judgments.keys() {
            if !set.queries.iter().any(|x| &x.id == q) {
                bail!("judgment for unknown query {q}");
            }
        }
        Ok(set)
    }

    /// Fails when a judged record is not in the store.
    pub fn check_against(&self, store: &Store) -> Result<()> {
        let missing: BTreeSet<&str> = self
            .judgments
            .keys()
            .map(|(_, r)| r.as_str())
            .filter(|r| store.record(r).is_none())
            .collect();
        if !missing.is_empty() {
            let list: Vec<&str> = missing.into_iter().collect();
            bail!("judged records missing from the store: {}", list.join(", "));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    FreeText,
    Sparql,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::FreeText => "free-text",
            Mode::Sparql => "sparql",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "free-text" | "freetext" | "text" => Some(Mode::FreeText),
            "sparql" => Some(Mode::Sparql),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ran,
    Excluded,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub query_id: String,
    pub mode: Mode,
    pub results: usize,
    /// Relevant among returned, in percent; 0 when nothing was returned.
    pub relevant_pct: f64,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeAverage {
    pub mode: Mode,
    /// Queries that ran and are averaged.
    pub queries: usize,
    pub avg_results: f64,
    pub avg_relevant_pct: f64,
    /// Every listed query, including excluded and failed ones.
    pub listed: usize,
    /// Means over all listed queries, with the ones that did not run counted as zero.
    pub avg_results_listed: f64,
    pub avg_relevant_pct_listed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub averages: Vec<ModeAverage>,
}

fn averages_of(rows: &[EvalRow]) -> Vec<ModeAverage> {
    let modes: BTreeSet<Mode> = rows.iter().map(|r| r.mode).collect();
    modes
        .into_iter()
        .map(|mode| {
            let listed = rows.iter().filter(|r| r.mode == mode).count();
            let ran: Vec<&EvalRow> = rows.iter().filter(|r| r.mode == mode && r.status == RowStatus::Ran).collect();
            let sum = |f: &dyn Fn(&EvalRow) -> f64| ran.iter().map(|r| f(r)).sum::<f64>();
            let mean = |total: f64, n: usize| if n == 0 { 0.0 } else { total / n as f64 };
            let (results, relevant) = (sum(&|r| r.results as f64), sum(&|r| r.relevant_pct));
            ModeAverage {
                mode,
                queries: ran.len(),
                avg_results: mean(results, ran.len()),
                avg_relevant_pct: mean(relevant, ran.len()),
                listed,
                avg_results_listed: mean(results, listed),
                avg_relevant_pct_listed: mean(relevant, listed),
            }
        })
        .collect()
}

impl EvalReport {
    /// Builds the report from per-query rows, e.g. precomputed ones.
    pub fn from_rows(rows: Vec<EvalRow>) -> Self {
        let averages = averages_of(&rows);
        EvalReport { rows, averages }
    }

    pub fn average(&self, mode: Mode) -> Option<&ModeAverage> {
        self.averages.iter().find(|a| a.mode == mode)
    }

    /// Whether the averages recompute from the rows.
    pub fn is_consistent(&self) -> bool {
        let again = averages_of(&self.rows);
        again.len() == self.averages.len()
            && again.iter().zip(&self.averages).all(|(a, b)| {
                a.mode == b.mode
                    && a.queries == b.queries
                    && (a.avg_results - b.avg_results).abs() < 1e-9
                    && a.listed == b.listed
                    && (a.avg_relevant_pct - b.avg_relevant_pct).abs() < 1e-9
                    && (a.avg_results_listed - b.avg_results_listed).abs() < 1e-9
                    && (a.avg_relevant_pct_listed - b.avg_relevant_pct_listed).abs() < 1e-9
            })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("query\tmode\tresults\trelevant\tstatus\n");
        for r in &self.rows {
            let status = match &r.status {
                RowStatus::Ran => "ok".to_string(),
                RowStatus::Excluded => "excluded".to_string(),
                RowStatus::Failed(e) => format!("failed: {e}"),
            };
            out.push_str(&format!("{}\t{}\t{}\t{:.2}%\t{status}\n", r.query_id, r.mode, r.results, r.relevant_pct));
        }
        for a in &self.averages {
            out.push_str(&format!(
                "average\t{}\t{:.2}\t{:.2}%\t{} queries\n",
                a.mode, a.avg_results, a.avg_relevant_pct, a.queries
            ));
            out.push_str(&format!(
                "average over listed\t{}\t{:.2}\t{:.2}%\t{} queries\n",
                a.mode, a.avg_results_listed, a.avg_relevant_pct_listed, a.listed
            ));
        }
        let check = if self.is_consistent() { "ok" } else { "MISMATCH" };
        out.push_str(&format!("# averages recomputed from rows: {check}\n"));
        out
    }
}

/// Reads precomputed rows: `query <TAB> mode <TAB> results <TAB> relevant%
/// [<TAB> excluded]`. A line starting with `query<TAB>` is a header.
pub fn parse_rows(text: &str) -> Result<Vec<EvalRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.trim().is_empty() || line.starts_with('#') || line.starts_with("query\t") {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let (id, mode, results, pct, flag) = match cols[..] {
            [a, b, c, d] => (a, b, c, d, None),
            [a, b, c, d, e] => (a, b, c, d, Some(e)),
            _ => bail!("line {n}: expected 4 or 5 tab-separated columns"),
        };
        let mode = Mode::from_name(mode).ok_or_else(|| anyhow!("line {n}: unknown mode {mode:?}"))?;
        let results: usize = results.parse().with_context(|| format!("line {n}: results {results:?}"))?;
        let relevant_pct: f64 = pct
            .trim_end_matches('%')
            .parse()
            .with_context(|| format!("line {n}: relevant {pct:?}"))?;
        let status = match flag {
            None | Some("") => RowStatus::Ran,
            Some("excluded") => RowStatus::Excluded,
            Some(other) => bail!("line {n}: unknown flag {other:?}"),
        };
        rows.push(EvalRow {
            query_id: id.to_string(),
            mode,
            results,
            relevant_pct,
            status,
        });
    }
    Ok(rows)
}

fn score(set: &EvalQuerySet, query: &str, returned: &[String]) -> f64 {
    if returned.is_empty() {
        return 0.0;
    }
    let relevant = returned
        .iter()
        .filter(|r| set.judgments.get(&(query.to_string(), r.to_string())) == Some(&Judgment::Relevant))
        .count();
    100.0 * relevant as f64 / returned.len() as f64
}

/// Records a query returns in the given mode. For SPARQL these are the
/// distinct record IRIs bound anywhere in the solutions, in order of first
/// appearance.
pub fn returned_records(store: &Store, mode: Mode, text: &str) -> Result<Vec<String>> {
    match mode {
        Mode::FreeText => {
            let q = SearchQuery {
                text: Some(text.to_string()),
                page_size: store.records().len().max(1),
                facet_limit: 0,
                ..SearchQuery::default()
            };
            Ok(store.facet_search(&q).hits.into_iter().map(|h| h.id).collect())
        }
        Mode::Sparql => {
            let solutions = evaluate(&parse_query(text)?, store)?;
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for row in &solutions.rows {
                for cell in row.iter().flatten() {
                    if let Term::Iri(iri) = cell {
                        if store.record(iri).is_some() && seen.insert(iri.clone()) {
                            out.push(iri.clone());
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Runs every query in each of its modes. Failures become flagged rows.
pub fn run_eval(set: &EvalQuerySet, store: &Store) -> Result<EvalReport> {
    set.check_against(store)?;
    let mut rows = Vec::new();
    for q in &set.queries {
        let modes = [(Mode::FreeText, &q.free_text), (Mode::Sparql, &q.sparql)];
        for (mode, text) in modes {
            let Some(text) = text else { continue };
            let row = |results, relevant_pct, status| EvalRow {
                query_id: q.id.clone(),
                mode,
                results,
                relevant_pct,
                status,
            };
            rows.push(match returned_records(store, mode, text) {
                Ok(returned) => {
                    let status = if q.excluded { RowStatus::Excluded } else { RowStatus::Ran };
                    row(returned.len(), score(set, &q.id, &returned), status)
                }
                Err(e) => row(0, 0.0, RowStatus::Failed(format!("{e:#}"))),
            });
        }
    }
    Ok(EvalReport::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let text = "# set\nQUERY a\nspanish\n  dictionary\nSPARQL a\nSELECT ?r\nWHERE { ?r ?p ?o }\nSPARQL b EXCLUDED\nSELECT ?r WHERE { ?r ?p ?o }\nJUDGMENTS\na\thttp://x/1\trelevant\nb\thttp://x/2\tRelated\n";
        let set = EvalQuerySet::parse(text).unwrap();
        assert_eq!(set.queries.len(), 2);
        assert_eq!(set.queries[0].free_text.as_deref(), Some("spanish dictionary"));
        assert_eq!(set.queries[0].sparql.as_deref(), Some("SELECT ?r\nWHERE { ?r ?p ?o }"));
        assert!(set.queries[1].excluded && set.queries[1].free_text.is_none());
        assert_eq!(set.judgments[&("b".into(), "http://x/2".into())], Judgment::Related);
    }

    #[test]
    fn rejects_malformed_sets() {
        for text in ["QUERY a\n", "stray\n", "QUERY a\nx\nJUDGMENTS\na\tb\n", "QUERY a\nx\nJUDGMENTS\nz\tr\trelevant\n", "QUERY a b c\n"] {
            assert!(EvalQuerySet::parse(text).is_err(), "{text:?}");
        }
    }

    #[test]
    fn failures_and_exclusions_are_not_averaged() {
        let row = |id: &str, pct: f64, status| EvalRow {
            query_id: id.into(),
            mode: Mode::Sparql,
            results: 2,
            relevant_pct: pct,
            status,
        };
        let r = EvalReport::from_rows(vec![
            row("1", 50.0, RowStatus::Ran),
            row("2", 100.0, RowStatus::Excluded),
            row("3", 0.0, RowStatus::Failed("x".into())),
            row("4", 0.0, RowStatus::Ran),
        ]);
        let a = r.average(Mode::Sparql).unwrap();
        assert_eq!((a.queries, a.avg_relevant_pct, a.avg_results), (2, 25.0, 2.0));
        assert_eq!((a.listed, a.avg_relevant_pct_listed, a.avg_results_listed), (4, 12.5, 1.0));
        assert!(r.is_consistent());
        assert!(r.to_text().ends_with("# averages recomputed from rows: ok\n"));
    }
}
