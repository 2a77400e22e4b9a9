use std::collections::BTreeSet;
use std::fmt;

use lrhub_core::catalog::CatalogRecord;
use lrhub_core::store::Store;

/// How many distinct ISO 639-3 codes a record was assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LanguageBucket {
    One,
    Two,
    Three,
    Four,
    FiveToNineteen,
    /// Twenty or more.
    TwentyPlus,
    Unspecified,
}

impl LanguageBucket {
    pub const ALL: [LanguageBucket; 7] = [
        LanguageBucket::One,
        LanguageBucket::Two,
        LanguageBucket::Three,
        LanguageBucket::Four,
        LanguageBucket::FiveToNineteen,
        LanguageBucket::TwentyPlus,
        LanguageBucket::Unspecified,
    ];

    pub fn of_count(n: usize) -> Self {
        match n {
            0 => LanguageBucket::Unspecified,
            1 => LanguageBucket::One,
            2 => LanguageBucket::Two,
            3 => LanguageBucket::Three,
            4 => LanguageBucket::Four,
            5..=19 => LanguageBucket::FiveToNineteen,
            _ => LanguageBucket::TwentyPlus,
        }
    }

    pub fn of_record(r: &CatalogRecord) -> Self {
        let codes: BTreeSet<&str> = r.languages.iter().filter_map(|l| l.iso639_3.as_deref()).collect();
        Self::of_count(codes.len())
    }

    pub fn label(self) -> &'static str {
        match self {
            LanguageBucket::One => "1",
            LanguageBucket::Two => "2",
            LanguageBucket::Three => "3",
            LanguageBucket::Four => "4",
            LanguageBucket::FiveToNineteen => "5-19",
            LanguageBucket::TwentyPlus => ">=20",
            LanguageBucket::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for LanguageBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Resource counts for every bucket, in [`LanguageBucket::ALL`] order.
pub fn language_histogram(store: &Store) -> Vec<(LanguageBucket, usize)> {
    histogram_of(store.records())
}

pub fn histogram_of(records: &[CatalogRecord]) -> Vec<(LanguageBucket, usize)> {
    let mut counts = [0usize; 7];
    for r in records {
        counts[LanguageBucket::of_record(r) as usize] += 1;
    }
    LanguageBucket::ALL.into_iter().zip(counts).collect()
}

pub fn format_histogram(rows: &[(LanguageBucket, usize)]) -> String {
    let mut out = String::from("languages\tresources\n");
    for (b, n) in rows {
        out.push_str(&format!("{b}\t{n}\n"));
    }
    out
}
