use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimilarityMetric {
    DiceBigram,
    LevenshteinNormalized,
}

impl SimilarityMetric {
    pub const ALL: [SimilarityMetric; 2] = [
        SimilarityMetric::DiceBigram,
        SimilarityMetric::LevenshteinNormalized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimilarityMetric::DiceBigram => "dice",
            SimilarityMetric::LevenshteinNormalized => "levenshtein",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "dice" | "dicebigram" => Some(SimilarityMetric::DiceBigram),
            "levenshtein" | "lev" | "levenshteinnormalized" => {
                Some(SimilarityMetric::LevenshteinNormalized)
            }
            _ => None,
        }
    }

    /// Scores two already case-folded strings.
    pub fn score(self, a: &str, b: &str) -> f64 {
        match self {
            SimilarityMetric::DiceBigram => dice_folded(a, b),
            SimilarityMetric::LevenshteinNormalized => levenshtein_folded(a, b),
        }
    }
}

/// Lowercases, optionally removing combining marks after canonical decomposition.
pub fn fold(s: &str, strip_diacritics: bool) -> String {
    if strip_diacritics {
        s.nfd()
            .filter(|c| !is_combining_mark(*c))
            .collect::<String>()
            .to_lowercase()
    } else {
        s.to_lowercase()
    }
}

/// Dice coefficient over character-bigram multisets, case-insensitive.
pub fn dice_bigram(a: &str, b: &str) -> f64 {
    dice_folded(&fold(a, false), &fold(b, false))
}

/// One minus the edit distance over the longer length, case-insensitive.
pub fn levenshtein_sim(a: &str, b: &str) -> f64 {
    levenshtein_folded(&fold(a, false), &fold(b, false))
}

fn bigrams(s: &str) -> HashMap<(char, char), usize> {
    let chars: Vec<char> = s.chars().collect();
    let mut m = HashMap::new();
    for w in chars.windows(2) {
        *m.entry((w[0], w[1])).or_insert(0) += 1;
    }
    m
}

fn dice_folded(a: &str, b: &str) -> f64 {
    if a.chars().count() < 2 && b.chars().count() < 2 && a == b {
        return 1.0;
    }
    let ba = bigrams(a);
    let bb = bigrams(b);
    let na: usize = ba.values().sum();
    let nb: usize = bb.values().sum();
    if na == 0 || nb == 0 {
        return 0.0;
    }
    let shared: usize = ba
        .iter()
        .map(|(g, &n)| n.min(bb.get(g).copied().unwrap_or(0)))
        .sum();
    2.0 * shared as f64 / (na + nb) as f64
}

pub(crate) fn edit_distance(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn levenshtein_folded(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - edit_distance(&a, &b) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn dice_examples() {
        assert!(close(dice_bigram("night", "nacht"), 0.25));
        assert!(close(dice_bigram("ab", "cd"), 0.0));
        assert!(close(dice_bigram("Spanish", "spanish"), 1.0));
        assert!(close(dice_bigram("a", "a"), 1.0));
        assert!(close(dice_bigram("", ""), 1.0));
        assert!(close(dice_bigram("a", "ab"), 0.0));
        // multiset: "aaa" has two "aa" bigrams, "aa" has one
        assert!(close(dice_bigram("aaa", "aa"), 2.0 / 3.0));
    }

    #[test]
    fn levenshtein_examples() {
        assert!(close(levenshtein_sim("kitten", "sitting"), 1.0 - 3.0 / 7.0));
        assert!(close(levenshtein_sim("a", ""), 0.0));
        assert!(close(levenshtein_sim("", ""), 1.0));
        assert!(close(levenshtein_sim("ÉS", "és"), 1.0));
    }

    #[test]
    fn diacritic_folding_is_optional() {
        assert_eq!(fold("Bokmål", false), "bokmål");
        assert_eq!(fold("Bokmål", true), "bokmal");
    }

    #[test]
    fn metric_names() {
        for m in SimilarityMetric::ALL {
            assert_eq!(SimilarityMetric::from_name(m.name()), Some(m));
        }
    }
}
