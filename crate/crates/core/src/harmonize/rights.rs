use std::collections::HashMap;
use std::sync::OnceLock;

use super::HarmonizeError;
use crate::catalog::RightsRef;

const EMBEDDED: &str = include_str!("data/licenses.tsv");

/// License IRIs with the names sources commonly use for them.
#[derive(Debug, Clone)]
pub struct LicenseRegistry {
    entries: Vec<(String, Vec<String>)>,
    by_name: HashMap<String, usize>,
}

impl LicenseRegistry {
    pub fn embedded() -> &'static LicenseRegistry {
        static REG: OnceLock<LicenseRegistry> = OnceLock::new();
        REG.get_or_init(|| LicenseRegistry::from_tsv(EMBEDDED).expect("embedded registry is valid"))
    }

    /// Parses `iri \t name;name;...` rows.
    pub fn from_tsv(text: &str) -> Result<Self, HarmonizeError> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let Some((iri, names)) = line.split_once('\t') else {
                return Err(HarmonizeError::Table {
                    line: n + 1,
                    reason: "expected an IRI and names".into(),
                });
            };
            let names = names
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            entries.push((iri.trim().to_string(), names));
        }
        Self::new(entries)
    }

    /// Builds a registry; on a name shared by two entries the first one wins.
    pub fn new(entries: Vec<(String, Vec<String>)>) -> Result<Self, HarmonizeError> {
        let mut by_name = HashMap::new();
        for (i, (iri, names)) in entries.iter().enumerate() {
            if !crate::rdf::is_valid_iri(iri) {
                return Err(HarmonizeError::Table {
                    line: i + 1,
                    reason: format!("{iri:?} is not an IRI"),
                });
            }
            for name in names {
                by_name.entry(name.to_lowercase()).or_insert(i);
            }
        }
        Ok(LicenseRegistry { entries, by_name })
    }

    pub fn entries(&self) -> &[(String, Vec<String>)] {
        &self.entries
    }

    pub fn iri_for_name(&self, name: &str) -> Option<&str> {
        self.by_name
            .get(&name.trim().to_lowercase())
            .map(|&i| self.entries[i].0.as_str())
    }

    pub fn contains_iri(&self, iri: &str) -> bool {
        self.entries.iter().any(|(i, _)| i == iri)
    }
}

/// Aligns a rights statement with a registered license; the raw text is always kept.
pub fn normalize_rights(raw: &str, registry: &LicenseRegistry) -> RightsRef {
    let trimmed = raw.trim();
    let license_iri = if registry.contains_iri(trimmed) {
        Some(trimmed.to_string())
    } else {
        registry.iri_for_name(trimmed).map(str::to_string)
    };
    RightsRef {
        raw: raw.to_string(),
        license_iri,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_examples() {
        let reg = LicenseRegistry::embedded();
        let gpl = normalize_rights("GPL", reg);
        assert_eq!(
            gpl.license_iri.as_deref(),
            Some("http://www.gnu.org/licenses/gpl.html")
        );
        assert_eq!(normalize_rights("gpl", reg).license_iri, gpl.license_iri);
        let unknown = normalize_rights("http://example.org/unknown-license", reg);
        assert_eq!(unknown.raw, "http://example.org/unknown-license");
        assert_eq!(unknown.license_iri, None);
        let empty = normalize_rights("", reg);
        assert_eq!((empty.raw.as_str(), empty.license_iri), ("", None));
        let by_iri = normalize_rights("http://opensource.org/licenses/MIT", reg);
        assert_eq!(
            by_iri.license_iri.as_deref(),
            Some("http://opensource.org/licenses/MIT")
        );
    }
}
