use std::fmt;

use crate::catalog::{FacetKind, MetashareKey};

use super::IngestError;

/// Where a selected value goes in the record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Facet(FacetKind),
    Extra(MetashareKey),
    SeeAlso,
}

impl Target {
    pub fn parse(name: &str) -> Option<Target> {
        let name = name.trim();
        if name.eq_ignore_ascii_case("seeAlso") || name.eq_ignore_ascii_case("rdfs:seeAlso") {
            return Some(Target::SeeAlso);
        }
        if let Some(f) = FacetKind::from_name(name) {
            return Some(Target::Facet(f));
        }
        MetashareKey::from_name(name).map(Target::Extra)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Facet(k) => write!(f, "{}", k.label().replace(' ', "")),
            Target::Extra(k) => write!(f, "ms:{}", k.name()),
            Target::SeeAlso => f.write_str("seeAlso"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Transform {
    Trim,
    Lowercase,
    SplitOn(String),
}

impl Transform {
    fn parse(s: &str) -> Option<Transform> {
        let s = s.trim();
        match s {
            "trim" => return Some(Transform::Trim),
            "lowercase" => return Some(Transform::Lowercase),
            _ => {}
        }
        let arg = s.strip_prefix("splitOn(")?.strip_suffix(')')?;
        let arg = arg
            .strip_prefix('"')
            .and_then(|a| a.strip_suffix('"'))
            .unwrap_or(arg);
        (!arg.is_empty()).then(|| Transform::SplitOn(arg.to_string()))
    }

    pub fn apply(&self, values: Vec<String>) -> Vec<String> {
        match self {
            Transform::Trim => values.into_iter().map(|v| v.trim().to_string()).collect(),
            Transform::Lowercase => values.into_iter().map(|v| v.to_lowercase()).collect(),
            Transform::SplitOn(d) => values
                .iter()
                .flat_map(|v| v.split(d.as_str()))
                .map(|p| p.trim().to_string())
                .collect(),
        }
    }
}

/// One path step: an element name (optionally prefixed, or `*`) with an
/// optional 1-based position among the matching siblings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub name: String,
    pub index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Terminal {
    /// `text()`: the direct text children.
    Text,
    /// `@name`: an attribute value.
    Attribute(String),
    /// No terminal: the concatenated text of the whole element.
    StringValue,
}

/// A path relative to the record element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Selector {
    pub steps: Vec<Step>,
    pub terminal: Terminal,
}

fn is_name(s: &str) -> bool {
    if s == "*" {
        return true;
    }
    let mut parts = s.split(':');
    let ok = |p: &str| {
        let mut chars = p.chars();
        matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
            && chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
    };
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), None, _) => ok(a),
        (Some(a), Some(b), None) => ok(a) && ok(b),
        _ => false,
    }
}

impl Selector {
    pub fn parse(text: &str) -> Result<Selector, String> {
        let text = text.trim();
        if text.is_empty() {
            return Err("empty selector".into());
        }
        let parts: Vec<&str> = text.split('/').collect();
        let mut steps = Vec::new();
        let mut terminal = Terminal::StringValue;
        for (i, part) in parts.iter().enumerate() {
            let last = i + 1 == parts.len();
            if *part == "text()" || part.starts_with('@') {
                if !last {
                    return Err(format!("{part:?} must be the last step"));
                }
                terminal = if *part == "text()" {
                    Terminal::Text
                } else {
                    let name = &part[1..];
                    if !is_name(name) || name == "*" {
                        return Err(format!("bad attribute name {name:?}"));
                    }
                    Terminal::Attribute(name.to_string())
                };
                continue;
            }
            if *part == "." {
                continue;
            }
            let (name, index) = match part.find('[') {
                Some(open) => {
                    let inner = part[open + 1..]
                        .strip_suffix(']')
                        .ok_or_else(|| format!("unclosed predicate in {part:?}"))?;
                    let n: usize = inner
                        .parse()
                        .map_err(|_| format!("predicate {inner:?} is not a position"))?;
                    if n == 0 {
                        return Err("positions start at 1".into());
                    }
                    (&part[..open], Some(n))
                }
                None => (*part, None),
            };
            if !is_name(name) {
                return Err(format!("bad step {part:?}"));
            }
            steps.push(Step {
                name: name.to_string(),
                index,
            });
        }
        Ok(Selector { steps, terminal })
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| match s.index {
                Some(i) => format!("{}[{i}]", s.name),
                None => s.name.clone(),
            })
            .collect();
        match &self.terminal {
            Terminal::Text => parts.push("text()".into()),
            Terminal::Attribute(a) => parts.push(format!("@{a}")),
            Terminal::StringValue => {}
        }
        if parts.is_empty() {
            f.write_str(".")
        } else {
            f.write_str(&parts.join("/"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MappingRule {
    pub selector: Selector,
    pub target: Target,
    pub transforms: Vec<Transform>,
}

/// The rules for one source format, plus how records are delimited and keyed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MappingRuleSet {
    pub source_format_id: String,
    pub root_tags: Vec<String>,
    pub id_selector: Option<Selector>,
    pub base_selector: Option<Selector>,
    pub rules: Vec<MappingRule>,
}

impl MappingRuleSet {
    /// True when no rule fills the Title facet.
    pub fn is_incomplete(&self) -> bool {
        !self
            .rules
            .iter()
            .any(|r| r.target == Target::Facet(FacetKind::Title))
    }

    pub fn without_target(&self, target: Target) -> MappingRuleSet {
        let mut out = self.clone();
        out.rules.retain(|r| r.target != target);
        out
    }
}

/// Parses the line-oriented rule format:
///
/// ```text
/// @format metashare
/// @root resourceInfo
/// @id identificationInfo/identifier/text()
/// identificationInfo/resourceName/text() -> Title | trim
/// ```
pub fn load_ruleset(input: &[u8]) -> Result<MappingRuleSet, IngestError> {
    let text = std::str::from_utf8(input).map_err(|e| IngestError::RuleSyntax {
        line: 1 + input[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count(),
        reason: "rule file is not UTF-8".into(),
    })?;
    let mut set = MappingRuleSet::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |reason: String| IngestError::RuleSyntax { line, reason };
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if let Some(directive) = content.strip_prefix('@') {
            let (key, value) = directive
                .split_once(char::is_whitespace)
                .map(|(k, v)| (k, v.trim()))
                .unwrap_or((directive, ""));
            if value.is_empty() {
                return Err(err(format!("@{key} needs a value")));
            }
            match key {
                "format" => set.source_format_id = value.to_string(),
                "root" => {
                    if !is_name(value) {
                        return Err(err(format!("bad root tag {value:?}")));
                    }
                    set.root_tags.push(value.to_string())
                }
                "id" => set.id_selector = Some(Selector::parse(value).map_err(err)?),
                "base" => set.base_selector = Some(Selector::parse(value).map_err(err)?),
                other => return Err(err(format!("unknown directive @{other}"))),
            }
            continue;
        }
        let (selector, rest) = content
            .split_once("->")
            .ok_or_else(|| err("expected SELECTOR -> TARGET".into()))?;
        let selector = Selector::parse(selector).map_err(err)?;
        let mut pieces = rest.split('|');
        let target_name = pieces.next().unwrap_or("").trim();
        let target =
            Target::parse(target_name).ok_or_else(|| err(format!("unknown target {target_name:?}")))?;
        let mut transforms = Vec::new();
        for p in pieces {
            transforms.push(Transform::parse(p).ok_or_else(|| err(format!("unknown transform {:?}", p.trim())))?);
        }
        if set
            .rules
            .iter()
            .any(|r| r.selector == selector && r.target == target)
        {
            continue;
        }
        set.rules.push(MappingRule {
            selector,
            target,
            transforms,
        });
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rule() {
        let set = load_ruleset(b"resourceName/text() -> Title").unwrap();
        assert_eq!(set.rules.len(), 1);
        assert_eq!(set.rules[0].target, Target::Facet(FacetKind::Title));
        assert!(!set.is_incomplete());
    }

    #[test]
    fn bad_selector_reports_line() {
        let err = load_ruleset(b"# header\na/text() -> Title\n][ -> Title\n").unwrap_err();
        assert!(matches!(err, IngestError::RuleSyntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn duplicates_collapse() {
        let set = load_ruleset(b"a -> Title\na -> Title | trim\na -> Subject\n").unwrap();
        assert_eq!(set.rules.len(), 2);
    }

    #[test]
    fn selector_syntax() {
        let s = Selector::parse("dc:a[2]/b/@xml:lang").unwrap();
        assert_eq!(s.steps.len(), 2);
        assert_eq!(s.steps[0].index, Some(2));
        assert_eq!(s.terminal, Terminal::Attribute("xml:lang".into()));
        assert_eq!(s.to_string(), "dc:a[2]/b/@xml:lang");
        for bad in ["", "a/text()/b", "a[0]", "a[x]", "a[1", "1a", "a b", "@", "a:b:c"] {
            assert!(Selector::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn transforms_and_targets() {
        let set = load_ruleset(b"@root record\nlang -> Language | splitOn(;) | lowercase\nv -> ms:version\nu -> seeAlso\n").unwrap();
        assert_eq!(
            set.rules[0].transforms,
            vec![Transform::SplitOn(";".into()), Transform::Lowercase]
        );
        assert_eq!(set.rules[1].target, Target::Extra(MetashareKey::Version));
        assert_eq!(set.rules[2].target, Target::SeeAlso);
        assert!(set.is_incomplete());
        assert!(load_ruleset(b"a -> Colour").is_err());
        assert!(load_ruleset(b"a -> Title | reverse").is_err());
        assert!(load_ruleset(b"@bogus x").is_err());
    }

    #[test]
    fn split_transform() {
        let out = Transform::SplitOn(";".into()).apply(vec!["en; de;".into()]);
        assert_eq!(out, vec!["en", "de", ""]);
    }
}
