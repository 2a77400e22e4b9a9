use serde_json::Value;

use super::{decompress, Failure, IdMinter, IngestContext, IngestError, IngestReport, RecordBuilder, Target};
use crate::catalog::{CatalogRecord, FacetKind, MetashareKey};

fn strings(v: Option<&Value>) -> Vec<String> {
    match v {
        Some(Value::String(s)) => vec![s.clone()],
        Some(Value::Array(items)) => items
            .iter()
            .filter_map(|i| match i {
                Value::String(s) => Some(s.clone()),
                Value::Object(o) => o.get("name").and_then(Value::as_str).map(str::to_string),
                _ => None,
            })
            .collect(),
        Some(Value::Number(n)) => vec![n.to_string()],
        _ => Vec::new(),
    }
}

fn first_str<'a>(obj: &'a serde_json::Map<String, Value>, keys: &[&str]) -> Option<&'a str> {
    keys.iter()
        .filter_map(|k| obj.get(*k).and_then(Value::as_str))
        .map(str::trim)
        .find(|s| !s.is_empty())
}

/// Maps an array of DCAT-style dataset objects (CKAN package keys are
/// understood too). Objects without a title are failures.
pub fn ingest_dcat_json(
    input: &[u8],
    ctx: &IngestContext,
) -> Result<(Vec<CatalogRecord>, IngestReport), IngestError> {
    let input = decompress(input)?;
    let doc: Value = serde_json::from_slice(&input).map_err(|e| IngestError::Json {
        line: e.line(),
        column: e.column(),
        reason: e.to_string(),
    })?;
    let Value::Array(items) = doc else {
        return Err(IngestError::Json {
            line: 1,
            column: 1,
            reason: "expected an array of dataset objects".into(),
        });
    };
    let mut report = IngestReport::default();
    let mut records = Vec::new();
    let mut minter = IdMinter::default();
    for (i, item) in items.iter().enumerate() {
        report.records_read += 1;
        let location = format!("{}[{i}]", ctx.source_name);
        let Some(obj) = item.as_object() else {
            report.failures.push(Failure {
                location,
                reason: "not an object".into(),
            });
            continue;
        };
        let Some(title) = first_str(obj, &["title"]) else {
            report.failures.push(Failure {
                location,
                reason: "missing title".into(),
            });
            continue;
        };
        let source_id = first_str(obj, &["id", "name", "identifier"])
            .map(str::to_string)
            .unwrap_or_else(|| format!("{}#{}", ctx.source_name, i + 1));
        let mut b = RecordBuilder::new(minter.mint(ctx, &source_id), ctx.repo.clone(), None);
        let facet = Target::Facet;
        b.add(facet(FacetKind::Title), title, None);
        if let Some(d) = first_str(obj, &["description", "notes"]) {
            b.add(facet(FacetKind::Description), d, None);
        }
        if let Some(l) = first_str(obj, &["license_title", "license_id", "license"]) {
            b.add(facet(FacetKind::Rights), l, None);
        }
        if let Some(Value::Array(resources)) = obj.get("resources") {
            for r in resources {
                if let Some(url) = r.get("url").and_then(Value::as_str) {
                    b.add(facet(FacetKind::AccessUrl), url.trim(), None);
                }
            }
        }
        for key in ["tags", "keyword", "keywords"] {
            for t in strings(obj.get(key)) {
                b.add(facet(FacetKind::Subject), &t, None);
            }
        }
        for c in strings(obj.get("author")) {
            b.add(facet(FacetKind::Creator), &c, None);
        }
        if let Some(c) = first_str(obj, &["maintainer", "maintainer_email", "author_email", "contact_point"]) {
            b.add(facet(FacetKind::ContactPoint), c, None);
        }
        for l in strings(obj.get("language")) {
            b.add(facet(FacetKind::Language), &l, None);
        }
        if let Some(t) = first_str(obj, &["type", "resource_type"]) {
            b.add(facet(FacetKind::Type), t, None);
        }
        if let Some(v) = first_str(obj, &["version"]) {
            b.add(Target::Extra(MetashareKey::Version), v, None);
        }
        if let Some(u) = first_str(obj, &["url"]) {
            b.add(Target::SeeAlso, u, None);
        }
        report.repairs.append(&mut b.repairs);
        report.records_emitted += 1;
        records.push(b.record);
    }
    Ok((records, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::SourceRepo;

    fn ctx() -> IngestContext {
        IngestContext::new("http://lrhub.example", SourceRepo::DatahubIo, "datahub.json")
    }

    #[test]
    fn minimal_object() {
        let (recs, rep) =
            ingest_dcat_json(br#"[{"title":"t","resources":[{"url":"http://x/d.zip"}]}]"#, &ctx()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].access_urls, vec!["http://x/d.zip"]);
        assert_eq!(rep.records_emitted, 1);
    }

    #[test]
    fn empty_array() {
        let (recs, rep) = ingest_dcat_json(b"[]", &ctx()).unwrap();
        assert!(recs.is_empty());
        assert_eq!(rep.records_read, 0);
    }

    #[test]
    fn tags_and_missing_titles() {
        let (recs, rep) = ingest_dcat_json(
            br#"[{"title":"a","tags":["x",{"name":"y"}]},{"notes":"no title"},"junk"]"#,
            &ctx(),
        )
        .unwrap();
        assert_eq!(recs[0].subjects, vec!["x", "y"]);
        assert_eq!(rep.failures.len(), 2);
    }

    #[test]
    fn syntax_errors_abort() {
        assert!(matches!(
            ingest_dcat_json(b"[{\"title\":}]", &ctx()),
            Err(IngestError::Json { line: 1, .. })
        ));
        assert!(ingest_dcat_json(b"{}", &ctx()).is_err());
    }
}
