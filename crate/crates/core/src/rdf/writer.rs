use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use super::prefixes::{PrefixMap, RDF, RDF_TYPE};
use super::term::{write_escaped_string, write_iri};
use super::{Graph, Term};

/// The RDF serializations the portal serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RdfFormat {
    NTriples,
    Turtle,
    RdfXml,
    JsonLd,
}

impl RdfFormat {
    pub const ALL: [RdfFormat; 4] = [
        RdfFormat::NTriples,
        RdfFormat::Turtle,
        RdfFormat::RdfXml,
        RdfFormat::JsonLd,
    ];

    pub fn media_type(self) -> &'static str {
        match self {
            RdfFormat::NTriples => "application/n-triples",
            RdfFormat::Turtle => "text/turtle",
            RdfFormat::RdfXml => "application/rdf+xml",
            RdfFormat::JsonLd => "application/ld+json",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            RdfFormat::NTriples => "nt",
            RdfFormat::Turtle => "ttl",
            RdfFormat::RdfXml => "rdf",
            RdfFormat::JsonLd => "jsonld",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RdfFormat::NTriples => "N-Triples",
            RdfFormat::Turtle => "Turtle",
            RdfFormat::RdfXml => "RDF/XML",
            RdfFormat::JsonLd => "JSON-LD",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "nt" | "ntriples" | "n-triples" => Some(RdfFormat::NTriples),
            "ttl" | "turtle" => Some(RdfFormat::Turtle),
            "rdf" | "xml" | "rdfxml" | "rdf/xml" => Some(RdfFormat::RdfXml),
            "jsonld" | "json-ld" => Some(RdfFormat::JsonLd),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerializeError {
    #[error("graph cannot be written as RDF/XML: {0}")]
    UnsupportedGraph(String),
}

/// Serializes with the standard prefix bindings.
pub fn serialize(graph: &Graph, format: RdfFormat) -> Result<Vec<u8>, SerializeError> {
    serialize_with_prefixes(graph, format, &PrefixMap::standard())
}

pub fn serialize_with_prefixes(
    graph: &Graph,
    format: RdfFormat,
    prefixes: &PrefixMap,
) -> Result<Vec<u8>, SerializeError> {
    let text = match format {
        RdfFormat::NTriples => to_ntriples(graph),
        RdfFormat::Turtle => to_turtle(graph, prefixes),
        RdfFormat::RdfXml => to_rdfxml(graph, prefixes)?,
        RdfFormat::JsonLd => to_jsonld(graph),
    };
    Ok(text.into_bytes())
}

/// Canonical N-Triples: one triple per line, sorted by the rendered subject,
/// predicate and object.
pub fn to_ntriples(graph: &Graph) -> String {
    let mut out = String::new();
    for t in graph.sorted_triples() {
        let _ = writeln!(out, "{t}");
    }
    out
}

/// Objects per predicate, for one subject.
type PredicateGroups<'a> = Vec<(&'a Term, Vec<&'a Term>)>;

/// Triples grouped by subject, then predicate, in canonical order.
fn grouped(graph: &Graph) -> Vec<(&Term, PredicateGroups<'_>)> {
    let mut groups: Vec<(&Term, PredicateGroups<'_>)> = Vec::new();
    for t in graph.sorted_triples() {
        match groups.last_mut() {
            Some((s, preds)) if *s == t.subject() => match preds.last_mut() {
                Some((p, objs)) if *p == t.predicate() => objs.push(t.object()),
                _ => preds.push((t.predicate(), vec![t.object()])),
            },
            _ => groups.push((t.subject(), vec![(t.predicate(), vec![t.object()])])),
        }
    }
    groups
}

fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn turtle_iri(iri: &str, prefixes: &PrefixMap, used: &mut Vec<String>) -> String {
    if let Some((prefix, local)) = prefixes.split(iri) {
        if is_safe_local(local) {
            if !used.iter().any(|u| u == prefix) {
                used.push(prefix.to_string());
            }
            return format!("{prefix}:{local}");
        }
    }
    let mut s = String::new();
    let _ = write_iri(&mut s, iri);
    s
}

fn turtle_term(term: &Term, prefixes: &PrefixMap, used: &mut Vec<String>) -> String {
    match term {
        Term::Iri(iri) => turtle_iri(iri, prefixes, used),
        Term::Blank(b) => format!("_:{b}"),
        Term::Literal(l) => {
            let mut s = String::from("\"");
            let _ = write_escaped_string(&mut s, l.lexical());
            s.push('"');
            if let Some(lang) = l.lang() {
                s.push('@');
                s.push_str(lang);
            } else if let Some(dt) = l.datatype() {
                s.push_str("^^");
                s.push_str(&turtle_iri(dt, prefixes, used));
            }
            s
        }
    }
}

pub fn to_turtle(graph: &Graph, prefixes: &PrefixMap) -> String {
    let mut used = Vec::new();
    let mut body = String::new();
    for (subject, mut preds) in grouped(graph) {
        preds.sort_by_key(|(p, _)| p.value() != RDF_TYPE);
        body.push_str(&turtle_term(subject, prefixes, &mut used));
        for (i, (pred, objs)) in preds.iter().enumerate() {
            body.push_str(if i == 0 { " " } else { " ;\n    " });
            if pred.value() == RDF_TYPE {
                body.push('a');
            } else {
                body.push_str(&turtle_term(pred, prefixes, &mut used));
            }
            for (j, o) in objs.iter().enumerate() {
                body.push_str(if j == 0 { " " } else { ", " });
                body.push_str(&turtle_term(o, prefixes, &mut used));
            }
        }
        body.push_str(" .\n");
    }
    let mut out = String::new();
    for (prefix, ns) in prefixes.iter() {
        if used.iter().any(|u| u == prefix) {
            let _ = write!(out, "@prefix {prefix}: ");
            let _ = write_iri(&mut out, ns);
            out.push_str(" .\n");
        }
    }
    if !out.is_empty() && !body.is_empty() {
        out.push('\n');
    }
    out + &body
}

/// Splits an IRI into namespace and an XML NCName local part.
pub fn split_qname(iri: &str) -> Option<(&str, &str)> {
    let is_name_char = |c: char| c.is_alphanumeric() || matches!(c, '_' | '-' | '.');
    let mut start = iri.len();
    for (i, c) in iri.char_indices().rev() {
        if is_name_char(c) {
            start = i;
        } else {
            break;
        }
    }
    let local = &iri[start..];
    let skip = local
        .char_indices()
        .find(|(_, c)| c.is_alphabetic() || *c == '_')
        .map(|(i, _)| i)?;
    let split = start + skip;
    (split > 0 && split < iri.len()).then(|| (&iri[..split], &iri[split..]))
}

fn xml_escape(s: &str, attr: bool) -> Result<String, SerializeError> {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attr => out.push_str("&quot;"),
            '\r' => out.push_str("&#13;"),
            '\n' if attr => out.push_str("&#10;"),
            '\t' if attr => out.push_str("&#9;"),
            '\n' | '\t' => out.push(c),
            c if (c as u32) < 0x20 || matches!(c as u32, 0xFFFE | 0xFFFF) => {
                return Err(SerializeError::UnsupportedGraph(format!(
                    "character U+{:04X} cannot be represented in XML",
                    c as u32
                )))
            }
            c => out.push(c),
        }
    }
    Ok(out)
}

pub fn to_rdfxml(graph: &Graph, prefixes: &PrefixMap) -> Result<String, SerializeError> {
    let groups = grouped(graph);

    // namespace declarations for every predicate
    let mut ns_prefix: BTreeMap<String, String> = BTreeMap::new();
    ns_prefix.insert(RDF.to_string(), "rdf".to_string());
    let mut generated = 0;
    for t in graph.iter() {
        let iri = t.predicate_iri();
        let (ns, _) = split_qname(iri).ok_or_else(|| {
            SerializeError::UnsupportedGraph(format!(
                "predicate <{iri}> has no namespace/local-name split"
            ))
        })?;
        if !ns_prefix.contains_key(ns) {
            let prefix = match prefixes.prefix_for(ns) {
                Some(p) if p != "rdf" && !ns_prefix.values().any(|v| v == p) => p.to_string(),
                _ => {
                    generated += 1;
                    format!("ns{generated}")
                }
            };
            ns_prefix.insert(ns.to_string(), prefix);
        }
    }

    let mut blank_ids: HashMap<&str, String> = HashMap::new();
    for b in graph.blank_nodes() {
        let id = format!("b{}", blank_ids.len());
        blank_ids.insert(b, id);
    }

    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<rdf:RDF");
    let mut decls: Vec<(&String, &String)> = ns_prefix.iter().collect();
    decls.sort_by(|a, b| a.1.cmp(b.1));
    for (ns, prefix) in decls {
        let _ = write!(out, "\n    xmlns:{prefix}=\"{}\"", xml_escape(ns, true)?);
    }
    out.push_str(">\n");
    for (subject, preds) in groups {
        match subject {
            Term::Iri(iri) => {
                let _ = writeln!(out, "  <rdf:Description rdf:about=\"{}\">", xml_escape(iri, true)?);
            }
            Term::Blank(b) => {
                let _ = writeln!(out, "  <rdf:Description rdf:nodeID=\"{}\">", blank_ids[b.as_str()]);
            }
            Term::Literal(_) => unreachable!("subjects are never literals"),
        }
        for (pred, objs) in preds {
            let (ns, local) = split_qname(pred.value()).expect("checked above");
            let qname = format!("{}:{local}", ns_prefix[ns]);
            for o in objs {
                match o {
                    Term::Iri(iri) => {
                        let _ = writeln!(out, "    <{qname} rdf:resource=\"{}\"/>", xml_escape(iri, true)?);
                    }
                    Term::Blank(b) => {
                        let _ = writeln!(out, "    <{qname} rdf:nodeID=\"{}\"/>", blank_ids[b.as_str()]);
                    }
                    Term::Literal(l) => {
                        let mut attrs = String::new();
                        if let Some(lang) = l.lang() {
                            let _ = write!(attrs, " xml:lang=\"{lang}\"");
                        } else if let Some(dt) = l.datatype() {
                            let _ = write!(attrs, " rdf:datatype=\"{}\"", xml_escape(dt, true)?);
                        }
                        let _ = writeln!(
                            out,
                            "    <{qname}{attrs}>{}</{qname}>",
                            xml_escape(l.lexical(), false)?
                        );
                    }
                }
            }
        }
        out.push_str("  </rdf:Description>\n");
    }
    out.push_str("</rdf:RDF>\n");
    Ok(out)
}

/// JSON-LD in expanded form: an array of node objects, no context.
pub fn to_jsonld(graph: &Graph) -> String {
    use serde_json::{json, Map, Value};

    let node_id = |t: &Term| match t {
        Term::Blank(b) => format!("_:{b}"),
        other => other.value().to_string(),
    };
    let mut nodes = Vec::new();
    for (subject, preds) in grouped(graph) {
        let mut node = Map::new();
        node.insert("@id".into(), Value::String(node_id(subject)));
        for (pred, objs) in preds {
            let all_nodes = objs.iter().all(|o| !o.is_literal());
            if pred.value() == RDF_TYPE && all_nodes {
                let types: Vec<Value> = objs.iter().map(|o| Value::String(node_id(o))).collect();
                node.insert("@type".into(), Value::Array(types));
                continue;
            }
            let values: Vec<Value> = objs
                .iter()
                .map(|o| match o {
                    Term::Literal(l) => {
                        if let Some(lang) = l.lang() {
                            json!({"@value": l.lexical(), "@language": lang})
                        } else if let Some(dt) = l.datatype() {
                            json!({"@value": l.lexical(), "@type": dt})
                        } else {
                            json!({"@value": l.lexical()})
                        }
                    }
                    other => json!({"@id": node_id(other)}),
                })
                .collect();
            node.insert(pred.value().to_string(), Value::Array(values));
        }
        nodes.push(Value::Object(node));
    }
    let mut s = serde_json::to_string_pretty(&Value::Array(nodes)).expect("JSON values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse_ntriples, parse_turtle};

    fn one() -> Graph {
        parse_ntriples(b"<http://ex/a> <http://ex/p> \"x\" .").unwrap()
    }

    #[test]
    fn single_triple_ntriples_exact() {
        let out = serialize(&one(), RdfFormat::NTriples).unwrap();
        assert_eq!(out, b"<http://ex/a> <http://ex/p> \"x\" .\n");
    }

    #[test]
    fn empty_graph_outputs() {
        let g = Graph::new();
        assert!(serialize(&g, RdfFormat::NTriples).unwrap().is_empty());
        assert!(serialize(&g, RdfFormat::Turtle).unwrap().is_empty());
        assert_eq!(serialize(&g, RdfFormat::JsonLd).unwrap(), b"[]\n");
    }

    #[test]
    fn canonical_order_is_by_rendered_terms() {
        let g = parse_ntriples(
            b"<http://ex/b> <http://ex/p> \"1\" .\n<http://ex/a> <http://ex/q> \"2\" .\n<http://ex/a> <http://ex/p> \"3\" .\n",
        )
        .unwrap();
        let out = to_ntriples(&g);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(
            lines,
            vec![
                "<http://ex/a> <http://ex/p> \"3\" .",
                "<http://ex/a> <http://ex/q> \"2\" .",
                "<http://ex/b> <http://ex/p> \"1\" .",
            ]
        );
    }

    #[test]
    fn turtle_uses_prefixes_and_groups() {
        let g = parse_turtle(
            b"@prefix ex: <http://ex/> . ex:a a ex:T ; ex:p \"x\"@en, \"y\" ; ex:q <http://other/z> .",
        )
        .unwrap();
        let mut pm = PrefixMap::standard();
        pm.insert("ex", "http://ex/");
        let ttl = to_turtle(&g, &pm);
        assert!(ttl.starts_with("@prefix ex: <http://ex/> .\n\n"));
        assert!(!ttl.contains("@prefix rdf:"));
        assert!(ttl.contains("ex:a a ex:T ;"));
        assert!(ttl.contains("ex:p \"x\"@en, \"y\""));
        assert!(ttl.contains("<http://other/z>"));
        let back = parse_turtle(ttl.as_bytes()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn qname_split() {
        assert_eq!(
            split_qname("http://purl.org/dc/terms/title"),
            Some(("http://purl.org/dc/terms/", "title"))
        );
        assert_eq!(
            split_qname("http://www.w3.org/ns/dcat#accessURL"),
            Some(("http://www.w3.org/ns/dcat#", "accessURL"))
        );
        assert_eq!(split_qname("http://ex/p1"), Some(("http://ex/", "p1")));
        assert_eq!(split_qname("http://ex/123"), None);
        assert_eq!(split_qname("http://ex/"), None);
    }

    #[test]
    fn rdfxml_rejects_unsplittable_predicate() {
        let g = parse_ntriples(b"<http://ex/a> <http://ex/123> \"x\" .").unwrap();
        assert!(matches!(
            serialize(&g, RdfFormat::RdfXml),
            Err(SerializeError::UnsupportedGraph(_))
        ));
    }

    #[test]
    fn rdfxml_shape() {
        let g = parse_turtle(
            b"@prefix ex: <http://ex/ns#> . ex:a ex:p \"a<b&c\"@en ; ex:q _:n . _:n ex:r <http://ex/z> .",
        )
        .unwrap();
        let xml = to_rdfxml(&g, &PrefixMap::standard()).unwrap();
        assert!(xml.contains("xmlns:ns1=\"http://ex/ns#\""));
        assert!(xml.contains("<ns1:p xml:lang=\"en\">a&lt;b&amp;c</ns1:p>"));
        assert!(xml.contains("rdf:nodeID=\"b0\""));
    }
}
