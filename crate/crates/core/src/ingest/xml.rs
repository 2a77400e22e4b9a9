use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::rules::{MappingRuleSet, Selector, Step, Terminal};
use super::{line_col, IngestError};

/// A parsed element. Comments and processing instructions are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Element(Element),
    Text(String),
}

fn local(name: &str) -> &str {
    name.rsplit_once(':').map(|(_, l)| l).unwrap_or(name)
}

/// A rule name without a prefix matches on the local name; a prefixed one
/// must match the qualified name as written.
pub(crate) fn name_matches(pattern: &str, name: &str) -> bool {
    pattern == "*"
        || if pattern.contains(':') {
            pattern == name
        } else {
            pattern == local(name)
        }
}

impl Element {
    pub fn attr(&self, pattern: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| name_matches(pattern, k))
            .map(|(_, v)| v.as_str())
    }

    /// The `xml:lang` (or plain `lang`) attribute.
    pub fn lang(&self) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == "xml:lang")
            .or_else(|| self.attrs.iter().find(|(k, _)| k == "lang"))
            .map(|(_, v)| v.as_str())
    }

    fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|c| match c {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    pub fn direct_text(&self) -> String {
        self.children
            .iter()
            .filter_map(|c| match c {
                Node::Text(t) => Some(t.as_str()),
                Node::Element(_) => None,
            })
            .collect()
    }

    pub fn string_value(&self) -> String {
        let mut out = String::new();
        self.collect_text(&mut out);
        out
    }

    fn collect_text(&self, out: &mut String) {
        for c in &self.children {
            match c {
                Node::Text(t) => out.push_str(t),
                Node::Element(e) => e.collect_text(out),
            }
        }
    }

    fn step<'a>(&'a self, step: &Step) -> Vec<&'a Element> {
        let matching = self.elements().filter(|e| name_matches(&step.name, &e.name));
        match step.index {
            Some(n) => matching.skip(n - 1).take(1).collect(),
            None => matching.collect(),
        }
    }

    /// Values selected by `sel`, each with the language of the element it came from.
    pub fn select(&self, sel: &Selector) -> Vec<(String, Option<String>)> {
        let mut nodes = vec![self];
        for step in &sel.steps {
            nodes = nodes.into_iter().flat_map(|n| n.step(step)).collect();
        }
        nodes
            .into_iter()
            .filter_map(|n| {
                let value = match &sel.terminal {
                    Terminal::Text => n.direct_text(),
                    Terminal::StringValue => n.string_value(),
                    Terminal::Attribute(a) => n.attr(a)?.to_string(),
                };
                Some((value, n.lang().map(str::to_string)))
            })
            .collect()
    }
}

/// A record element with the byte offset of its start tag.
#[derive(Debug, Clone)]
pub struct RawRecord {
    pub element: Element,
    pub line: usize,
    pub column: usize,
}

/// What the scanner found at the top level of the stream.
#[derive(Debug, Clone)]
pub enum Item {
    Record(RawRecord),
    /// A top-level element containing no configured record root.
    Stray { name: String, line: usize, column: usize },
}

fn start_element(e: &BytesStart<'_>, input: &[u8], pos: usize) -> Result<Element, IngestError> {
    let err = |reason: String| {
        let (line, column) = line_col(input, pos);
        IngestError::Xml {
            line,
            column,
            reason,
        }
    };
    let name = std::str::from_utf8(e.name().as_ref())
        .map_err(|_| err("element name is not UTF-8".into()))?
        .to_string();
    let mut attrs = Vec::new();
    for a in e.attributes() {
        let a = a.map_err(|x| err(x.to_string()))?;
        let key = std::str::from_utf8(a.key.as_ref())
            .map_err(|_| err("attribute name is not UTF-8".into()))?
            .to_string();
        let value = a.unescape_value().map_err(|x| err(x.to_string()))?.into_owned();
        attrs.push((key, value));
    }
    Ok(Element {
        name,
        attrs,
        children: Vec::new(),
    })
}

/// Splits a stream into record elements. With no configured root tags every
/// top-level element is a record; otherwise the outermost element matching a
/// root tag at any depth is one.
pub fn scan(input: &[u8], rules: &MappingRuleSet) -> Result<Vec<Item>, IngestError> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().check_end_names = true;
    let mut buf = Vec::new();
    let mut items = Vec::new();
    // open elements outside any record: (name, start offset, contains a record)
    let mut outer: Vec<(String, usize, bool)> = Vec::new();
    // the record under construction, as a stack of open elements
    let mut building: Vec<Element> = Vec::new();
    let mut record_start = 0usize;

    let is_root = |name: &str, depth: usize| {
        if rules.root_tags.is_empty() {
            depth == 0
        } else {
            rules.root_tags.iter().any(|t| name_matches(t, name))
        }
    };

    loop {
        buf.clear();
        let pos = reader.buffer_position() as usize;
        let event = reader.read_event_into(&mut buf).map_err(|e| {
            let (line, column) = line_col(input, reader.error_position() as usize);
            IngestError::Xml {
                line,
                column,
                reason: e.to_string(),
            }
        })?;
        let xml_err = |reason: &str| {
            let (line, column) = line_col(input, pos);
            IngestError::Xml {
                line,
                column,
                reason: reason.to_string(),
            }
        };
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                let el = start_element(e, input, pos)?;
                if building.is_empty() && !is_root(&el.name, outer.len()) {
                    if empty {
                        if outer.is_empty() {
                            let (line, column) = line_col(input, pos);
                            items.push(Item::Stray {
                                name: el.name,
                                line,
                                column,
                            });
                        }
                    } else {
                        outer.push((el.name, pos, false));
                    }
                    continue;
                }
                if building.is_empty() {
                    record_start = pos;
                    for o in outer.iter_mut() {
                        o.2 = true;
                    }
                }
                building.push(el);
                if empty {
                    close(&mut building, &mut items, input, record_start);
                }
            }
            Event::End(_) => {
                if !building.is_empty() {
                    close(&mut building, &mut items, input, record_start);
                } else if let Some((name, start, found)) = outer.pop() {
                    if outer.is_empty() && !found {
                        let (line, column) = line_col(input, start);
                        items.push(Item::Stray { name, line, column });
                    }
                }
            }
            Event::Text(t) => {
                if let Some(top) = building.last_mut() {
                    let text = t.unescape().map_err(|e| xml_err(&e.to_string()))?;
                    push_text(top, &text);
                } else if outer.is_empty() && !t.iter().all(u8::is_ascii_whitespace) {
                    return Err(xml_err("text outside any element"));
                }
            }
            Event::CData(c) => {
                if let Some(top) = building.last_mut() {
                    let bytes = c.into_inner();
                    let text =
                        std::str::from_utf8(&bytes).map_err(|_| xml_err("CDATA is not UTF-8"))?;
                    push_text(top, text);
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !building.is_empty() || !outer.is_empty() {
        let (line, column) = line_col(input, input.len());
        return Err(IngestError::Xml {
            line,
            column,
            reason: "unexpected end of input inside an element".into(),
        });
    }
    Ok(items)
}

fn push_text(el: &mut Element, text: &str) {
    if let Some(Node::Text(prev)) = el.children.last_mut() {
        prev.push_str(text);
    } else {
        el.children.push(Node::Text(text.to_string()));
    }
}

fn close(building: &mut Vec<Element>, items: &mut Vec<Item>, input: &[u8], start: usize) {
    let done = building.pop().expect("an open element");
    match building.last_mut() {
        Some(parent) => parent.children.push(Node::Element(done)),
        None => {
            let (line, column) = line_col(input, start);
            items.push(Item::Record(RawRecord {
                element: done,
                line,
                column,
            }));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::load_ruleset;

    fn rules(text: &str) -> MappingRuleSet {
        load_ruleset(text.as_bytes()).unwrap()
    }

    #[test]
    fn records_at_any_depth() {
        let xml = br#"<?xml version="1.0"?>
<wrap><list><rec id="1"><t>a</t></rec><rec id="2"/></list></wrap>
<other/>"#;
        let items = scan(xml, &rules("@root rec
t -> Title")).unwrap();
        assert_eq!(items.len(), 3);
        assert!(matches!(&items[0], Item::Record(r) if r.element.attr("id") == Some("1")));
        assert!(matches!(&items[1], Item::Record(r) if r.line == 2));
        assert!(matches!(&items[2], Item::Stray { name, line: 3, .. } if name == "other"));
    }

    #[test]
    fn selection() {
        let xml = br#"<r xml:lang="en"><dc:title xml:lang="de">Titel</dc:title><dc:title>T &amp; U</dc:title><x><y>1</y><y>2<![CDATA[<3>]]></y></x></r>"#;
        let items = scan(xml, &rules("t -> Title")).unwrap();
        let Item::Record(r) = &items[0] else { panic!() };
        let e = &r.element;
        let titles = e.select(&Selector::parse("title/text()").unwrap());
        assert_eq!(
            titles,
            vec![("Titel".into(), Some("de".into())), ("T & U".into(), None)]
        );
        assert_eq!(e.select(&Selector::parse("dc:title[2]").unwrap())[0].0, "T & U");
        assert_eq!(e.select(&Selector::parse("x/y[2]/text()").unwrap())[0].0, "2<3>");
        assert_eq!(e.select(&Selector::parse("x").unwrap())[0].0, "12<3>");
        assert_eq!(e.select(&Selector::parse("@xml:lang").unwrap())[0].0, "en");
        assert!(e.select(&Selector::parse("other:title").unwrap()).is_empty());
    }

    #[test]
    fn malformed_stream_is_located() {
        let err = scan(b"<r>
<a></b></r>", &rules("a -> Title")).unwrap_err();
        assert!(matches!(err, IngestError::Xml { line: 2, .. }), "{err:?}");
        assert!(scan(b"<r><a>", &rules("a -> Title")).is_err());
    }
}
