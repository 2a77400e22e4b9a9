//! Minimal server-rendered pages: the record table and the search form.

use std::fmt::Write as _;

use lrhub_core::catalog::{facet_values, CatalogRecord, FacetKind};
use lrhub_core::store::SearchResult;

use crate::negotiate::NegotiatedFormat;

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Percent-encodes a query-string component.
pub fn encode_component(s: &str) -> String {
    let mut out = String::new();
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.' | b'~') {
            out.push(b as char);
        } else {
            let _ = write!(out, "%{b:02X}");
        }
    }
    out
}

fn page(title: &str, body: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n</head>\n<body>\n{body}</body>\n</html>\n",
        escape(title)
    )
}

fn search_form(q: &str) -> String {
    format!(
        "<form action=\"/\" method=\"get\"><input type=\"search\" name=\"q\" value=\"{}\"> <button type=\"submit\">Search</button></form>\n",
        escape(q)
    )
}

/// The record page. `path` is the server-relative resource path without an
/// extension; the alternate serializations are linked from it.
pub fn record_page(record: &CatalogRecord, path: &str) -> String {
    let title = record.display_title().unwrap_or("Untitled resource");
    let mut body = search_form("");
    let _ = writeln!(body, "<h1>{}</h1>", escape(title));
    let _ = writeln!(body, "<p><a href=\"{0}\">{0}</a></p>", escape(&record.id));
    body.push_str("<p class=\"formats\">");
    for (i, f) in NegotiatedFormat::PREFERENCE.iter().enumerate() {
        if i > 0 {
            body.push(' ');
        }
        let _ = write!(
            body,
            "<a rel=\"alternate\" type=\"{}\" href=\"{}.{}\">{}</a>",
            f.media_type(),
            escape(path),
            f.extension(),
            f.label()
        );
    }
    body.push_str("</p>\n<table>\n<tr><th>Property</th><th>Value</th></tr>\n");
    for facet in FacetKind::ALL {
        for value in facet_values(record, facet) {
            let link = format!("/?{}={}", facet.name(), encode_component(&value));
            let _ = writeln!(
                body,
                "<tr><td>{}</td><td><a href=\"{}\">{}</a></td></tr>",
                facet.label(),
                escape(&link),
                escape(&value)
            );
        }
    }
    for lang in record.languages.iter().filter_map(|l| l.iso639_3.as_deref()) {
        let _ = writeln!(body, "<tr><td>ISO 639-3</td><td>{}</td></tr>", escape(lang));
    }
    body.push_str("</table>\n");
    page(title, &body)
}

/// The home page: search form, hit list and facet counts.
pub fn search_page(q: &str, result: &SearchResult, resource_path: impl Fn(&str) -> Option<String>) -> String {
    let mut body = search_form(q);
    let _ = writeln!(body, "<p>{} resources</p>\n<ol>", result.total);
    for hit in &result.hits {
        let title = escape(hit.title.as_deref().unwrap_or("Untitled resource"));
        match resource_path(&hit.id) {
            Some(p) => {
                let _ = writeln!(body, "<li><a href=\"{}\">{title}</a></li>", escape(&p));
            }
            None => {
                let _ = writeln!(body, "<li>{title}</li>");
            }
        }
    }
    body.push_str("</ol>\n");
    for (facet, counts) in &result.facet_counts {
        if matches!(facet, FacetKind::Title | FacetKind::Description) || counts.is_empty() {
            continue;
        }
        let _ = writeln!(body, "<h2>{}</h2>\n<ul>", facet.label());
        for c in counts {
            let link = format!("/?{}={}", facet.name(), encode_component(&c.value));
            let _ = writeln!(body, "<li><a href=\"{}\">{}</a> ({})</li>", escape(&link), escape(&c.value), c.count);
        }
        body.push_str("</ul>\n");
    }
    page("Language resources", &body)
}

pub fn message_page(title: &str, message: &str) -> String {
    page(title, &format!("<h1>{}</h1>\n<p>{}</p>\n", escape(title), escape(message)))
}
