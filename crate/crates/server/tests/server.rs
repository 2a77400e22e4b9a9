use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use lrhub_core::catalog::{facet_values, to_graph, FacetKind};
use lrhub_core::rdf::graph_isomorphic;
use lrhub_core::sparql::parse_query;
use lrhub_core::store::{SearchQuery, Store};
use lrhub_server::{resource_path, router, NegotiatedFormat, Portal, ServerConfig};
use lrhub_testkit::oxrdf::reparse;
use lrhub_testkit::portal::{apertium_record, portal_fixture};
use lrhub_testkit::sparql::{canonical_rows, oracle_eval};
use serde_json::Value;

struct Running {
    base: String,
    portal: Arc<Portal>,
    client: reqwest::Client,
}

impl Running {
    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    async fn get(&self, path: &str, accept: Option<&str>) -> reqwest::Response {
        let mut req = self.client.get(self.url(path));
        if let Some(a) = accept {
            req = req.header("Accept", a);
        }
        req.send().await.unwrap()
    }

    async fn json(&self, path: &str) -> (u16, Value) {
        let r = self.get(path, None).await;
        let status = r.status().as_u16();
        (status, serde_json::from_str(&r.text().await.unwrap()).unwrap())
    }
}

fn form_body(pairs: &[(&str, &str)]) -> String {
    url::form_urlencoded::Serializer::new(String::new()).extend_pairs(pairs).finish()
}

fn sparql_url(pairs: &[(&str, &str)]) -> String {
    format!("/sparql?{}", form_body(pairs))
}

async fn start(store: Store, config: ServerConfig) -> Running {
    let portal = Arc::new(Portal::new(store));
    let app = router(portal.clone(), config);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(lrhub_server::serve(listener, app));
    Running {
        base,
        portal,
        client: reqwest::Client::new(),
    }
}

async fn fixture_server() -> Running {
    let fx = portal_fixture(11, 40);
    start(Store::load(fx.records).unwrap(), ServerConfig::default()).await
}

#[tokio::test]
async fn every_record_dereferences_in_every_format() {
    let started = Instant::now();
    let srv = fixture_server().await;
    let store = srv.portal.store();
    for record in store.records() {
        let path = resource_path(&record.id).unwrap();
        let expected = to_graph(record);
        for f in NegotiatedFormat::PREFERENCE {
            for (p, accept) in [(path.clone(), Some(f.media_type())), (format!("{path}.{}", f.extension()), None)] {
                let r = srv.get(&p, accept).await;
                assert_eq!(r.status(), 200, "{p} as {f}");
                let ct = r.headers()["content-type"].to_str().unwrap().to_string();
                assert!(ct.starts_with(f.media_type()), "{ct}");
                let body = r.bytes().await.unwrap();
                if let Some(rdf) = f.rdf() {
                    let g = reparse(&body, rdf);
                    assert!(graph_isomorphic(&g, &expected), "{p} as {f}");
                }
            }
        }
    }
    assert!(started.elapsed() < Duration::from_secs(60));
}

#[tokio::test]
async fn record_page_and_errors() {
    let srv = fixture_server().await;
    let apertium = apertium_record();
    let path = resource_path(&apertium.id).unwrap();
    let html = srv.get(&path, Some("text/html")).await.text().await.unwrap();
    assert!(html.contains(&lrhub_server::escape(apertium.display_title().unwrap())));
    for label in ["RDF/XML", "N-Triples", "Turtle", "JSON-LD"] {
        assert!(html.contains(&format!(">{label}</a>")), "{label}");
    }
    assert!(html.contains(&format!("href=\"{path}.ttl\"")));
    for lang in ["es", "Spanish"] {
        assert!(html.contains(&format!("<tr><td>Language</td><td><a href=\"/?language={lang}\">{lang}</a>")));
    }
    let r = srv.get(&path, Some("application/rdf+xml;q=0.9, text/html")).await;
    assert!(r.headers()["content-type"].to_str().unwrap().starts_with("text/html"));
    assert_eq!(r.headers()["vary"], "Accept");

    assert_eq!(srv.get("/resource/clarin/nope", None).await.status(), 404);
    assert_eq!(srv.get("/resource/clarin/nope.ttl", None).await.status(), 404);
    assert_eq!(srv.get(&path, Some("image/png")).await.status(), 406);
    let head = srv.client.head(srv.url(&format!("{path}.rdf"))).send().await.unwrap();
    assert_eq!(head.status(), 200);
}

#[tokio::test]
async fn search_api_contract() {
    let srv = fixture_server().await;
    let apertium = apertium_record();
    let (status, body) = srv.json("/api/search?q=spanish&pageSize=100").await;
    assert_eq!(status, 200);
    let ids: Vec<&str> = body["results"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&apertium.id.as_str()));
    for key in ["total", "page", "pageSize", "results", "facets"] {
        assert!(body.get(key).is_some(), "{key}");
    }
    let first = &body["results"][0];
    for key in ["id", "title", "languages", "type"] {
        assert!(first.get(key).is_some(), "{key}");
    }

    let (s, _) = srv.json("/api/search?color=red").await;
    assert_eq!(s, 400);
    let (s, e) = srv.json("/api/search?page=abc").await;
    assert_eq!((s, e["error"].as_str()), (400, Some("bad_number")));
}

fn ids(v: &Value) -> BTreeSet<String> {
    v["results"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap().to_string()).collect()
}

#[tokio::test]
async fn combined_filters_intersect() {
    let fx = portal_fixture(5, 60);
    let records = fx.records.clone();
    let srv = start(Store::load(fx.records).unwrap(), ServerConfig::default()).await;
    let pairs: Vec<(FacetKind, String)> = fx
        .counts
        .keys()
        .filter(|(f, _)| matches!(f, FacetKind::Language | FacetKind::Type | FacetKind::Creator))
        .cloned()
        .collect();
    for (i, a) in pairs.iter().enumerate() {
        for b in &pairs[i + 1..] {
            let q = |p: &[&(FacetKind, String)]| {
                let mut s = String::from("/api/search?pageSize=1000");
                for (f, v) in p {
                    s.push_str(&format!("&{}={}", f.name(), lrhub_server::encode_component(v)));
                }
                s
            };
            let both = ids(&srv.json(&q(&[a, b])).await.1);
            let left = ids(&srv.json(&q(&[a])).await.1);
            let right = ids(&srv.json(&q(&[b])).await.1);
            assert!(both.is_subset(&left) && both.is_subset(&right));
            let expected: BTreeSet<String> = records
                .iter()
                .filter(|r| facet_values(r, a.0).contains(&a.1) && facet_values(r, b.0).contains(&b.1))
                .map(|r| r.id.clone())
                .collect();
            assert_eq!(both, expected, "{a:?} {b:?}");
        }
    }
}

#[tokio::test]
async fn facet_counts_match_generator() {
    let fx = portal_fixture(8, 50);
    let srv = start(Store::load(fx.records).unwrap(), ServerConfig::default()).await;
    let (status, body) = srv.json("/api/facets?facetLimit=1000").await;
    assert_eq!(status, 200);
    assert_eq!(body["total"], 50);
    for ((facet, value), count) in &fx.counts {
        let list = body["facets"][facet.name()].as_array().unwrap();
        let got = list.iter().find(|c| c["value"] == value.as_str()).map(|c| c["count"].as_u64().unwrap());
        assert_eq!(got, Some(*count as u64), "{facet:?} {value}");
    }
    let (_, narrowed) = srv.json("/api/facets?language=spa").await;
    assert_eq!(narrowed["total"], 7);
}

#[tokio::test]
async fn sparql_endpoint() {
    let srv = start(
        Store::load(portal_fixture(3, 30).records).unwrap(),
        ServerConfig {
            query_timeout: Duration::from_millis(300),
            ..ServerConfig::default()
        },
    )
    .await;
    let text = "SELECT ?s ?l WHERE { ?s dct:language ?l }";
    let r = srv.client.get(srv.url(&sparql_url(&[("query", text)]))).send().await.unwrap();
    assert_eq!(r.status(), 200);
    assert_eq!(r.headers()["content-type"], "application/sparql-results+json");
    let body: Value = serde_json::from_str(&r.text().await.unwrap()).unwrap();
    let store = srv.portal.store();
    let expected = oracle_eval(&parse_query(text).unwrap(), &store.match_pattern(None, None, None)).unwrap();
    let got = body["results"]["bindings"].as_array().unwrap();
    assert_eq!(got.len(), expected.len());
    let mut got_pairs: Vec<(String, String)> = got
        .iter()
        .map(|b| (b["s"]["value"].as_str().unwrap().into(), b["l"]["value"].as_str().unwrap().into()))
        .collect();
    let mut want: Vec<(String, String)> = canonical_rows(&expected)
        .into_iter()
        .map(|row| {
            let v = |t: &Option<lrhub_core::rdf::Term>| match t.as_ref().unwrap() {
                lrhub_core::rdf::Term::Iri(i) => i.clone(),
                lrhub_core::rdf::Term::Literal(l) => l.lexical().to_string(),
                lrhub_core::rdf::Term::Blank(b) => b.clone(),
            };
            (v(&row[0]), v(&row[1]))
        })
        .collect();
    got_pairs.sort();
    want.sort();
    assert_eq!(got_pairs, want);

    let post = srv
        .client
        .post(srv.url("/sparql"))
        .header("Content-Type", "application/sparql-query")
        .body(text)
        .send()
        .await
        .unwrap();
    assert_eq!(post.status(), 200);
    let form = srv.client.post(srv.url("/sparql")).header("Content-Type", "application/x-www-form-urlencoded").body(form_body(&[("query", text)])).send().await.unwrap();
    assert_eq!(form.status(), 200);
    let tsv = srv.client.get(srv.url(&sparql_url(&[("query", text), ("format", "tsv")]))).send().await.unwrap();
    assert!(tsv.text().await.unwrap().starts_with("?s\t?l\n"));

    let bad = srv.client.get(srv.url(&sparql_url(&[("query", "SELEC ?s WHERE { ?s ?p ?o }")]))).send().await.unwrap();
    assert_eq!(bad.status(), 400);
    let e: Value = serde_json::from_str(&bad.text().await.unwrap()).unwrap();
    assert_eq!((e["error"].as_str(), e["position"].as_u64(), e["line"].as_u64()), (Some("syntax"), Some(0), Some(1)));
    assert_eq!(srv.get("/sparql", None).await.status(), 400);

    let slow = "SELECT ?a WHERE { ?a ?b ?c . ?d ?e ?f . ?g ?h ?i FILTER(regex(str(?i), \"(a|aa)*b\")) }";
    let r = srv.client.get(srv.url(&sparql_url(&[("query", slow)]))).send().await.unwrap();
    assert_eq!(r.status(), 408);
    let e: Value = serde_json::from_str(&r.text().await.unwrap()).unwrap();
    assert_eq!(e["error"], "timeout");
    let (status, health) = srv.json("/health").await;
    assert_eq!((status, health["status"].as_str()), (200, Some("ok")));
}

#[tokio::test]
async fn dump_and_snapshot_swap() {
    let srv = fixture_server().await;
    let r = srv.get("/dump.nt", None).await;
    assert_eq!(r.headers()["content-type"], "application/n-triples");
    let g = reparse(&r.bytes().await.unwrap(), lrhub_core::rdf::RdfFormat::NTriples);
    assert!(graph_isomorphic(&g, &srv.portal.store().to_graph()));

    let apertium = apertium_record();
    let path = resource_path(&apertium.id).unwrap();
    assert_eq!(srv.json("/health").await.1["records"], 40);
    srv.portal.replace(Store::load(portal_fixture(2, 8).records.split_off(1)).unwrap());
    assert_eq!(srv.json("/health").await.1["records"], 7);
    assert_eq!(srv.get(&path, None).await.status(), 404);
    let (_, all) = srv.json("/api/search").await;
    assert_eq!(all["total"], 7);
    assert_eq!(srv.portal.store().facet_search(&SearchQuery::default()).total, 7);
}

#[tokio::test]
async fn home_and_ui_routes() {
    let srv = fixture_server().await;
    let home = srv.get("/?q=apertium", None).await.text().await.unwrap();
    let apertium = apertium_record();
    assert!(home.contains(&format!("href=\"{}\"", resource_path(&apertium.id).unwrap())));
    assert_eq!(srv.get("/?color=red", None).await.status(), 400);
    assert_eq!(srv.get("/ui", None).await.status(), 404);

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>ui</p>").unwrap();
    let with_ui = start(
        Store::default(),
        ServerConfig {
            ui_dir: Some(dir.path().to_path_buf()),
            ..ServerConfig::default()
        },
    )
    .await;
    let r = with_ui.get("/ui/index.html", None).await;
    assert_eq!(r.status(), 200);
    assert_eq!(r.text().await.unwrap(), "<p>ui</p>");
}
