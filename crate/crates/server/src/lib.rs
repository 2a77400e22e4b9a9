//! The HTTP face of the portal.
//!
//! Every record IRI `<base>/resource/<repo>/<key>` is served at the
//! server-relative path `/resource/<repo>/<key>`, with the representation
//! picked by [`negotiate`]. Handlers work on an immutable [`Store`] snapshot
//! that [`Portal::replace`] swaps between requests.

mod html;
mod negotiate;

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::header::{ACCEPT, CONTENT_TYPE, VARY};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use lrhub_core::catalog::{to_graph, vocab, CatalogRecord, FacetKind};
use lrhub_core::rdf::serialize_with_prefixes;
use lrhub_core::sparql::{evaluate_with, parse_query, SparqlError};
use lrhub_core::store::{FacetCount, RecordSummary, SearchQuery, SearchResult, Store};
use serde::Serialize;
use thiserror::Error;

pub use html::{encode_component, escape};
pub use negotiate::{negotiate, NegotiatedFormat, NegotiationError};

pub const SPARQL_JSON: &str = "application/sparql-results+json";
pub const TSV: &str = "text/tab-separated-values";

/// A loaded store plus the path lookup for its records.
struct Snapshot {
    store: Arc<Store>,
    /// `<repo>/<key>` to record position.
    paths: HashMap<String, usize>,
}

impl Snapshot {
    fn new(store: Arc<Store>) -> Self {
        let paths = store
            .records()
            .iter()
            .enumerate()
            .filter_map(|(i, r)| resource_key(&r.id).map(|k| (k.to_string(), i)))
            .collect();
        Snapshot { store, paths }
    }

    fn record(&self, key: &str) -> Option<&CatalogRecord> {
        self.paths.get(key).map(|&i| &self.store.records()[i])
    }
}

/// The `<repo>/<key>` tail of a minted record id.
pub fn resource_key(id: &str) -> Option<&str> {
    let tail = &id[id.find("/resource/")? + "/resource/".len()..];
    let (repo, key) = tail.split_once('/')?;
    (!repo.is_empty() && !key.is_empty() && !key.contains('/')).then_some(tail)
}

/// Server-relative path of a record's page, if its id has the minted shape.
pub fn resource_path(id: &str) -> Option<String> {
    resource_key(id).map(|k| format!("/resource/{k}"))
}

/// Shared, swappable store state.
pub struct Portal {
    current: RwLock<Arc<Snapshot>>,
}

impl Portal {
    pub fn new(store: Store) -> Self {
        Portal {
            current: RwLock::new(Arc::new(Snapshot::new(Arc::new(store)))),
        }
    }

    /// Replaces the store. Requests already running keep the old snapshot.
    pub fn replace(&self, store: Store) {
        let next = Arc::new(Snapshot::new(Arc::new(store)));
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = next;
    }

    pub fn store(&self) -> Arc<Store> {
        self.snapshot().store.clone()
    }

    fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Budget for one SPARQL evaluation.
    pub query_timeout: Duration,
    /// Directory with a built UI bundle, served under `/ui`.
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            query_timeout: Duration::from_secs(10),
            ui_dir: None,
        }
    }
}

#[derive(Clone)]
struct AppState {
    portal: Arc<Portal>,
    config: Arc<ServerConfig>,
}

pub fn router(portal: Arc<Portal>, config: ServerConfig) -> Router {
    let ui_dir = config.ui_dir.clone();
    let state = AppState {
        portal,
        config: Arc::new(config),
    };
    let app = Router::new()
        .route("/", get(home))
        .route("/resource/{repo}/{key}", get(resource))
        .route("/api/search", get(search_api))
        .route("/api/facets", get(facets_api))
        .route("/sparql", get(sparql_get).post(sparql_post))
        .route("/dump.nt", get(dump))
        .route("/health", get(health));
    let app = match ui_dir {
        Some(dir) => app.nest_service("/ui", tower_http::services::ServeDir::new(dir)),
        None => app.route("/ui", get(no_ui)).route("/ui/{*rest}", get(no_ui)),
    };
    app.with_state(state)
}

/// Serves `app` until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app).await
}

/// Client errors from the JSON API.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApiError {
    #[error("unknown parameter {0:?}")]
    UnknownParameter(String),
    #[error("parameter {name} must be a positive integer, got {value:?}")]
    BadNumber { name: String, value: String },
    #[error("missing query parameter")]
    MissingQuery,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
}

impl ErrorBody<'_> {
    fn plain(error: &str, message: String) -> ErrorBody<'_> {
        ErrorBody {
            error,
            message,
            position: None,
            line: None,
            column: None,
        }
    }
}

fn json_response(status: StatusCode, body: &impl Serialize) -> Response {
    let text = serde_json::to_string(body).expect("response bodies serialize");
    (status, [(CONTENT_TYPE, "application/json; charset=utf-8")], text).into_response()
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let kind = match &self {
            ApiError::UnknownParameter(_) => "unknown_parameter",
            ApiError::BadNumber { .. } => "bad_number",
            ApiError::MissingQuery => "missing_query",
        };
        json_response(StatusCode::BAD_REQUEST, &ErrorBody::plain(kind, self.to_string()))
    }
}

fn positive(name: &str, value: &str) -> Result<usize, ApiError> {
    value.trim().parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| ApiError::BadNumber {
        name: name.to_string(),
        value: value.to_string(),
    })
}

/// Reads search parameters: `q`, `page`, `pageSize`, `facetLimit`, and any
/// number of `<facet>=<value>` filters, which combine conjunctively.
pub fn parse_search_params(params: &[(String, String)]) -> Result<SearchQuery, ApiError> {
    let mut query = SearchQuery::default();
    for (name, value) in params {
        match name.as_str() {
            "q" => {
                if !value.trim().is_empty() {
                    query.text = Some(value.clone());
                }
            }
            "page" => query.page = positive(name, value)?,
            "pageSize" => query.page_size = positive(name, value)?.min(1000),
            "facetLimit" => query.facet_limit = positive(name, value)?,
            other => match FacetKind::from_name(other) {
                Some(f) => query.filters.push((f, value.clone())),
                None => return Err(ApiError::UnknownParameter(other.to_string())),
            },
        }
    }
    Ok(query)
}

fn facets_json(result: &SearchResult) -> BTreeMap<&'static str, &[FacetCount]> {
    result.facet_counts.iter().map(|(f, c)| (f.name(), c.as_slice())).collect()
}

#[derive(Serialize)]
struct SearchBody<'a> {
    total: usize,
    page: usize,
    #[serde(rename = "pageSize")]
    page_size: usize,
    results: &'a [RecordSummary],
    facets: BTreeMap<&'static str, &'a [FacetCount]>,
}

#[derive(Serialize)]
struct FacetsBody<'a> {
    total: usize,
    facets: BTreeMap<&'static str, &'a [FacetCount]>,
}

async fn search_api(State(st): State<AppState>, Query(params): Query<Vec<(String, String)>>) -> Response {
    let query = match parse_search_params(&params) {
        Ok(q) => q,
        Err(e) => return e.into_response(),
    };
    let result = st.portal.store().facet_search(&query);
    let body = SearchBody {
        total: result.total,
        page: result.page,
        page_size: result.page_size,
        results: &result.hits,
        facets: facets_json(&result),
    };
    json_response(StatusCode::OK, &body)
}

async fn facets_api(State(st): State<AppState>, Query(params): Query<Vec<(String, String)>>) -> Response {
    let query = match parse_search_params(&params) {
        Ok(q) => q,
        Err(e) => return e.into_response(),
    };
    let result = st.portal.store().facet_search(&query);
    json_response(
        StatusCode::OK,
        &FacetsBody {
            total: result.total,
            facets: facets_json(&result),
        },
    )
}

fn html_response(status: StatusCode, body: String) -> Response {
    (status, [(CONTENT_TYPE, "text/html; charset=utf-8")], body).into_response()
}

async fn home(State(st): State<AppState>, Query(params): Query<Vec<(String, String)>>) -> Response {
    let query = match parse_search_params(&params) {
        Ok(q) => q,
        Err(e) => return html_response(StatusCode::BAD_REQUEST, html::message_page("Bad request", &e.to_string())),
    };
    let result = st.portal.store().facet_search(&query);
    let q = query.text.as_deref().unwrap_or("");
    html_response(StatusCode::OK, html::search_page(q, &result, resource_path))
}

fn not_found(what: &str) -> Response {
    html_response(StatusCode::NOT_FOUND, html::message_page("Not found", &format!("No resource {what}")))
}

async fn resource(
    State(st): State<AppState>,
    Path((repo, key)): Path<(String, String)>,
    headers: HeaderMap,
) -> Response {
    let (key, ext) = match key.rsplit_once('.') {
        Some((k, e)) if NegotiatedFormat::from_extension(e).is_some() => (k.to_string(), Some(e.to_string())),
        _ => (key, None),
    };
    let snapshot = st.portal.snapshot();
    let Some(record) = snapshot.record(&format!("{repo}/{key}")) else {
        return not_found(&format!("/resource/{repo}/{key}"));
    };
    let accept = headers.get(ACCEPT).and_then(|v| v.to_str().ok());
    let format = match negotiate(accept, ext.as_deref()) {
        Ok(f) => f,
        Err(e) => {
            let offered: Vec<&str> = NegotiatedFormat::PREFERENCE.iter().map(|f| f.media_type()).collect();
            let msg = format!("{e}; available: {}", offered.join(", "));
            return (StatusCode::NOT_ACCEPTABLE, [(CONTENT_TYPE, "text/plain; charset=utf-8")], msg).into_response();
        }
    };
    let mut response = match format.rdf() {
        None => html_response(StatusCode::OK, html::record_page(record, &format!("/resource/{repo}/{key}"))),
        Some(rdf) => match serialize_with_prefixes(&to_graph(record), rdf, &vocab::prefixes()) {
            Ok(bytes) => (StatusCode::OK, [(CONTENT_TYPE, format.media_type())], bytes).into_response(),
            Err(e) => {
                tracing::error!(id = %record.id, "cannot serialize record: {e}");
                (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response()
            }
        },
    };
    if ext.is_none() {
        response.headers_mut().insert(VARY, HeaderValue::from_static("Accept"));
    }
    response
}

fn sparql_error(e: &SparqlError) -> Response {
    let body = match e {
        SparqlError::Syntax {
            position,
            line,
            column,
            message,
        } => ErrorBody {
            error: "syntax",
            message: message.clone(),
            position: Some(*position),
            line: Some(*line),
            column: Some(*column),
        },
        SparqlError::UnsupportedFeature(_) => ErrorBody::plain("unsupported", e.to_string()),
        SparqlError::Regex { .. } => ErrorBody::plain("regex", e.to_string()),
        SparqlError::Timeout => ErrorBody::plain("timeout", e.to_string()),
    };
    let status = match e {
        SparqlError::Timeout => StatusCode::REQUEST_TIMEOUT,
        _ => StatusCode::BAD_REQUEST,
    };
    json_response(status, &body)
}

fn wants_tsv(headers: &HeaderMap, params: &[(String, String)]) -> bool {
    if let Some((_, f)) = params.iter().find(|(k, _)| k == "format") {
        return f.eq_ignore_ascii_case("tsv");
    }
    headers
        .get(ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|a| a.contains(TSV) && !a.contains(SPARQL_JSON))
}

async fn run_sparql(st: AppState, text: Option<String>, tsv: bool) -> Response {
    let Some(text) = text.filter(|t| !t.trim().is_empty()) else {
        return ApiError::MissingQuery.into_response();
    };
    let query = match parse_query(&text) {
        Ok(q) => q,
        Err(e) => return sparql_error(&e),
    };
    let store = st.portal.store();
    let deadline = Instant::now() + st.config.query_timeout;
    let outcome = tokio::task::spawn_blocking(move || evaluate_with(&query, &store, Some(deadline))).await;
    match outcome {
        Ok(Ok(solutions)) if tsv => (StatusCode::OK, [(CONTENT_TYPE, TSV)], solutions.to_tsv()).into_response(),
        Ok(Ok(solutions)) => (StatusCode::OK, [(CONTENT_TYPE, SPARQL_JSON)], solutions.to_json_results()).into_response(),
        Ok(Err(e)) => sparql_error(&e),
        Err(e) => {
            tracing::error!("query task failed: {e}");
            (StatusCode::INTERNAL_SERVER_ERROR, "query evaluation failed").into_response()
        }
    }
}

async fn sparql_get(
    State(st): State<AppState>,
    headers: HeaderMap,
    Query(params): Query<Vec<(String, String)>>,
) -> Response {
    let text = params.iter().find(|(k, _)| k == "query").map(|(_, v)| v.clone());
    let tsv = wants_tsv(&headers, &params);
    run_sparql(st, text, tsv).await
}

/// Accepts `application/sparql-query` bodies and url-encoded forms.
async fn sparql_post(
    State(st): State<AppState>,
    headers: HeaderMap,
    Query(params): Query<Vec<(String, String)>>,
    body: Bytes,
) -> Response {
    let content_type = headers.get(CONTENT_TYPE).and_then(|v| v.to_str().ok()).unwrap_or("");
    let text = if content_type.starts_with("application/x-www-form-urlencoded") {
        url::form_urlencoded::parse(&body)
            .find(|(k, _)| k == "query")
            .map(|(_, v)| v.into_owned())
    } else {
        match String::from_utf8(body.to_vec()) {
            Ok(t) => Some(t),
            Err(_) => {
                let body = ErrorBody::plain("encoding", "query body is not UTF-8".into());
                return json_response(StatusCode::BAD_REQUEST, &body);
            }
        }
    };
    let tsv = wants_tsv(&headers, &params);
    run_sparql(st, text, tsv).await
}

async fn dump(State(st): State<AppState>) -> Response {
    let text = st.portal.store().dump();
    (StatusCode::OK, [(CONTENT_TYPE, "application/n-triples")], text).into_response()
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    records: usize,
    triples: usize,
}

async fn health(State(st): State<AppState>) -> Response {
    let store = st.portal.store();
    json_response(
        StatusCode::OK,
        &Health {
            status: "ok",
            records: store.records().len(),
            triples: store.len(),
        },
    )
}

async fn no_ui() -> Response {
    html_response(
        StatusCode::NOT_FOUND,
        html::message_page("No UI installed", "Start the server with a UI directory to serve the browsing frontend."),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn search_params() {
        let q = parse_search_params(&params(&[("Language", "spa"), ("type", "Corpus"), ("q", "x"), ("page", "2")])).unwrap();
        assert_eq!(q.filters, vec![(FacetKind::Language, "spa".into()), (FacetKind::Type, "Corpus".into())]);
        assert_eq!((q.text.as_deref(), q.page), (Some("x"), 2));
        assert_eq!(
            parse_search_params(&params(&[("color", "red")])),
            Err(ApiError::UnknownParameter("color".into()))
        );
        assert!(matches!(parse_search_params(&params(&[("page", "two")])), Err(ApiError::BadNumber { .. })));
        assert!(matches!(parse_search_params(&params(&[("pageSize", "0")])), Err(ApiError::BadNumber { .. })));
    }

    #[test]
    fn resource_keys() {
        assert_eq!(resource_key("http://h.org/resource/clarin/ab12"), Some("clarin/ab12"));
        assert_eq!(resource_path("http://h.org/resource/clarin/ab12").as_deref(), Some("/resource/clarin/ab12"));
        assert_eq!(resource_key("http://h.org/other/clarin/ab12"), None);
        assert_eq!(resource_key("http://h.org/resource/clarin/"), None);
    }
}
