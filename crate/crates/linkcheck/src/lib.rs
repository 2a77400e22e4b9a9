//! Resolves access URLs and reports which formats they lead to.
//!
//! Each URL is probed with a HEAD request; a server that rejects HEAD gets a
//! GET for the first byte instead. Redirects are followed by hand so hops
//! can be counted. Requests to one host are serialized and spaced by the
//! policy's per-host delay.

mod cache;
mod media;

use std::collections::HashMap;
use std::error::Error as _;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use chrono::{DateTime, Utc};
use reqwest::header::{CONTENT_TYPE, LOCATION, RANGE};
use reqwest::{Client, Method, StatusCode};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::{Mutex as AsyncMutex, OwnedMutexGuard, Semaphore};
use tokio::task::JoinSet;
use tokio::time::Instant;
use url::Url;

pub use cache::{check_urls_cached, LinkCache};
pub use media::{classify_media, essence, format_report, label_is_machine_readable, FormatReport, FormatRow};

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("no resolved results to report on")]
    EmptyInput,
    #[error("link cache {path}: {source}")]
    Cache {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("link cache {path}, line {line}: {source}")]
    CacheFormat {
        path: String,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

impl PartialEq for LinkError {
    fn eq(&self, other: &Self) -> bool {
        matches!((self, other), (LinkError::EmptyInput, LinkError::EmptyInput))
    }
}

#[derive(Debug, Clone)]
pub struct LinkPolicy {
    pub max_redirects: usize,
    /// Budget for each request, including connecting.
    pub timeout: Duration,
    /// Minimum spacing between request starts to one host.
    pub per_host_delay: Duration,
    pub concurrency: usize,
}

impl Default for LinkPolicy {
    fn default() -> Self {
        LinkPolicy {
            max_redirects: 5,
            timeout: Duration::from_secs(10),
            per_host_delay: Duration::from_millis(500),
            concurrency: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnresolvedReason {
    Timeout,
    Dns,
    TooManyRedirects,
    HttpError(u16),
    Refused,
    /// Not a fetchable http(s) URL, or a transport failure outside the
    /// other categories.
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkStatus {
    Resolved {
        status: u16,
        /// Declared Content-Type without parameters; empty if absent.
        media_type: String,
        final_url: String,
    },
    Unresolved(UnresolvedReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkResult {
    pub url: String,
    pub status: LinkStatus,
    pub fetched_at: DateTime<Utc>,
    pub redirect_hops: usize,
}

impl LinkResult {
    pub fn is_resolved(&self) -> bool {
        matches!(self.status, LinkStatus::Resolved { .. })
    }
}

/// Percentage of results that resolved; 0 for an empty batch.
pub fn resolved_percentage(results: &[LinkResult]) -> f64 {
    if results.is_empty() {
        return 0.0;
    }
    100.0 * results.iter().filter(|r| r.is_resolved()).count() as f64 / results.len() as f64
}

/// Checks every URL. The result list has one entry per input, in input order;
/// failures are reported per URL and never abort the batch.
pub async fn check_urls(urls: &[String], policy: &LinkPolicy) -> Vec<LinkResult> {
    let client = Client::builder()
        .redirect(reqwest::redirect::Policy::none())
        .timeout(policy.timeout)
        .connect_timeout(policy.timeout)
        .user_agent(concat!("lrhub-linkcheck/", env!("CARGO_PKG_VERSION")))
        .build();
    let client = match client {
        Ok(c) => c,
        Err(e) => {
            let reason = UnresolvedReason::Other(format!("HTTP client unavailable: {e}"));
            return urls.iter().map(|u| unresolved(u, reason.clone(), 0)).collect();
        }
    };
    let checker = Arc::new(Checker {
        client,
        policy: policy.clone(),
        hosts: Mutex::new(HashMap::new()),
    });
    let permits = Arc::new(Semaphore::new(policy.concurrency.max(1)));
    let mut tasks = JoinSet::new();
    for (i, url) in urls.iter().enumerate() {
        let (checker, permits, url) = (checker.clone(), permits.clone(), url.clone());
        tasks.spawn(async move {
            let _permit = permits.acquire_owned().await.expect("semaphore is never closed");
            (i, checker.check(&url).await)
        });
    }
    let mut out: Vec<Option<LinkResult>> = vec![None; urls.len()];
    while let Some(joined) = tasks.join_next().await {
        if let Ok((i, r)) = joined {
            out[i] = Some(r);
        }
    }
    out.into_iter()
        .zip(urls)
        .map(|(r, u)| r.unwrap_or_else(|| unresolved(u, UnresolvedReason::Other("check aborted".into()), 0)))
        .collect()
}

fn unresolved(url: &str, reason: UnresolvedReason, hops: usize) -> LinkResult {
    LinkResult {
        url: url.to_string(),
        status: LinkStatus::Unresolved(reason),
        fetched_at: Utc::now(),
        redirect_hops: hops,
    }
}

type HostSlot = Arc<AsyncMutex<Option<Instant>>>;

struct Checker {
    client: Client,
    policy: LinkPolicy,
    /// Start time of the last request per host.
    hosts: Mutex<HashMap<String, HostSlot>>,
}

impl Checker {
    async fn check(&self, url: &str) -> LinkResult {
        let fetched_at = Utc::now();
        let finish = |status, hops| LinkResult {
            url: url.to_string(),
            status,
            fetched_at,
            redirect_hops: hops,
        };
        let mut current = match Url::parse(url) {
            Ok(u) if matches!(u.scheme(), "http" | "https") && u.host_str().is_some() => u,
            _ => return finish(LinkStatus::Unresolved(UnresolvedReason::Other("not an http(s) URL".into())), 0),
        };
        let mut hops = 0;
        loop {
            let (status, headers) = match self.probe(&current).await {
                Ok(r) => r,
                Err(reason) => return finish(LinkStatus::Unresolved(reason), hops),
            };
            if status.is_redirection() {
                if let Some(loc) = headers.get(LOCATION).and_then(|v| v.to_str().ok()) {
                    hops += 1;
                    if hops > self.policy.max_redirects {
                        return finish(LinkStatus::Unresolved(UnresolvedReason::TooManyRedirects), hops);
                    }
                    match current.join(loc) {
                        Ok(next) => current = next,
                        Err(e) => {
                            let reason = UnresolvedReason::Other(format!("bad redirect target {loc:?}: {e}"));
                            return finish(LinkStatus::Unresolved(reason), hops);
                        }
                    }
                    continue;
                }
            }
            if status.is_success() {
                let media_type = headers
                    .get(CONTENT_TYPE)
                    .and_then(|v| v.to_str().ok())
                    .map(essence)
                    .unwrap_or_default();
                return finish(
                    LinkStatus::Resolved {
                        status: status.as_u16(),
                        media_type,
                        final_url: current.to_string(),
                    },
                    hops,
                );
            }
            return finish(LinkStatus::Unresolved(UnresolvedReason::HttpError(status.as_u16())), hops);
        }
    }

    /// HEAD, or a one-byte ranged GET when the server refuses HEAD.
    async fn probe(&self, url: &Url) -> Result<(StatusCode, reqwest::header::HeaderMap), UnresolvedReason> {
        let head = self.send(url, Method::HEAD).await?;
        let rejected = matches!(
            head.0,
            StatusCode::METHOD_NOT_ALLOWED | StatusCode::NOT_IMPLEMENTED | StatusCode::BAD_REQUEST | StatusCode::FORBIDDEN
        );
        if !rejected {
            return Ok(head);
        }
        tracing::debug!(%url, status = head.0.as_u16(), "HEAD rejected, retrying with ranged GET");
        self.send(url, Method::GET).await
    }

    async fn send(&self, url: &Url, method: Method) -> Result<(StatusCode, reqwest::header::HeaderMap), UnresolvedReason> {
        let _slot = self.pace(url).await;
        let mut req = self.client.request(method.clone(), url.clone());
        if method == Method::GET {
            req = req.header(RANGE, "bytes=0-0");
        }
        match req.send().await {
            Ok(resp) => Ok((resp.status(), resp.headers().clone())),
            Err(e) => Err(reason_of(&e)),
        }
    }

    /// Waits for the host's turn; the returned guard keeps other requests to
    /// the host waiting until it is dropped.
    async fn pace(&self, url: &Url) -> OwnedMutexGuard<Option<Instant>> {
        let key = format!("{}:{}", url.host_str().unwrap_or(""), url.port_or_known_default().unwrap_or(0));
        let slot = self.hosts.lock().expect("host table lock").entry(key).or_default().clone();
        let mut guard = slot.lock_owned().await;
        if let Some(last) = *guard {
            tokio::time::sleep_until(last + self.policy.per_host_delay).await;
        }
        *guard = Some(Instant::now());
        guard
    }
}

fn reason_of(e: &reqwest::Error) -> UnresolvedReason {
    if e.is_timeout() {
        return UnresolvedReason::Timeout;
    }
    let mut chain = String::new();
    let mut source = e.source();
    while let Some(s) = source {
        chain.push_str(&s.to_string().to_ascii_lowercase());
        chain.push(' ');
        if let Some(io) = s.downcast_ref::<std::io::Error>() {
            match io.kind() {
                std::io::ErrorKind::ConnectionRefused => return UnresolvedReason::Refused,
                std::io::ErrorKind::TimedOut => return UnresolvedReason::Timeout,
                _ => {}
            }
        }
        source = s.source();
    }
    if chain.contains("dns") || chain.contains("lookup address") || chain.contains("name or service not known") {
        UnresolvedReason::Dns
    } else if e.is_connect() {
        UnresolvedReason::Refused
    } else {
        UnresolvedReason::Other(e.to_string())
    }
}
