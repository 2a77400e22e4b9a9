//! A minimal HTTP/1.1 server with canned routes for link-check tests.
//!
//! Routes:
//! - `/media/<type>/<subtype>/<any>`: 200 with that Content-Type
//! - `/nohead/<any>`: HEAD gets 405, a ranged GET gets 206 application/pdf
//! - `/redirect/<n>`: 302 chain of n hops ending at an HTML page
//! - `/status/<code>`: that status
//! - `/slow`: accepts the request and never answers

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::{TcpListener, TcpStream};

#[derive(Debug, Clone)]
pub struct Hit {
    pub at: Instant,
    pub method: String,
    pub path: String,
}

pub struct FixtureServer {
    pub addr: SocketAddr,
    pub hits: Arc<Mutex<Vec<Hit>>>,
}

impl FixtureServer {
    pub fn url(&self, path: &str) -> String {
        format!("http://{}{path}", self.addr)
    }

    pub fn hits(&self) -> Vec<Hit> {
        self.hits.lock().unwrap().clone()
    }
}

pub async fn spawn_fixture_server() -> FixtureServer {
    let listener = TcpListener::bind("127.0.0.1:0").await.expect("bind loopback");
    let addr = listener.local_addr().unwrap();
    let hits: Arc<Mutex<Vec<Hit>>> = Arc::default();
    let log = hits.clone();
    tokio::spawn(async move {
        while let Ok((stream, _)) = listener.accept().await {
            tokio::spawn(serve(stream, log.clone()));
        }
    });
    FixtureServer { addr, hits }
}

/// A loopback address with nothing listening.
pub async fn closed_port() -> SocketAddr {
    let l = TcpListener::bind("127.0.0.1:0").await.unwrap();
    l.local_addr().unwrap()
}

async fn serve(mut stream: TcpStream, log: Arc<Mutex<Vec<Hit>>>) {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 1024];
    while !buf.windows(4).any(|w| w == b"\r\n\r\n") {
        match stream.read(&mut chunk).await {
            Ok(0) | Err(_) => return,
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
        }
    }
    let head = String::from_utf8_lossy(&buf).to_string();
    let mut first = head.lines().next().unwrap_or("").split_whitespace();
    let method = first.next().unwrap_or("").to_string();
    let path = first.next().unwrap_or("/").to_string();
    let ranged = head.lines().any(|l| l.to_ascii_lowercase().starts_with("range:"));
    log.lock().unwrap().push(Hit {
        at: Instant::now(),
        method: method.clone(),
        path: path.clone(),
    });

    let parts: Vec<&str> = path.trim_start_matches('/').split('/').collect();
    let (code, headers): (u16, Vec<(String, String)>) = match parts.as_slice() {
        ["media", t, s, ..] => (200, vec![("Content-Type".into(), format!("{t}/{s}; charset=utf-8"))]),
        ["nohead", ..] if method == "HEAD" => (405, vec![]),
        ["nohead", ..] => (if ranged { 206 } else { 200 }, vec![("Content-Type".into(), "application/pdf".into())]),
        ["redirect", n] => {
            let n: u32 = n.parse().unwrap_or(0);
            let next = if n <= 1 { "/media/text/html/end".to_string() } else { format!("/redirect/{}", n - 1) };
            (302, vec![("Location".into(), next)])
        }
        ["status", c] => (c.parse().unwrap_or(500), vec![]),
        ["slow"] => {
            tokio::time::sleep(Duration::from_secs(3600)).await;
            return;
        }
        _ => (404, vec![]),
    };
    let mut resp = format!("HTTP/1.1 {code} X\r\nContent-Length: 0\r\nConnection: close\r\n");
    for (k, v) in headers {
        resp.push_str(&format!("{k}: {v}\r\n"));
    }
    resp.push_str("\r\n");
    let _ = stream.write_all(resp.as_bytes()).await;
    let _ = stream.shutdown().await;
}

/// Nineteen live URLs with a spread of media types, one through a redirect
/// chain and one behind a HEAD-rejecting route, plus one that times out.
pub fn linkcheck_fixture_urls(server: &FixtureServer) -> Vec<String> {
    let mut paths: Vec<String> = (0..9).map(|i| format!("/media/text/html/{i}")).collect();
    paths.extend(
        [
            "/media/application/rdf+xml/a",
            "/media/application/rdf+xml/b",
            "/media/image/jpeg/c",
            "/media/application/xml/d",
            "/media/text/plain/e",
            "/media/text/xml/f",
            "/media/application/zip/g",
            "/media/image/png/h",
            "/nohead/report.pdf",
            "/redirect/2",
            "/slow",
        ]
        .map(String::from),
    );
    paths.iter().map(|p| server.url(p)).collect()
}
