//! Shared test support: fixture paths, generators and reference implementations.

use std::path::{Path, PathBuf};

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

pub fn read_fixture(name: &str) -> Vec<u8> {
    let path = fixture(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}

pub fn read_fixture_str(name: &str) -> String {
    String::from_utf8(read_fixture(name)).expect("fixture is UTF-8")
}

pub mod dedup;
pub mod portal;
pub mod gen;
pub mod sparql;
pub mod oxrdf;
pub mod http;
