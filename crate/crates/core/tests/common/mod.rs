#![allow(dead_code)]

pub mod interp;
pub mod laws;
pub mod oracle;

use std::path::PathBuf;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// `.sol` files directly inside a fixture subdirectory, sorted.
pub fn fixture_files(dir: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixtures().join(dir))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "sol"))
        .collect();
    files.sort();
    files
}

pub fn all_fixture_files() -> Vec<PathBuf> {
    ["corpus", "patched", "extra"].iter().flat_map(|d| fixture_files(d)).collect()
}

pub fn read(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap()
}
