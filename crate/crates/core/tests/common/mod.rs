#![allow(dead_code)]

pub mod lua;

use std::collections::BTreeMap;
use std::io;
use std::path::PathBuf;

use modelforge::pipeline::{FsSources, Sources};

pub fn samples_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/samples")
}

pub fn sample(name: &str) -> PathBuf {
    samples_dir().join(name)
}

pub fn read(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// In-memory files first, then the directory.
pub struct Overlay {
    pub files: BTreeMap<String, String>,
    pub base: FsSources,
}

impl Overlay {
    pub fn new(dir: PathBuf, files: &[(&str, &str)]) -> Self {
        Overlay {
            files: files.iter().map(|(k, v)| ((*k).to_owned(), (*v).to_owned())).collect(),
            base: FsSources { base: dir },
        }
    }
}

impl Sources for Overlay {
    fn read(&self, path: &str) -> io::Result<Vec<u8>> {
        match self.files.get(path) {
            Some(text) => Ok(text.clone().into_bytes()),
            None => self.base.read(path),
        }
    }
}
