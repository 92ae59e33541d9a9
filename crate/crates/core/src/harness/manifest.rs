//! Run manifest: config echo, seeds and an inventory of the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Running,
    Complete,
    /// Outputs were written but a numerical invariant failed.
    InvariantViolation,
    /// Stopped early; the listed files are partial.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    /// Data rows for CSV files (header and `#` lines excluded).
    pub rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub status: RunStatus,
    pub error: Option<String>,
    pub config: String,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub threads: usize,
    pub variants: Vec<String>,
    /// Seed of realization `i`, shared by every random variant.
    pub seeds: Vec<u64>,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let p = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), reason: e.to_string() })
    }

    /// Rebuilds the inventory from `dir` and writes the manifest into it.
    pub fn write(&mut self, dir: &Path) -> Result<()> {
        let mut files = Vec::new();
        collect(dir, dir, &mut files)?;
        if !files.iter().any(|f| f.path == MANIFEST_FILE) {
            files.push(FileEntry { path: MANIFEST_FILE.into(), rows: None });
        }
        files.sort_by(|a, b| a.path.cmp(&b.path));
        self.files = files;
        let p = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&p, text + "\n").map_err(|e| Error::io(&p, e))
    }
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<FileEntry>) -> Result<()> {
    let mut entries: Vec<PathBuf> =
        fs::read_dir(dir).map_err(|e| Error::io(dir, e))?.filter_map(|e| e.ok().map(|e| e.path())).collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect(root, &p, out)?;
            continue;
        }
        let rel = p.strip_prefix(root).expect("inside root");
        let rel = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        let rows = if p.extension().is_some_and(|e| e == "csv") {
            let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            Some(text.lines().filter(|l| !l.starts_with('#')).count().saturating_sub(1))
        } else {
            None
        };
        out.push(FileEntry { path: rel, rows });
    }
    Ok(())
}

/// Deletes the files a previous manifest in `dir` listed, so reruns start clean.
pub fn remove_previous(dir: &Path) -> Result<()> {
    let Ok(old) = RunManifest::load(dir) else { return Ok(()) };
    for f in old.files {
        if f.path.split('/').any(|c| c == ".." || c.is_empty()) {
            continue;
        }
        let p = dir.join(&f.path);
        if p.is_file() {
            fs::remove_file(&p).map_err(|e| Error::io(&p, e))?;
        }
    }
    Ok(())
}
