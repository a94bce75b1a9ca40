//! Content-addressed spectrum cache: one `<manifest hash>.json` file per
//! run in a flat directory.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunManifest;
use crate::error::{Error, Result};
use crate::spectra::SpectralResult;

#[derive(Serialize, Deserialize)]
struct Entry {
    manifest: RunManifest,
    result: SpectralResult,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entry_path(&self, manifest: &RunManifest) -> PathBuf {
        self.dir.join(format!("{}.json", manifest.hash()))
    }

    /// A hit only if the stored manifest equals `manifest`. Unreadable or
    /// corrupt entries are misses.
    pub fn lookup(&self, manifest: &RunManifest) -> Option<SpectralResult> {
        let path = self.entry_path(manifest);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                log::warn!("cache entry {} unreadable, ignoring: {e}", path.display());
                return None;
            }
        };
        match serde_json::from_slice::<Entry>(&bytes) {
            Ok(entry) if entry.manifest == *manifest => Some(entry.result),
            Ok(_) => {
                log::warn!("cache entry {} belongs to a different manifest, ignoring", path.display());
                None
            }
            Err(e) => {
                log::warn!("cache entry {} is corrupt, ignoring: {e}", path.display());
                None
            }
        }
    }

    /// Write to a temporary file in the cache directory, then rename.
    pub fn store(&self, manifest: &RunManifest, result: &SpectralResult) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let path = self.entry_path(manifest);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let entry = EntryRef { manifest, result };
        serde_json::to_writer(&mut tmp, &entry)?;
        tmp.flush().map_err(|e| Error::io(tmp.path(), e))?;
        tmp.persist(&path).map_err(|e| Error::io(&path, e.error))?;
        Ok(path)
    }
}

#[derive(Serialize)]
struct EntryRef<'a> {
    manifest: &'a RunManifest,
    result: &'a SpectralResult,
}
