//! Content-addressed on-disk cache for computed cells.
//!
//! An entry lives at `<dir>/<sha256(key)>.json` and stores the full key next
//! to the value. Keys include [`CODE_VERSION`], so a version bump orphans
//! old entries instead of reading them. Unreadable or mismatched entries are
//! recomputed and overwritten, with a warning on stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Bump when cached values would change meaning.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+cells1");

pub const ENV_VAR: &str = "LAMBDA_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
    version: String,
}

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    key: String,
    value: T,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self::with_version(dir, CODE_VERSION)
    }

    pub fn with_version(dir: impl Into<PathBuf>, version: &str) -> Self {
        Cache { dir: dir.into(), version: version.to_string() }
    }

    /// `--cache-dir` wins over the environment; no directory means no cache.
    pub fn from_flag_or_env(flag: Option<&Path>) -> Option<Cache> {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from))
            .map(Cache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn full_key(&self, key: &str) -> String {
        format!("{}|{}", self.version, key)
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(self.full_key(key).as_bytes());
        self.dir.join(format!("{}.json", hex::encode(digest)))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let path = self.path_for(key);
        let bytes = fs::read(&path).ok()?;
        match serde_json::from_slice::<Entry<T>>(&bytes) {
            Ok(e) if e.key == self.full_key(key) => Some(e.value),
            Ok(_) => {
                eprintln!("warning: cache entry {} has a different key; recomputing", path.display());
                None
            }
            Err(err) => {
                eprintln!("warning: corrupt cache entry {} ({err}); recomputing", path.display());
                None
            }
        }
    }

    /// Best effort: write failures only produce a warning.
    pub fn put<T: Serialize>(&self, key: &str, value: &T) {
        let entry = Entry { key: self.full_key(key), value };
        let write = || -> std::io::Result<()> {
            fs::create_dir_all(&self.dir)?;
            let path = self.path_for(key);
            let mut tmp = tempfile_in(&self.dir)?;
            tmp.1.write_all(&serde_json::to_vec(&entry)?)?;
            drop(tmp.1);
            fs::rename(&tmp.0, &path)
        };
        if let Err(e) = write() {
            eprintln!("warning: could not write cache entry for {key}: {e}");
        }
    }

    pub fn get_or_compute<T, F>(&self, key: &str, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        if let Some(v) = self.get(key) {
            return Ok(v);
        }
        let v = compute()?;
        self.put(key, &v);
        Ok(v)
    }
}

fn tempfile_in(dir: &Path) -> std::io::Result<(PathBuf, fs::File)> {
    use std::sync::atomic::{AtomicU64, Ordering};
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    let path = dir.join(format!(".tmp-{}-{n}", std::process::id()));
    let f = fs::File::create(&path)?;
    Ok((path, f))
}
