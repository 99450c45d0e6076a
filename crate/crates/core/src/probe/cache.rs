use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ProbeError, Result};

pub const CACHE_FILE: &str = "cache.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub backend: String,
    pub response: String,
    /// Unix seconds when the response was first obtained.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

/// Append-only JSON Lines response store.
///
/// Lookups are served from memory; new entries go through a single locked
/// writer and are flushed line by line.
pub struct ResponseCache {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<String, CacheEntry>>,
    writer: Option<Mutex<File>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

/// Stable hash of the fields that determine a response.
///
/// Retries after an unparseable reply (attempt > 0) get their own key so
/// they are not answered from the cache with the same reply.
pub fn cache_key(fingerprint: &str, prompt: &str, persona: Option<u64>, seed: u64, attempt: u32) -> String {
    let mut h = Sha256::new();
    for field in [fingerprint.as_bytes(), prompt.as_bytes()] {
        h.update((field.len() as u64).to_le_bytes());
        h.update(field);
    }
    match persona {
        Some(id) => {
            h.update([1]);
            h.update(id.to_le_bytes());
        }
        None => h.update([0]),
    }
    h.update(seed.to_le_bytes());
    if attempt > 0 {
        h.update(attempt.to_le_bytes());
    }
    hex::encode(h.finalize())
}

impl ResponseCache {
    pub fn in_memory() -> Self {
        ResponseCache {
            path: None,
            entries: RwLock::new(HashMap::new()),
            writer: None,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    /// Opens (or creates) `<dir>/cache.jsonl`.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let path = dir.join(CACHE_FILE);
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheEntry>(&line) {
                    Ok(entry) => {
                        entries.entry(entry.key.clone()).or_insert(entry);
                    }
                    Err(e) => log::warn!("{}:{}: skipping unreadable cache line ({e})", path.display(), i + 1),
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(|e| ProbeError::Cache {
            path: path.clone(),
            message: e.to_string(),
        })?;
        Ok(ResponseCache {
            path: Some(path),
            entries: RwLock::new(entries),
            writer: Some(Mutex::new(file)),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Looks up a key, counting the hit or miss.
    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        let found = self.entries.read().expect("cache lock").get(key).cloned();
        let counter = if found.is_some() { &self.hits } else { &self.misses };
        counter.fetch_add(1, Ordering::Relaxed);
        found
    }

    /// Stores an entry unless the key is already present; returns the
    /// entry that ends up cached.
    pub fn insert(&self, entry: CacheEntry) -> Result<CacheEntry> {
        let mut entries = self.entries.write().expect("cache lock");
        if let Some(existing) = entries.get(&entry.key) {
            return Ok(existing.clone());
        }
        if let Some(writer) = &self.writer {
            let mut line = serde_json::to_string(&entry).expect("entry serializes");
            line.push('\n');
            let mut file = writer.lock().expect("cache writer lock");
            file.write_all(line.as_bytes()).and_then(|_| file.flush()).map_err(|e| ProbeError::Cache {
                path: self.path.clone().unwrap_or_default(),
                message: e.to_string(),
            })?;
        }
        entries.insert(entry.key.clone(), entry.clone());
        Ok(entry)
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats { hits: self.hits.load(Ordering::Relaxed), misses: self.misses.load(Ordering::Relaxed) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(key: &str, response: &str) -> CacheEntry {
        CacheEntry { key: key.into(), backend: "b".into(), response: response.into(), timestamp: 1 }
    }

    #[test]
    fn persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        {
            let cache = ResponseCache::open(dir.path()).unwrap();
            cache.insert(entry("k1", "one")).unwrap();
            cache.insert(entry("k1", "ignored")).unwrap();
            cache.insert(entry("k2", "two")).unwrap();
        }
        let text = std::fs::read_to_string(dir.path().join(CACHE_FILE)).unwrap();
        assert_eq!(text.lines().count(), 2);
        let cache = ResponseCache::open(dir.path()).unwrap();
        assert_eq!(cache.get("k1").unwrap().response, "one");
        assert!(cache.get("k3").is_none());
        assert_eq!(cache.stats(), CacheStats { hits: 1, misses: 1 });
    }

    #[test]
    fn truncated_line_is_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let line = serde_json::to_string(&entry("k", "v")).unwrap();
        std::fs::write(dir.path().join(CACHE_FILE), format!("{line}\n{{\"key\":\"tr")).unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn key_fields_matter() {
        let base = cache_key("fp", "prompt", Some(1), 7, 0);
        assert_eq!(base, cache_key("fp", "prompt", Some(1), 7, 0));
        assert_ne!(base, cache_key("fp", "prompt", Some(2), 7, 0));
        assert_ne!(base, cache_key("fp", "prompt", Some(1), 8, 0));
        assert_ne!(base, cache_key("fp2", "prompt", Some(1), 7, 0));
        assert_ne!(base, cache_key("fp", "prompt", None, 7, 0));
        assert_ne!(base, cache_key("fp", "prompt", Some(1), 7, 1));
        assert_ne!(cache_key("ab", "c", None, 0, 0), cache_key("a", "bc", None, 0, 0));
    }
}
