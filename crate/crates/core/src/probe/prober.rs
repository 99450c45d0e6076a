use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use super::cache::cache_key;
use super::{Backend, BackendConfig, CacheEntry, CacheStats, ProbeError, Request, ResponseCache, Result, RetryPolicy};
use crate::persona::Persona;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub cache_key: String,
    pub timestamp: u64,
    pub cached: bool,
}

/// Backend plus cache, retry policy and a bounded worker pool.
pub struct Prober {
    backend: Box<dyn Backend>,
    fingerprint: String,
    cache: ResponseCache,
    retry: RetryPolicy,
    seed: u64,
    pool: rayon::ThreadPool,
    backend_calls: AtomicU64,
}

impl Prober {
    pub fn new(backend: Box<dyn Backend>, cache: ResponseCache, retry: RetryPolicy, max_parallel: usize, seed: u64) -> Result<Self> {
        if max_parallel == 0 {
            return Err(ProbeError::Config("max_parallel must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(max_parallel)
            .build()
            .map_err(|e| ProbeError::Config(e.to_string()))?;
        Ok(Prober {
            fingerprint: backend.fingerprint(),
            backend,
            cache,
            retry,
            seed,
            pool,
            backend_calls: AtomicU64::new(0),
        })
    }

    /// Builds the configured backend with a cache under `cache_dir`
    /// (in memory when `None`).
    pub fn from_config(cfg: &BackendConfig, cache_dir: Option<&Path>, seed: u64) -> Result<Self> {
        let cache = match cache_dir {
            Some(dir) => ResponseCache::open(dir)?,
            None => ResponseCache::in_memory(),
        };
        Prober::new(cfg.build()?, cache, cfg.retry.clone(), cfg.max_parallel, seed)
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cache(&self) -> &ResponseCache {
        &self.cache
    }

    pub fn stats(&self) -> CacheStats {
        self.cache.stats()
    }

    /// Requests that actually reached the backend, retries included.
    pub fn backend_calls(&self) -> u64 {
        self.backend_calls.load(Ordering::Relaxed)
    }

    /// Returns the cached reply for this request or asks the backend,
    /// retrying transient failures with exponential backoff.
    pub fn complete(&self, req: &Request<'_>) -> Result<Completion> {
        let key = cache_key(&self.fingerprint, req.prompt, req.persona.map(|p| p.id), req.seed, req.attempt);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(Completion { text: hit.response, cache_key: key, timestamp: hit.timestamp, cached: true });
        }
        let mut retry = 0;
        let text = loop {
            self.backend_calls.fetch_add(1, Ordering::Relaxed);
            let outcome = self.backend.complete(req).and_then(|t| {
                if t.trim().is_empty() {
                    Err(ProbeError::EmptyResponse)
                } else {
                    Ok(t)
                }
            });
            match outcome {
                Ok(text) => break text,
                Err(e) if e.is_transient() && retry < self.retry.max_retries => {
                    log::warn!("transient backend failure ({e}); retry {} of {}", retry + 1, self.retry.max_retries);
                    std::thread::sleep(self.retry.delay(retry));
                    retry += 1;
                }
                Err(e) => return Err(e),
            }
        };
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let stored = self.cache.insert(CacheEntry {
            key: key.clone(),
            backend: self.fingerprint.clone(),
            response: text,
            timestamp,
        })?;
        Ok(Completion { text: stored.response, cache_key: key, timestamp: stored.timestamp, cached: false })
    }

    /// Runs `job` for every persona on the worker pool; results come back
    /// in input order.
    pub fn map_personas<T, F>(&self, personas: &[Persona], job: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&Persona) -> Result<T> + Sync + Send,
    {
        self.pool.install(|| personas.par_iter().map(&job).collect())
    }

    /// Parallel map over arbitrary items on the worker pool, order kept.
    pub fn map_items<I, T, F>(&self, items: &[I], job: F) -> Result<Vec<T>>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> Result<T> + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(&job).collect())
    }
}
