//! Append-friendly result cache: one semicolon-separated row per computed
//! constant, human-inspectable and diff-friendly.
//!
//! Layout: a header line carrying the format version, a column-name line,
//! then rows `group;k;value;witness;method;version;timestamp`. Rows are
//! appended; on load, the last row per (group, k) wins. Cached witnesses are
//! re-verified before use and rejected (with a reason) when they fail, so a
//! corrupted or stale cache degrades to recomputation, never to a wrong
//! answer. File access is serialized across processes with an advisory lock.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::os::unix::io::AsRawFd;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};

use crate::engine::{has_k_barycentric_subset, BoResult, Method};
use crate::error::{Error, Result};
use crate::group::{ElementSet, FiniteAbelianGroup};

pub const CACHE_FORMAT: &str = "baryolson-cache-v1";
const COLUMNS: &str = "group;k;value;witness;method;version;timestamp";

/// Environment variable naming the default cache file.
pub const CACHE_ENV_VAR: &str = "BARYOLSON_CACHE";

/// Cache path from the environment, or `baryolson-cache.csv` in the working
/// directory.
pub fn default_cache_path() -> PathBuf {
    std::env::var_os(CACHE_ENV_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("baryolson-cache.csv"))
}

/// One cached computation, exactly as stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub group_key: String,
    pub k: u64,
    pub value: u64,
    pub witness: String,
    pub method: Method,
    pub version: String,
    pub timestamp: String,
}

impl CacheEntry {
    fn to_row(&self) -> String {
        format!(
            "{};{};{};{};{};{};{}",
            self.group_key, self.k, self.value, self.witness, self.method, self.version,
            self.timestamp
        )
    }

    fn parse_row(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split(';').collect();
        if fields.len() != 7 {
            return Err(Error::Cache(format!(
                "expected 7 fields, got {}: {line:?}",
                fields.len()
            )));
        }
        Ok(CacheEntry {
            group_key: fields[0].to_string(),
            k: fields[1]
                .parse()
                .map_err(|_| Error::Cache(format!("bad k in {line:?}")))?,
            value: fields[2]
                .parse()
                .map_err(|_| Error::Cache(format!("bad value in {line:?}")))?,
            witness: fields[3].to_string(),
            method: fields[4]
                .parse()
                .map_err(|_| Error::Cache(format!("bad method in {line:?}")))?,
            version: fields[5].to_string(),
            timestamp: fields[6].to_string(),
        })
    }
}

/// Result of a verified cache lookup.
#[derive(Debug)]
pub enum Lookup {
    Hit(BoResult),
    Miss,
    Rejected(String),
}

pub struct Cache {
    path: PathBuf,
    entries: BTreeMap<(String, u64), CacheEntry>,
    /// Rows that failed to parse on load, with reasons.
    pub load_warnings: Vec<String>,
}

fn flock(file: &File, operation: libc::c_int) -> Result<()> {
    if unsafe { libc::flock(file.as_raw_fd(), operation) } != 0 {
        return Err(Error::Cache(format!(
            "flock failed: {}",
            std::io::Error::last_os_error()
        )));
    }
    Ok(())
}

impl Cache {
    /// Load the cache at `path`; a missing file is an empty cache. Rows that
    /// fail to parse are rejected and reported in `load_warnings`.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut cache = Cache {
            path,
            entries: BTreeMap::new(),
            load_warnings: Vec::new(),
        };
        let mut file = match File::open(&cache.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e.into()),
        };
        flock(&file, libc::LOCK_SH)?;
        let mut text = String::new();
        let read = file.read_to_string(&mut text);
        flock(&file, libc::LOCK_UN)?;
        read?;

        let mut lines = text.lines();
        match lines.next() {
            Some(header) if header.trim() == format!("# format: {CACHE_FORMAT}") => {}
            Some(header) => {
                return Err(Error::Cache(format!(
                    "unrecognized cache header {header:?} (expected format {CACHE_FORMAT})"
                )))
            }
            None => return Ok(cache),
        }
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line == COLUMNS {
                continue;
            }
            match CacheEntry::parse_row(line) {
                Ok(entry) => {
                    cache
                        .entries
                        .insert((entry.group_key.clone(), entry.k), entry);
                }
                Err(e) => cache.load_warnings.push(e.to_string()),
            }
        }
        Ok(cache)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, group_key: &str, k: u64) -> Option<&CacheEntry> {
        self.entries.get(&(group_key.to_string(), k))
    }

    /// Look up (G, k), re-verifying the stored witness and value bounds.
    /// Entries from other tool versions, with out-of-range values, or whose
    /// witness fails re-verification are rejected with a reason.
    pub fn lookup(&self, group: &FiniteAbelianGroup, k: u64) -> Lookup {
        let key = group.to_string();
        let Some(entry) = self.get(&key, k) else {
            return Lookup::Miss;
        };
        let current = env!("CARGO_PKG_VERSION");
        if entry.version != current {
            return Lookup::Rejected(format!(
                "cached by version {} (running {current})",
                entry.version
            ));
        }
        let n = group.order();
        if entry.value < k.min(n + 1) || entry.value > n + 1 {
            return Lookup::Rejected(format!(
                "cached value {} outside [{}, {}]",
                entry.value,
                k.min(n + 1),
                n + 1
            ));
        }
        let witness = match ElementSet::parse_element_list(group.clone(), &entry.witness) {
            Ok(w) => w,
            Err(e) => return Lookup::Rejected(format!("unparsable witness: {e}")),
        };
        let expect_len = (entry.value - 1).min(n);
        if witness.len() as u64 != expect_len {
            return Lookup::Rejected(format!(
                "witness has {} elements, expected {expect_len}",
                witness.len()
            ));
        }
        if has_k_barycentric_subset(&witness, k) {
            return Lookup::Rejected("stored witness contains a k-barycentric subset".to_string());
        }
        Lookup::Hit(BoResult {
            group: group.clone(),
            k,
            value: entry.value,
            witness,
            method: Method::Cached,
            elapsed: std::time::Duration::ZERO,
        })
    }

    /// Append a computed result and remember it in memory.
    pub fn put(&mut self, result: &BoResult) -> Result<()> {
        let entry = CacheEntry {
            group_key: result.group.to_string(),
            k: result.k,
            value: result.value,
            witness: result.witness.element_list_string(),
            method: result.method,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        };
        self.append_row(&entry)?;
        self.entries
            .insert((entry.group_key.clone(), entry.k), entry);
        Ok(())
    }

    fn append_row(&self, entry: &CacheEntry) -> Result<()> {
        if let Some(parent) = self.path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        flock(&file, libc::LOCK_EX)?;
        // decide on the header under the lock
        let fresh = file.metadata().map(|m| m.len() == 0).unwrap_or(false);
        let mut payload = String::new();
        if fresh {
            payload.push_str(&format!("# format: {CACHE_FORMAT}\n{COLUMNS}\n"));
        }
        payload.push_str(&entry.to_row());
        payload.push('\n');
        let write = file.write_all(payload.as_bytes()).and_then(|_| file.flush());
        flock(&file, libc::LOCK_UN)?;
        write?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{bo_exhaustive, SearchConfig};

    fn compute(n: u64, k: u64) -> BoResult {
        let group = FiniteAbelianGroup::cyclic(n).unwrap();
        bo_exhaustive(&group, k, &SearchConfig::default()).unwrap()
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.csv");

        let result = compute(7, 3);
        let mut cache = Cache::open(&path).unwrap();
        cache.put(&result).unwrap();

        let reloaded = Cache::open(&path).unwrap();
        assert!(reloaded.load_warnings.is_empty());
        let entry = reloaded.get("7", 3).unwrap();
        assert_eq!(entry.value, 4);
        assert_eq!(entry.witness, result.witness.element_list_string());
        assert_eq!(entry.method, Method::Exhaustive);
        // the in-memory view and the reloaded file agree field for field
        assert_eq!(entry, cache.get("7", 3).unwrap());

        let group = FiniteAbelianGroup::cyclic(7).unwrap();
        match reloaded.lookup(&group, 3) {
            Lookup::Hit(hit) => {
                assert_eq!(hit.value, 4);
                assert_eq!(hit.method, Method::Cached);
                assert_eq!(hit.witness, result.witness);
            }
            other => panic!("expected a hit, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.csv");

        let mut cache = Cache::open(&path).unwrap();
        cache.put(&compute(7, 3)).unwrap();
        cache.put(&compute(7, 4)).unwrap();

        // garble one row and add junk
        let text = std::fs::read_to_string(&path).unwrap();
        let garbled = text.replace("7;4;5", "7;4;banana") + "not;a;row\n";
        std::fs::write(&path, garbled).unwrap();

        let reloaded = Cache::open(&path).unwrap();
        assert_eq!(reloaded.load_warnings.len(), 2);
        assert!(reloaded.get("7", 3).is_some());
        assert!(reloaded.get("7", 4).is_none());
    }

    #[test]
    fn tampered_witness_is_rejected_on_lookup() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.csv");

        let mut cache = Cache::open(&path).unwrap();
        cache.put(&compute(7, 3)).unwrap();
        // {0,1,2} is an arithmetic progression, hence 3-barycentric
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replace("0,1,3", "0,1,2")).unwrap();

        let reloaded = Cache::open(&path).unwrap();
        let group = FiniteAbelianGroup::cyclic(7).unwrap();
        assert!(matches!(
            reloaded.lookup(&group, 3),
            Lookup::Rejected(reason) if reason.contains("barycentric")
        ));
    }

    #[test]
    fn foreign_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.csv");

        let mut cache = Cache::open(&path).unwrap();
        cache.put(&compute(7, 3)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replace(env!("CARGO_PKG_VERSION"), "0.0.0-other")).unwrap();

        let reloaded = Cache::open(&path).unwrap();
        let group = FiniteAbelianGroup::cyclic(7).unwrap();
        assert!(matches!(reloaded.lookup(&group, 3), Lookup::Rejected(_)));
    }

    #[test]
    fn bad_header_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.csv");
        std::fs::write(&path, "something else\n7;3;4;0,1,3;exhaustive;x;t\n").unwrap();
        assert!(Cache::open(&path).is_err());
    }

    #[test]
    fn last_row_wins() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.csv");

        let mut cache = Cache::open(&path).unwrap();
        cache.put(&compute(7, 3)).unwrap();
        cache.put(&compute(7, 3)).unwrap();
        let reloaded = Cache::open(&path).unwrap();
        assert_eq!(reloaded.len(), 1);
    }
}
