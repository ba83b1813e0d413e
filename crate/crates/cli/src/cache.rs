//! Content-addressed cache of generated return sets.
//!
//! Entries are `<sha256 of the source description>.rts`: the RTS text plus a
//! trailing `# checksum: <sha256 of the preceding bytes>` line.

use std::path::{Path, PathBuf};

use rtrecon_core::orbit::ReturnSet;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

const CHECKSUM_PREFIX: &str = "# checksum: ";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    /// An entry existed but failed its checksum or did not parse.
    Corrupt,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn seal(rts: &str) -> String {
    format!("{rts}{CHECKSUM_PREFIX}{}\n", sha256_hex(rts.as_bytes()))
}

/// Verifies the checksum line and parses the body.
fn unseal(text: &str) -> Option<ReturnSet> {
    let body_end = text.trim_end_matches('\n').rfind('\n').map_or(0, |i| i + 1);
    let (body, last) = text.split_at(body_end);
    let sum = last.trim_end().strip_prefix(CHECKSUM_PREFIX)?;
    if sum != sha256_hex(body.as_bytes()) {
        return None;
    }
    ReturnSet::from_rts(body).ok()
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(description: &str) -> String {
        sha256_hex(description.as_bytes())
    }

    pub fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.rts"))
    }

    pub fn get(&self, key: &str) -> (Lookup, Option<ReturnSet>) {
        match std::fs::read_to_string(self.entry_path(key)) {
            Err(_) => (Lookup::Miss, None),
            Ok(text) => match unseal(&text) {
                Some(r) => (Lookup::Hit, Some(r)),
                None => (Lookup::Corrupt, None),
            },
        }
    }

    pub fn put(&self, key: &str, r: &ReturnSet) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let path = self.entry_path(key);
        let tmp = self.dir.join(format!("{key}.rts.tmp"));
        std::fs::write(&tmp, seal(&r.to_rts())).map_err(|e| CliError::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))
    }

    /// Returns the cached set for `key`, or computes and stores it. A corrupt
    /// entry produces a warning and is overwritten.
    pub fn get_or_compute(
        &self,
        key: &str,
        warnings: &mut Vec<String>,
        compute: impl FnOnce() -> Result<ReturnSet>,
    ) -> Result<(ReturnSet, Lookup)> {
        let (status, hit) = self.get(key);
        if let Some(r) = hit {
            return Ok((r, status));
        }
        if status == Lookup::Corrupt {
            warnings.push(format!(
                "cache entry {} failed its checksum; recomputing",
                self.entry_path(key).display()
            ));
        }
        let r = compute()?;
        self.put(key, &r)?;
        Ok((r, status))
    }

    /// Removes corrupt entries, or every entry with `all`. Returns the removed paths.
    pub fn gc(&self, all: bool) -> Result<Vec<PathBuf>> {
        let mut removed = Vec::new();
        let entries = match std::fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(removed),
            Err(e) => return Err(CliError::io(&self.dir, e)),
        };
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "rts" || x == "tmp"))
            .collect();
        paths.sort();
        for p in paths {
            let stale = all
                || p.extension().is_some_and(|x| x == "tmp")
                || std::fs::read_to_string(&p).ok().and_then(|t| unseal(&t)).is_none();
            if stale {
                std::fs::remove_file(&p).map_err(|e| CliError::io(&p, e))?;
                removed.push(p);
            }
        }
        Ok(removed)
    }
}

#[cfg(test)]
mod tests {
    use rtrecon_core::orbit::Window;

    use super::*;

    fn sample() -> ReturnSet {
        ReturnSet::from_members(Window::new(0, 19).unwrap(), [1, 2, 4, 8, 11]).unwrap()
    }

    #[test]
    fn miss_then_hit() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = Cache::key("example");
        let mut warnings = Vec::new();
        let (r, s) = cache.get_or_compute(&key, &mut warnings, || Ok(sample())).unwrap();
        assert_eq!(s, Lookup::Miss);
        let (r2, s2) = cache
            .get_or_compute(&key, &mut warnings, || panic!("should be cached"))
            .unwrap();
        assert_eq!(s2, Lookup::Hit);
        assert!(r.same_bits(&r2));
        assert!(warnings.is_empty());
    }

    #[test]
    fn corrupt_entry_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = Cache::key("example");
        cache.put(&key, &sample()).unwrap();
        let path = cache.entry_path(&key);
        let text = std::fs::read_to_string(&path).unwrap().replacen("RTS v1 0 19", "RTS v1 0 18", 1);
        std::fs::write(&path, text).unwrap();

        let mut warnings = Vec::new();
        let (r, s) = cache.get_or_compute(&key, &mut warnings, || Ok(sample())).unwrap();
        assert_eq!(s, Lookup::Corrupt);
        assert_eq!(warnings.len(), 1);
        assert!(r.same_bits(&sample()));
        assert_eq!(cache.get(&key).0, Lookup::Hit);
    }

    #[test]
    fn gc_removes_only_corrupt_entries() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        cache.put("good", &sample()).unwrap();
        std::fs::write(cache.entry_path("bad"), "RTS v1 0 3 1\n1,1,2\n").unwrap();
        let removed = cache.gc(false).unwrap();
        assert_eq!(removed, vec![cache.entry_path("bad")]);
        assert_eq!(cache.get("good").0, Lookup::Hit);
        assert_eq!(cache.gc(true).unwrap().len(), 1);
        assert_eq!(cache.get("good").0, Lookup::Miss);
    }
}
