//! Content-addressed result cache.
//!
//! Entries live at `<dir>/<sha256>.json` and are written once through a
//! temporary file and a rename.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
pub const ENV_VAR: &str = "QUASIRAND_CACHE_DIR";

#[derive(Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub request: Value,
    pub result: Value,
    pub tool_version: String,
    pub timestamp: u64,
}

pub struct Cache {
    dir: PathBuf,
}

/// Canonical request text: the tool version plus the request document with
/// sorted keys.
pub fn canonical_request(request: &Value) -> String {
    fn sorted(v: &Value) -> Value {
        match v {
            Value::Object(m) => {
                let mut keys: Vec<_> = m.keys().collect();
                keys.sort();
                let mut out = serde_json::Map::new();
                for k in keys {
                    out.insert(k.clone(), sorted(&m[k]));
                }
                Value::Object(out)
            }
            Value::Array(a) => Value::Array(a.iter().map(sorted).collect()),
            other => other.clone(),
        }
    }
    format!("{TOOL_VERSION}\n{}", sorted(request))
}

pub fn key_for(request: &Value) -> String {
    hex::encode(Sha256::digest(canonical_request(request).as_bytes()))
}

impl Cache {
    /// The environment variable wins over the flag; no directory means no cache.
    pub fn resolve(flag: Option<&Path>, disabled: bool) -> Option<Cache> {
        if disabled {
            return None;
        }
        let dir = std::env::var_os(ENV_VAR)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| flag.map(Path::to_path_buf))?;
        Some(Cache { dir })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, request: &Value) -> Option<Value> {
        let key = key_for(request);
        let text = std::fs::read(self.path(&key)).ok()?;
        let entry: CacheEntry = serde_json::from_slice(&text).ok()?;
        (entry.key == key && entry.tool_version == TOOL_VERSION).then_some(entry.result)
    }

    pub fn put(&self, request: &Value, result: &Value) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let key = key_for(request);
        let final_path = self.path(&key);
        if final_path.exists() {
            return Ok(());
        }
        let entry = CacheEntry {
            key,
            request: request.clone(),
            result: result.clone(),
            tool_version: TOOL_VERSION.to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        serde_json::to_writer(&mut tmp, &entry).map_err(|e| CliError::Internal(e.to_string()))?;
        tmp.flush()?;
        tmp.persist(&final_path).map_err(|e| CliError::io(&final_path, e.error))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_ignore_field_order() {
        let a = json!({"command": "clique", "p": 9, "f": "x-y"});
        let b = json!({"f": "x-y", "p": 9, "command": "clique"});
        assert_eq!(key_for(&a), key_for(&b));
        assert_ne!(key_for(&a), key_for(&json!({"command": "clique", "p": 13, "f": "x-y"})));
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache { dir: dir.path().to_path_buf() };
        let req = json!({"command": "bounds", "theta": 0.75});
        assert!(cache.get(&req).is_none());
        cache.put(&req, &json!({"ell": 0.3})).unwrap();
        assert_eq!(cache.get(&req), Some(json!({"ell": 0.3})));
        let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
    }
}
