//! Content-addressed on-disk cache for finished reports.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coxeter::{CoxeterDatum, PATH_RULE_VERSION};

/// Bumped whenever the record layout or the meaning of a payload changes.
pub const CACHE_FORMAT: u32 = 1;

/// Hex SHA-256 of the format version, datum fingerprint, path rule version,
/// operation and arguments.
pub fn cache_key(op: &str, args: &[String], datum: &CoxeterDatum) -> String {
    let mut h = Sha256::new();
    h.update(format!("soergel-cache/{CACHE_FORMAT}\n"));
    h.update(datum.fingerprint());
    h.update("\n");
    h.update(PATH_RULE_VERSION);
    h.update("\n");
    h.update(op);
    for a in args {
        h.update("\n");
        h.update(a.len().to_string());
        h.update(":");
        h.update(a);
    }
    hex::encode(h.finalize())
}

#[derive(Serialize, Deserialize)]
struct Record {
    format: u32,
    key: String,
    op: String,
    payload: String,
}

pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn open(dir: impl AsRef<Path>) -> io::Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(DiskCache { dir: dir.as_ref().to_path_buf() })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Stored payload, or `None` when missing, unreadable or written by
    /// another format version.
    pub fn get(&self, key: &str) -> Option<String> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let rec: Record = serde_json::from_str(&text).ok()?;
        (rec.format == CACHE_FORMAT && rec.key == key).then_some(rec.payload)
    }

    pub fn put(&self, key: &str, op: &str, payload: &str) -> io::Result<()> {
        let rec = Record { format: CACHE_FORMAT, key: key.to_string(), op: op.to_string(), payload: payload.to_string() };
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, serde_json::to_string(&rec)?)?;
        fs::rename(&tmp, self.path(key))
    }
}
