//! On-disk result cache keyed by sha256 of (version, operation, input, settings).
//! Entries are written to a temporary file and renamed into place.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = concat!("phigamma ", env!("CARGO_PKG_VERSION"));

#[derive(Serialize, Deserialize)]
struct Entry {
    version: String,
    key: String,
    line: String,
}

pub struct Cache {
    dir: PathBuf,
    pub hits: AtomicUsize,
    pub misses: AtomicUsize,
    tmp_counter: AtomicUsize,
}

pub fn key(op: &str, input: &str, settings: &str) -> String {
    let mut h = Sha256::new();
    for part in [VERSION, op, input, settings] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    hex::encode(h.finalize())
}

impl Cache {
    pub fn open(dir: PathBuf) -> Result<Self, String> {
        fs::create_dir_all(&dir).map_err(|e| format!("cannot create cache dir {}: {e}", dir.display()))?;
        Ok(Cache { dir, hits: AtomicUsize::new(0), misses: AtomicUsize::new(0), tmp_counter: AtomicUsize::new(0) })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Stored line for `key`; unreadable or mismatched entries are reported and ignored.
    pub fn lookup(&self, key: &str) -> Option<String> {
        let path = self.path(key);
        let Ok(text) = fs::read_to_string(&path) else {
            self.misses.fetch_add(1, Ordering::Relaxed);
            return None;
        };
        match serde_json::from_str::<Entry>(&text) {
            Ok(e) if e.version == VERSION && e.key == key => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(e.line)
            }
            _ => {
                eprintln!("phigamma: warning: ignoring corrupt cache entry {}", path.display());
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    pub fn store(&self, key: &str, line: &str) {
        let entry = Entry { version: VERSION.into(), key: key.into(), line: line.into() };
        let n = self.tmp_counter.fetch_add(1, Ordering::Relaxed);
        let tmp = self.dir.join(format!(".{key}.{}.{n}.tmp", std::process::id()));
        let res = fs::File::create(&tmp)
            .and_then(|mut f| {
                f.write_all(serde_json::to_string(&entry).expect("entry serializes").as_bytes())?;
                f.sync_all()
            })
            .and_then(|_| fs::rename(&tmp, self.path(key)));
        if let Err(e) = res {
            let _ = fs::remove_file(&tmp);
            eprintln!("phigamma: warning: cannot write cache entry: {e}");
        }
    }
}
