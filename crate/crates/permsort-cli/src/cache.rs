//! On-disk result cache: distance tables and classification verdicts,
//! keyed by (canonical spec string, length).
//!
//! Entries are validated on load (format magic, embedded spec, length);
//! anything that fails is deleted and recomputed, so a truncated or foreign
//! file can only cost time, never poison a result. Writers take a lock file
//! per entry; when another process holds it, the write is skipped and the
//! freshly computed result is used directly. Status lines go to stderr so
//! stdout stays byte-identical between a cold and a warm run.

use std::fs::{self, File, OpenOptions};
use std::io;
use std::io::Write;
use std::path::{Path, PathBuf};

use permsort_core::classes::ClassHandle;
use permsort_core::engine::{BfsOptions, DistanceTable, ABSOLUTE_MAX_N, DEFAULT_MAX_N};
use permsort_core::{taxonomy, Result};

/// FNV-1a, 64 bits. Stable across runs and toolchains, which keeps cache
/// file names durable; a collision is caught by the embedded-spec check.
fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// Directory precedence: explicit flag, then the PERMSORT_CACHE
    /// environment variable, then `.permsort-cache/` under the working
    /// directory. The directory is created lazily on the first write.
    pub fn new(flag: Option<&Path>) -> Cache {
        let dir = match flag {
            Some(p) => p.to_path_buf(),
            None => match std::env::var_os("PERMSORT_CACHE") {
                Some(v) if !v.is_empty() => PathBuf::from(v),
                _ => PathBuf::from(".permsort-cache"),
            },
        };
        Cache { dir }
    }

    fn entry_path(&self, spec: &str, n: usize, ext: &str) -> PathBuf {
        self.dir.join(format!("{:016x}-{n}.{ext}", fnv1a(spec)))
    }

    /// Loads the distance table for (class, n), or builds and stores it.
    pub fn table(&self, class: &ClassHandle, n: usize, opts: &BfsOptions) -> Result<DistanceTable> {
        if n > ABSOLUTE_MAX_N || (n > DEFAULT_MAX_N && !opts.allow_large) {
            // Refuse before touching the cache: a stored table of this size
            // would cost the same memory as building one.
            return DistanceTable::build(class, n, opts);
        }
        let spec = class.canonical_string().to_string();
        let path = self.entry_path(&spec, n, "pswb");
        if let Some(t) = self.load_table(&path, &spec, n) {
            eprintln!("cache: hit table {spec} n={n}");
            return Ok(t);
        }
        eprintln!("cache: miss table {spec} n={n}");
        let t = DistanceTable::build(class, n, opts)?;
        let mut buf = Vec::new();
        t.save(&mut buf)?;
        self.store(&path, &buf);
        Ok(t)
    }

    fn load_table(&self, path: &Path, spec: &str, n: usize) -> Option<DistanceTable> {
        let mut f = File::open(path).ok()?;
        match DistanceTable::load(&mut f) {
            Ok(t) if t.spec() == spec && t.n() == n => Some(t),
            Ok(_) => {
                eprintln!(
                    "cache: {} holds a different key, discarding",
                    path.display()
                );
                let _ = fs::remove_file(path);
                None
            }
            Err(e) => {
                eprintln!("cache: discarding corrupt {}: {e}", path.display());
                let _ = fs::remove_file(path);
                None
            }
        }
    }

    /// Classification verdict for (class, n_max) as its JSON string,
    /// cached. The stored file wraps the verdict with its key so a load can
    /// be validated; the unwrapped verdict is returned either way.
    pub fn verdict_json(&self, class: &ClassHandle, n_max: usize) -> Result<String> {
        let spec = class.canonical_string().to_string();
        let path = self.entry_path(&spec, n_max, "verdict.json");
        if let Ok(text) = fs::read_to_string(&path) {
            match unwrap_verdict(&text, &spec, n_max) {
                Some(v) => {
                    eprintln!("cache: hit verdict {spec} n_max={n_max}");
                    return Ok(v);
                }
                None => {
                    eprintln!("cache: discarding corrupt {}", path.display());
                    let _ = fs::remove_file(&path);
                }
            }
        }
        eprintln!("cache: miss verdict {spec} n_max={n_max}");
        let verdict = taxonomy::classify(class, n_max)?.to_json();
        let inner: serde_json::Value =
            serde_json::from_str(&verdict).expect("verdicts serialize to valid json");
        let wrapped = serde_json::json!({
            "spec": spec,
            "n_max": n_max,
            "verdict": inner,
        })
        .to_string();
        self.store(&path, wrapped.as_bytes());
        Ok(verdict)
    }

    /// Best effort: a failed cache write is reported on stderr and the
    /// computed result is used anyway.
    fn store(&self, path: &Path, bytes: &[u8]) {
        match self.store_locked(path, bytes) {
            Ok(true) => eprintln!("cache: wrote {}", path.display()),
            Ok(false) => eprintln!(
                "cache: {} is being written by another process, skipping",
                path.display()
            ),
            Err(e) => eprintln!("cache: write to {} failed: {e}", path.display()),
        }
    }

    fn store_locked(&self, path: &Path, bytes: &[u8]) -> io::Result<bool> {
        fs::create_dir_all(&self.dir)?;
        let lock = path.with_extension("lock");
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(_) => {}
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => return Ok(false),
            Err(e) => return Err(e),
        }
        let tmp = path.with_extension("tmp");
        let res = (|| {
            let mut f = File::create(&tmp)?;
            f.write_all(bytes)?;
            drop(f);
            // The rename makes the entry visible only once it is complete;
            // anything torn earlier is a stray .tmp file, never a bad entry.
            fs::rename(&tmp, path)
        })();
        let _ = fs::remove_file(&lock);
        res.map(|()| true)
    }
}

/// Validates a stored verdict wrapper against its expected key and returns
/// the inner verdict JSON. Any mismatch or malformation yields None.
fn unwrap_verdict(text: &str, spec: &str, n_max: usize) -> Option<String> {
    let v: serde_json::Value = serde_json::from_str(text).ok()?;
    if v.get("spec")?.as_str()? != spec || v.get("n_max")?.as_u64()? != n_max as u64 {
        return None;
    }
    let verdict = v.get("verdict")?;
    if !verdict.is_object() {
        return None;
    }
    Some(verdict.to_string())
}
