use std::collections::BTreeMap;
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::input::sha256_hex;
use crate::report::Report;

pub const TOOLCHAIN: &str = concat!("drep ", env!("CARGO_PKG_VERSION"), "; ", env!("DREP_RUSTC_VERSION"));

/// Everything that determines a result, plus when it was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Digest of the canonical presentation, when the command reads one.
    pub digest: Option<String>,
    /// Truncation parameters and other flags that change the result.
    pub params: BTreeMap<String, String>,
    pub timestamp: u64,
    pub toolchain: String,
}

impl RunManifest {
    pub fn new(command: &str, digest: Option<String>, params: BTreeMap<String, String>) -> Self {
        RunManifest {
            command: command.into(),
            digest,
            params,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            toolchain: TOOLCHAIN.into(),
        }
    }

    /// The cache key: a hash of every field except the timestamp.
    pub fn key(&self) -> String {
        let keyed = (&self.command, &self.digest, &self.params, &self.toolchain);
        sha256_hex(serde_json::to_string(&keyed).expect("manifest serializes").as_bytes())
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    manifest: RunManifest,
    report: Report,
}

pub enum Lookup {
    Hit(Report),
    Miss,
    /// The entry exists but cannot be used; the reason is attached.
    Corrupt(String),
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Self {
        Cache { dir }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, manifest: &RunManifest) -> Lookup {
        let key = manifest.key();
        let bytes = match fs::read(self.path(&key)) {
            Ok(b) => b,
            Err(e) if e.kind() == ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(e.to_string()),
        };
        match serde_json::from_slice::<Entry>(&bytes) {
            Ok(entry) if entry.manifest.key() == key => Lookup::Hit(entry.report),
            Ok(_) => Lookup::Corrupt("entry belongs to a different manifest".into()),
            Err(e) => Lookup::Corrupt(e.to_string()),
        }
    }

    /// Stores a result. An existing entry is kept (first writer wins) unless
    /// `replace` is set, which is used to overwrite corrupt entries.
    pub fn put(&self, manifest: &RunManifest, report: &Report, replace: bool) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let target = self.path(&manifest.key());
        let entry = Entry {
            manifest: manifest.clone(),
            report: report.clone(),
        };
        let bytes = serde_json::to_vec_pretty(&entry).map_err(std::io::Error::other)?;
        let tmp = self.dir.join(format!(
            ".{}.{}.{}.tmp",
            manifest.key(),
            std::process::id(),
            SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos())
        ));
        fs::write(&tmp, bytes)?;
        let result = publish(&tmp, &target, replace);
        let _ = fs::remove_file(&tmp);
        result
    }
}

/// Moves a fully written file into place without clobbering a concurrent writer.
fn publish(tmp: &Path, target: &Path, replace: bool) -> std::io::Result<()> {
    if replace {
        return fs::rename(tmp, target);
    }
    match fs::hard_link(tmp, target) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == ErrorKind::AlreadyExists => Ok(()),
        Err(_) if !target.exists() => fs::rename(tmp, target),
        Err(e) => Err(e),
    }
}
