//! On-disk response cache: one file per key, named by the hex digest, holding
//! the raw assistant text.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use tempfile::NamedTempFile;

pub const CACHE_DIR_ENV: &str = "CMDREASON_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".cmdreason-cache";

const WRITE_STRIPES: usize = 16;

#[derive(Debug)]
pub struct ResponseCache {
    dir: PathBuf,
    // Writers for the same key take the same stripe.
    stripes: [Mutex<()>; WRITE_STRIPES],
}

impl ResponseCache {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            stripes: Default::default(),
        })
    }

    /// `$CMDREASON_CACHE_DIR` if set, otherwise `default`.
    pub fn from_env_or(default: impl Into<PathBuf>) -> io::Result<Self> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Self::open(PathBuf::from(dir)),
            _ => Self::open(default),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, key: &str) -> io::Result<PathBuf> {
        if key.is_empty() || !key.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("cache key {key:?} is not a hex digest"),
            ));
        }
        Ok(self.dir.join(key))
    }

    pub fn get(&self, key: &str) -> io::Result<Option<String>> {
        match fs::read_to_string(self.path_for(key)?) {
            Ok(text) => Ok(Some(text)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.path_for(key).map(|p| p.is_file()).unwrap_or(false)
    }

    /// Write through a temporary file and rename, so readers see either the
    /// old state or the complete entry.
    pub fn put(&self, key: &str, text: &str) -> io::Result<()> {
        let path = self.path_for(key)?;
        let stripe = key
            .bytes()
            .fold(0usize, |acc, b| acc.wrapping_mul(31).wrapping_add(b as usize))
            % WRITE_STRIPES;
        let _guard = self.stripes[stripe].lock().unwrap_or_else(|e| e.into_inner());
        let mut tmp = NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(text.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Number of entries on disk.
    pub fn len(&self) -> io::Result<usize> {
        let mut n = 0;
        for entry in fs::read_dir(&self.dir)? {
            let entry = entry?;
            let name = entry.file_name();
            if entry.file_type()?.is_file() && name.to_str().is_some_and(|s| s.bytes().all(|b| b.is_ascii_hexdigit())) {
                n += 1;
            }
        }
        Ok(n)
    }

    pub fn is_empty(&self) -> io::Result<bool> {
        Ok(self.len()? == 0)
    }
}
