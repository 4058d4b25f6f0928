//! On-disk cache of full coset tables.
//!
//! File layout (little endian): magic `SP4COSET`, format version `u32`, `p: u64`,
//! `r: u32`, label tag `u8` (0 = full, 1 = labeled) with `a, b: u32`, count `u64`,
//! then per representative 16 `i64` entries, 10 `u32` HNF key entries and the
//! label `(u32, u32)`; finally the SHA-256 of everything before it.

use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::cosets::{CosetTable, HnfKey, TableKind, TABLE_FORMAT_VERSION};
use crate::error::{HeckeError, Result};

const MAGIC: &[u8; 8] = b"SP4COSET";
pub const CACHE_DIR_ENV: &str = "SP4_CACHE_DIR";

/// Outcome of a cache lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// A file was present but failed validation and was discarded.
    Corrupt,
}

#[derive(Debug, Clone)]
pub struct CosetCache {
    dir: PathBuf,
}

/// `$SP4_CACHE_DIR`, else `$XDG_CACHE_HOME/sp4-verify`, else `~/.cache/sp4-verify`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(d) = std::env::var_os(CACHE_DIR_ENV) {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(d).join("sp4-verify");
    }
    let home = std::env::var_os("HOME").map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    home.join(".cache").join("sp4-verify")
}

impl CosetCache {
    pub fn new<P: AsRef<Path>>(dir: P) -> Self {
        Self { dir: dir.as_ref().to_path_buf() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, p: u64, r: u32) -> PathBuf {
        self.dir.join(format!("cosets-v{TABLE_FORMAT_VERSION}-p{p}-r{r}.bin"))
    }

    /// Loads the full table for `(p, r)`; corrupt files are deleted.
    pub fn load(&self, p: u64, r: u32) -> Result<(Option<CosetTable>, CacheStatus)> {
        let path = self.path_for(p, r);
        let mut bytes = Vec::new();
        match File::open(&path) {
            Ok(mut f) => {
                f.read_to_end(&mut bytes)?;
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((None, CacheStatus::Miss)),
            Err(e) => return Err(e.into()),
        }
        match decode(&bytes, p, r) {
            Ok(t) => Ok((Some(t), CacheStatus::Hit)),
            Err(_) => {
                let _ = fs::remove_file(&path);
                Ok((None, CacheStatus::Corrupt))
            }
        }
    }

    /// Writes a table atomically. Returns `false` if another writer holds the lock.
    pub fn store(&self, table: &CosetTable) -> Result<bool> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(table.p, table.r);
        let lock = path.with_extension("lock");
        let _guard = match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(_) => LockGuard(lock.clone()),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => return Ok(false),
            Err(e) => return Err(e.into()),
        };
        let bytes = encode(table);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut f = File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(true)
    }
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

pub fn encode(t: &CosetTable) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + t.len() * (128 + 48));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&t.version.to_le_bytes());
    out.extend_from_slice(&t.p.to_le_bytes());
    out.extend_from_slice(&t.r.to_le_bytes());
    let (tag, a, b) = match t.kind {
        TableKind::Full => (0u8, 0u32, 0u32),
        TableKind::Label { a, b } => (1, a, b),
    };
    out.push(tag);
    out.extend_from_slice(&a.to_le_bytes());
    out.extend_from_slice(&b.to_le_bytes());
    out.extend_from_slice(&(t.len() as u64).to_le_bytes());
    for i in 0..t.len() {
        for row in &t.reps()[i] {
            for x in row {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        for k in t.keys()[i].0 {
            out.extend_from_slice(&k.to_le_bytes());
        }
        let (la, lb) = t.labels()[i];
        out.extend_from_slice(&la.to_le_bytes());
        out.extend_from_slice(&lb.to_le_bytes());
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(HeckeError::Cache("truncated file".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8], p: u64, r: u32) -> Result<CosetTable> {
    if bytes.len() < 32 {
        return Err(HeckeError::Cache("file too short".into()));
    }
    let (body, sum) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != sum {
        return Err(HeckeError::Cache("checksum mismatch".into()));
    }
    let mut rd = Reader { buf: body, pos: 0 };
    if rd.take(8)? != MAGIC {
        return Err(HeckeError::Cache("bad magic".into()));
    }
    if rd.u32()? != TABLE_FORMAT_VERSION {
        return Err(HeckeError::Cache("format version mismatch".into()));
    }
    if rd.u64()? != p || rd.u32()? != r {
        return Err(HeckeError::Cache("(p, r) mismatch".into()));
    }
    let tag = rd.take(1)?[0];
    let (a, b) = (rd.u32()?, rd.u32()?);
    let kind = match tag {
        0 => TableKind::Full,
        1 => TableKind::Label { a, b },
        _ => return Err(HeckeError::Cache("bad label tag".into())),
    };
    let n = rd.u64()? as usize;
    let mut reps = Vec::with_capacity(n);
    let mut keys = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let mut m = [[0i64; 4]; 4];
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = rd.i64()?;
            }
        }
        let mut k = [0u32; 10];
        for x in k.iter_mut() {
            *x = rd.u32()?;
        }
        reps.push(m);
        keys.push(HnfKey(k));
        labels.push((rd.u32()?, rd.u32()?));
    }
    if rd.pos != body.len() {
        return Err(HeckeError::Cache("trailing bytes".into()));
    }
    Ok(CosetTable::from_raw(p, r, kind, reps, keys, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosets::{left_cosets, DEFAULT_CANDIDATE_BUDGET};

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CosetCache::new(dir.path());
        assert_eq!(cache.load(3, 2).unwrap().1, CacheStatus::Miss);
        let t = left_cosets(3, 2, DEFAULT_CANDIDATE_BUDGET).unwrap();
        assert!(cache.store(&t).unwrap());
        let (back, status) = cache.load(3, 2).unwrap();
        assert_eq!(status, CacheStatus::Hit);
        let back = back.unwrap();
        assert_eq!(back.reps(), t.reps());
        assert_eq!(back.keys(), t.keys());
        back.validate().unwrap();

        let path = cache.path_for(3, 2);
        let mut bytes = fs::read(&path).unwrap();
        bytes[100] ^= 1;
        fs::write(&path, &bytes).unwrap();
        assert_eq!(cache.load(3, 2).unwrap().1, CacheStatus::Corrupt);
        assert!(!path.exists());
    }

    #[test]
    fn wrong_parameters_are_rejected() {
        let t = left_cosets(2, 1, DEFAULT_CANDIDATE_BUDGET).unwrap();
        let bytes = encode(&t);
        assert!(decode(&bytes, 2, 1).is_ok());
        assert!(decode(&bytes, 3, 1).is_err());
        assert!(decode(&bytes[..bytes.len() - 1], 2, 1).is_err());
    }

    #[test]
    fn held_lock_skips_write() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CosetCache::new(dir.path());
        let t = left_cosets(2, 1, DEFAULT_CANDIDATE_BUDGET).unwrap();
        File::create(cache.path_for(2, 1).with_extension("lock")).unwrap();
        assert!(!cache.store(&t).unwrap());
    }
}
