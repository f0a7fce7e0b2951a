//! Content-addressed solution cache.
//!
//! File layout, all little-endian: magic `NSUQ`, format version (u32), velocity
//! length, pressure length and increment count (u64 each), the three f64
//! arrays, ‖u‖_H, ‖p‖_L (f64), iteration count (u64), then the SHA-256 of
//! everything before it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::HarnessError;

const MAGIC: &[u8; 4] = b"NSUQ";
pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct CacheEntry {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub norm_u: f64,
    pub norm_p: f64,
    pub iterations: u64,
    /// Picard increments, kept so contraction can be rechecked on a hit.
    pub increments: Vec<f64>,
}

/// Digest of the solve-relevant configuration and the bit pattern of y.
pub fn cache_key(scope: &str, y: &[f64]) -> String {
    let mut h = Sha256::new();
    h.update(scope.as_bytes());
    h.update([0u8]);
    for v in y {
        h.update(v.to_bits().to_le_bytes());
    }
    hex::encode(h.finalize())
}

pub fn encode_entry(e: &CacheEntry) -> Vec<u8> {
    let mut b = Vec::with_capacity(64 + 8 * (e.u.len() + e.p.len() + e.increments.len()));
    b.extend_from_slice(MAGIC);
    b.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    for len in [e.u.len(), e.p.len(), e.increments.len()] {
        b.extend_from_slice(&(len as u64).to_le_bytes());
    }
    for v in e.u.iter().chain(&e.p).chain(&e.increments).chain([&e.norm_u, &e.norm_p]) {
        b.extend_from_slice(&v.to_le_bytes());
    }
    b.extend_from_slice(&e.iterations.to_le_bytes());
    let digest = Sha256::digest(&b);
    b.extend_from_slice(&digest);
    b
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or("truncated entry")?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, String> {
        let raw = self.take(n.checked_mul(8).ok_or("length overflow")?)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    }
}

pub fn decode_entry(bytes: &[u8]) -> Result<CacheEntry, String> {
    if bytes.len() < 4 + 4 + 32 {
        return Err("truncated entry".into());
    }
    let (body, tail) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != tail {
        return Err("digest mismatch".into());
    }
    let mut r = Reader { bytes: body, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err("bad magic".into());
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().expect("4 bytes"));
    if version != CACHE_VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let (nu, np, ni) = (r.u64()? as usize, r.u64()? as usize, r.u64()? as usize);
    let u = r.f64s(nu)?;
    let p = r.f64s(np)?;
    let increments = r.f64s(ni)?;
    let norms = r.f64s(2)?;
    let iterations = r.u64()?;
    if r.pos != body.len() {
        return Err("trailing bytes".into());
    }
    Ok(CacheEntry { u, p, norm_u: norms[0], norm_p: norms[1], iterations, increments })
}

#[derive(Clone, Debug)]
pub struct SolutionCache {
    dir: PathBuf,
}

impl SolutionCache {
    pub fn new(dir: &Path) -> Result<Self, HarnessError> {
        fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(format!("{key}.nsuq"))
    }

    /// A missing entry is a miss; a corrupt one is a miss with a warning.
    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        let bytes = fs::read(self.path(key)).ok()?;
        match decode_entry(&bytes) {
            Ok(e) => Some(e),
            Err(msg) => {
                log::warn!("ignoring corrupt cache entry {key}: {msg}");
                None
            }
        }
    }

    /// Writes to a temporary file and renames it into place.
    pub fn put(&self, key: &str, entry: &CacheEntry) -> Result<(), HarnessError> {
        let path = self.path(key);
        let parent = path.parent().expect("entry has a parent");
        let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", path.display()));
        fs::create_dir_all(parent).map_err(io)?;
        let tmp = parent.join(format!("{key}.{}.tmp", std::process::id()));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(&encode_entry(entry)).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)
    }
}
