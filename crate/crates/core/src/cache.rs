//! Flat binary cache for [`DivisorTables`].
//!
//! Layout (all little-endian): magic `RDHF`, format version `u32`, `n` as `u64`,
//! then for `k = 1..=n` the arrays μ (`i8`), σ₀ (`u32`), σ₁ (`u64`), φ (`u64`)
//! and smallest prime factor (`u32`), each array stored contiguously.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::number_theory::{sieve_tables, DivisorTables};

pub const MAGIC: [u8; 4] = *b"RDHF";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

fn payload_len(n: usize) -> usize {
    n * (1 + 4 + 8 + 8 + 4)
}

pub fn encode(tables: &DivisorTables) -> Vec<u8> {
    let n = tables.n;
    let mut buf = Vec::with_capacity(HEADER_LEN + payload_len(n));
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend(tables.mu[1..].iter().map(|&m| m as u8));
    for v in &tables.sigma0[1..] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in &tables.sigma1[1..] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in &tables.phi[1..] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in &tables.spf[1..] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

fn read_array<const W: usize, T>(
    bytes: &[u8],
    n: usize,
    decode: impl Fn([u8; W]) -> T,
) -> (Vec<T>, &[u8])
where
    T: Default,
{
    let (head, rest) = bytes.split_at(n * W);
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::default());
    out.extend(
        head.chunks_exact(W)
            .map(|c| decode(c.try_into().expect("chunk width"))),
    );
    (out, rest)
}

pub fn decode(bytes: &[u8]) -> Result<DivisorTables> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::CacheFormat("truncated header".into()));
    }
    if bytes[0..4] != MAGIC {
        return Err(Error::CacheFormat("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::CacheFormat(format!(
            "format version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let body = &bytes[HEADER_LEN..];
    if n == 0 || body.len() != payload_len(n) {
        return Err(Error::CacheFormat(format!(
            "payload is {} bytes, expected {} for n = {n}",
            body.len(),
            payload_len(n)
        )));
    }
    let (mu, rest) = read_array(body, n, |[b]: [u8; 1]| b as i8);
    let (sigma0, rest) = read_array(rest, n, u32::from_le_bytes);
    let (sigma1, rest) = read_array(rest, n, u64::from_le_bytes);
    let (phi, rest) = read_array(rest, n, u64::from_le_bytes);
    let (spf, _) = read_array(rest, n, u32::from_le_bytes);
    Ok(DivisorTables {
        n,
        mu,
        sigma0,
        sigma1,
        phi,
        spf,
    })
}

pub fn write(tables: &DivisorTables, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    // Write to a sibling temp file first so a concurrent reader never sees a partial file.
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        w.write_all(&encode(tables))?;
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read(path: &Path) -> Result<DivisorTables> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn cache_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("divisor-tables-{n}.rdhf"))
}

/// Where the tables came from when going through [`load_or_build`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Built,
}

/// Load tables for exactly `n` from `dir`, or sieve and store them.
///
/// Unreadable or stale-version files are rebuilt and overwritten.
pub fn load_or_build(dir: &Path, n: usize) -> Result<(DivisorTables, CacheOutcome)> {
    let path = cache_path(dir, n);
    match read(&path) {
        Ok(tables) if tables.n == n => return Ok((tables, CacheOutcome::Hit)),
        Ok(_) => log::warn!(
            "cache file {} has the wrong bound, rebuilding",
            path.display()
        ),
        Err(Error::Io(_)) => {}
        Err(e) => log::warn!("ignoring cache file {}: {e}", path.display()),
    }
    let tables = sieve_tables(n)?;
    if let Err(e) = write(&tables, &path) {
        log::warn!("could not write cache file {}: {e}", path.display());
    }
    Ok((tables, CacheOutcome::Built))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let t = sieve_tables(5).unwrap();
        let bytes = encode(&t);
        assert_eq!(&bytes[0..4], b"RDHF");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..16], &5u64.to_le_bytes());
        assert_eq!(bytes.len(), 16 + 5 * 25);
        // mu(1..=5) = 1, -1, -1, 0, -1
        assert_eq!(&bytes[16..21], &[1, 0xff, 0xff, 0, 0xff]);
    }

    #[test]
    fn roundtrip() {
        let t = sieve_tables(1000).unwrap();
        assert_eq!(decode(&encode(&t)).unwrap(), t);
    }

    #[test]
    fn rejects_stale_version_and_truncation() {
        let t = sieve_tables(10).unwrap();
        let mut bytes = encode(&t);
        bytes[4] = 0;
        assert!(matches!(decode(&bytes), Err(Error::CacheFormat(_))));
        let bytes = encode(&t);
        assert!(matches!(
            decode(&bytes[..bytes.len() - 1]),
            Err(Error::CacheFormat(_))
        ));
        assert!(matches!(decode(b"XXXX"), Err(Error::CacheFormat(_))));
    }

    #[test]
    fn load_or_build_hits_on_second_call() {
        let dir = tempfile::tempdir().unwrap();
        let (a, first) = load_or_build(dir.path(), 300).unwrap();
        let (b, second) = load_or_build(dir.path(), 300).unwrap();
        assert_eq!(first, CacheOutcome::Built);
        assert_eq!(second, CacheOutcome::Hit);
        assert_eq!(a, b);
    }

    #[test]
    fn stale_file_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let path = cache_path(dir.path(), 50);
        let mut bytes = encode(&sieve_tables(50).unwrap());
        bytes[4..8].copy_from_slice(&99u32.to_le_bytes());
        fs::write(&path, bytes).unwrap();
        let (t, outcome) = load_or_build(dir.path(), 50).unwrap();
        assert_eq!(outcome, CacheOutcome::Built);
        assert_eq!(t, sieve_tables(50).unwrap());
        assert_eq!(read(&path).unwrap(), t);
    }
}
