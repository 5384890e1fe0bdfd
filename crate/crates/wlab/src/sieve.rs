//! Smallest-prime-factor sieve and factorization.
//!
//! [`SieveTable`] stores `spf[n]`, the smallest prime factor of `n`, as 32-bit
//! entries (4 bytes per integer: limit 10^7 costs ~40 MB, 10^8 ~400 MB; limits
//! up to 2^32−1 are representable, the default budget cap is 2^31). Tables are
//! built with a linear sieve so every entry is written exactly once.
//!
//! Factorizations produced here are the currency of the whole crate: a sorted
//! list of `(prime, exponent)` pairs. The integer itself is never required to
//! be materializable — witness constructions downstream have factorizations
//! whose value vastly exceeds u64.

use std::fs;
use std::io::{self, Read as _, Write as _};
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Default ceiling on `limit`: 2^31 entries = 8 GB of table. Anything larger
/// is almost certainly a mistyped argument rather than a real request.
pub const DEFAULT_LIMIT_CAP: u64 = 1 << 31;

/// Magic prefix of the on-disk sieve cache format.
pub const CACHE_MAGIC: &[u8; 5] = b"WLAB1";
/// Version byte following the magic.
pub const CACHE_VERSION: u8 = 1;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("sieve limit {0} is below the minimum of 2")]
    LimitTooSmall(u64),
    #[error("sieve limit {limit} exceeds the memory budget cap {cap} (4 bytes per entry)")]
    LimitExceedsCap { limit: u64, cap: u64 },
    #[error("n = {n} outside the sieved range 1..={limit}")]
    OutOfRange { n: u64, limit: u64 },
    #[error("factorization rejected: {0}")]
    BadFactorization(String),
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache file has wrong magic/version (expected WLAB1 v{CACHE_VERSION})")]
    Format,
    #[error("cache file truncated: expected {expected} table bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("cache limit {found} does not match requested {requested}")]
    LimitMismatch { requested: u64, found: u64 },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

/// Smallest-prime-factor table for `2..=limit`.
pub struct SieveTable {
    limit: u64,
    spf: Vec<u32>,
}

/// A prime factorization: strictly increasing primes, all exponents >= 1.
///
/// `Factorization::value()` multiplies the factors back together and is only
/// available when the product fits in u64; symbolic factorizations (witness
/// sequences) simply never call it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Validates and wraps an explicit factor list.
    pub fn from_parts(factors: Vec<(u64, u32)>) -> Result<Self, SieveError> {
        for window in factors.windows(2) {
            if window[0].0 >= window[1].0 {
                return Err(SieveError::BadFactorization(format!(
                    "primes not strictly increasing: {} then {}",
                    window[0].0, window[1].0
                )));
            }
        }
        for &(p, k) in &factors {
            if p < 2 {
                return Err(SieveError::BadFactorization(format!("{p} is not a prime")));
            }
            if k == 0 {
                return Err(SieveError::BadFactorization(format!(
                    "zero exponent on prime {p}"
                )));
            }
        }
        Ok(Self { factors })
    }

    /// The factorization of 1: no factors.
    pub fn one() -> Self {
        Self { factors: Vec::new() }
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of distinct primes.
    pub fn distinct_primes(&self) -> usize {
        self.factors.len()
    }

    /// Total number of prime factors with multiplicity (the quantity whose
    /// parity defines lambda).
    pub fn omega_total(&self) -> u64 {
        self.factors.iter().map(|&(_, k)| u64::from(k)).sum()
    }

    /// Re-multiplies the factors; `None` when the value exceeds u64.
    pub fn value(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for &(p, k) in &self.factors {
            for _ in 0..k {
                acc = acc.checked_mul(p)?;
            }
        }
        Some(acc)
    }

    /// Merges two factorizations with disjoint prime support.
    pub fn merged_coprime(&self, other: &Self) -> Result<Self, SieveError> {
        let mut merged = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            match self.factors[i].0.cmp(&other.factors[j].0) {
                std::cmp::Ordering::Less => {
                    merged.push(self.factors[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(other.factors[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    return Err(SieveError::BadFactorization(format!(
                        "prime {} appears on both sides of a coprime merge",
                        self.factors[i].0
                    )))
                }
            }
        }
        merged.extend_from_slice(&self.factors[i..]);
        merged.extend_from_slice(&other.factors[j..]);
        Ok(Self { factors: merged })
    }
}

impl SieveTable {
    /// Builds the table with the default memory cap.
    pub fn build(limit: u64) -> Result<Self, SieveError> {
        Self::build_with_cap(limit, DEFAULT_LIMIT_CAP)
    }

    /// Builds the table, rejecting limits above `cap` entries.
    pub fn build_with_cap(limit: u64, cap: u64) -> Result<Self, SieveError> {
        if limit < 2 {
            return Err(SieveError::LimitTooSmall(limit));
        }
        if limit > cap || limit > u64::from(u32::MAX) {
            return Err(SieveError::LimitExceedsCap {
                limit,
                cap: cap.min(u64::from(u32::MAX)),
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        // Linear sieve: each composite is struck exactly once, by its
        // smallest prime factor.
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let spf_i = spf[i];
            for &p in &primes {
                if p > spf_i {
                    break;
                }
                let j = p as usize * i;
                if j > n {
                    break;
                }
                spf[j] = p;
            }
        }
        Ok(Self { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n` (2 <= n <= limit).
    pub fn spf(&self, n: u64) -> Result<u64, SieveError> {
        if n < 2 || n > self.limit {
            return Err(SieveError::OutOfRange { n, limit: self.limit });
        }
        Ok(u64::from(self.spf[n as usize]))
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] == n as u32
    }

    /// Iterates the primes in the sieved range in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.spf
            .iter()
            .enumerate()
            .skip(2)
            .filter(|&(i, &p)| p as usize == i)
            .map(|(i, _)| i as u64)
    }

    /// Factorizes `n` by repeated smallest-prime-factor division.
    ///
    /// O(log n) table lookups; `factorize(1)` is the empty factorization.
    pub fn factorize(&self, n: u64) -> Result<Factorization, SieveError> {
        if n == 0 || n > self.limit {
            return Err(SieveError::OutOfRange { n, limit: self.limit });
        }
        let mut factors = Vec::new();
        let mut rest = n;
        while rest > 1 {
            let p = u64::from(self.spf[rest as usize]);
            let mut k = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            factors.push((p, k));
        }
        Ok(Factorization { factors })
    }
}

// ---------------------------------------------------------------------------
// Disk cache
//
// Layout: b"WLAB1", version u8, limit u64 LE, then (limit+1) u32 LE entries.
// Writes go to a temp file in the same directory and are renamed into place,
// so readers never observe a partial file.
// ---------------------------------------------------------------------------

fn cache_file(dir: &Path, limit: u64) -> PathBuf {
    dir.join(format!("spf-{limit}.sieve"))
}

/// Serializes `table` under `dir`, returning the final path.
pub fn write_cache(table: &SieveTable, dir: &Path) -> Result<PathBuf, CacheError> {
    fs::create_dir_all(dir)?;
    let final_path = cache_file(dir, table.limit);
    let tmp_path = dir.join(format!(".spf-{}.sieve.tmp-{}", table.limit, std::process::id()));
    let result = (|| -> Result<(), CacheError> {
        let mut w = io::BufWriter::new(fs::File::create(&tmp_path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&[CACHE_VERSION])?;
        w.write_all(&table.limit.to_le_bytes())?;
        for &e in &table.spf {
            w.write_all(&e.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    })();
    match result {
        Ok(()) => {
            fs::rename(&tmp_path, &final_path)?;
            Ok(final_path)
        }
        Err(e) => {
            let _ = fs::remove_file(&tmp_path);
            Err(e)
        }
    }
}

/// Loads a cached table for exactly `limit`; `Ok(None)` when absent.
pub fn read_cache(dir: &Path, limit: u64) -> Result<Option<SieveTable>, CacheError> {
    let path = cache_file(dir, limit);
    let file = match fs::File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut r = io::BufReader::new(file);
    let mut head = [0u8; 14];
    r.read_exact(&mut head).map_err(|_| CacheError::Format)?;
    if &head[..5] != CACHE_MAGIC || head[5] != CACHE_VERSION {
        return Err(CacheError::Format);
    }
    let stored_limit = u64::from_le_bytes(head[6..14].try_into().unwrap());
    if stored_limit != limit {
        return Err(CacheError::LimitMismatch { requested: limit, found: stored_limit });
    }
    let entries = (limit + 1) as usize;
    let mut bytes = vec![0u8; entries * 4];
    let mut read_total = 0usize;
    while read_total < bytes.len() {
        let n = r.read(&mut bytes[read_total..])?;
        if n == 0 {
            return Err(CacheError::Truncated {
                expected: bytes.len() as u64,
                found: read_total as u64,
            });
        }
        read_total += n;
    }
    let spf = bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Some(SieveTable { limit, spf }))
}

/// Cache-through build: reads the cached table when present and valid,
/// otherwise builds and writes it. A corrupt cache file is an error rather
/// than silently rebuilt, so damage is noticed.
pub fn load_or_build(limit: u64, dir: &Path) -> Result<SieveTable, CacheError> {
    if let Some(table) = read_cache(dir, limit)? {
        return Ok(table);
    }
    let table = SieveTable::build(limit)?;
    write_cache(&table, dir)?;
    Ok(table)
}

/// Lists `(limit, bytes)` of cache files under `dir`.
pub fn cache_entries(dir: &Path) -> Result<Vec<(u64, u64)>, CacheError> {
    let mut out = Vec::new();
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(e.into()),
    };
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(rest) = name.strip_prefix("spf-").and_then(|s| s.strip_suffix(".sieve")) {
            if let Ok(limit) = rest.parse::<u64>() {
                out.push((limit, entry.metadata()?.len()));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Removes all cache files under `dir`, returning how many were deleted.
pub fn clear_cache(dir: &Path) -> Result<usize, CacheError> {
    let mut removed = 0;
    for (limit, _) in cache_entries(dir)? {
        fs::remove_file(cache_file(dir, limit))?;
        removed += 1;
    }
    Ok(removed)
}
