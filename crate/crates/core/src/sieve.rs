//! Segmented sieving of the Liouville function λ(n) = (−1)^Ω(n) and the
//! Möbius function μ(n), with bit-packed storage and a persistent cache.
//!
//! Strategy: bootstrap the primes up to √N with a flat sieve, then
//! process `[1, N]` in fixed-length segments. Within a segment every
//! prime p ≤ √(segment top) is divided out of its multiples while the
//! factor count Ω accumulates; whatever remains larger than 1 after
//! all small primes is a single prime factor above √(segment top).
//! Memory stays at O(segment_length + √N) beyond the packed output.
//!
//! Packing: λ uses one bit per value (bit b encodes λ = 1 − 2b), μ uses
//! two bits per value (00 → 0, 01 → +1, 10 → −1). Word order is
//! little-endian and is fixed by the cache file format.

use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 8] = b"SRNKSIEV";
const FORMAT_VERSION: u32 = 1;

/// Which arithmetic function a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableKind {
    Liouville,
    Mobius,
}

impl TableKind {
    fn tag(self) -> u8 {
        match self {
            TableKind::Liouville => 0,
            TableKind::Mobius => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(TableKind::Liouville),
            1 => Ok(TableKind::Mobius),
            other => Err(Error::BadKind(other)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TableKind::Liouville => "lambda",
            TableKind::Mobius => "mobius",
        }
    }
}

/// Sieve construction parameters.
#[derive(Clone, Copy, Debug)]
pub struct SieveConfig {
    /// Values per segment; rounded up internally to a multiple of 64 so
    /// segments pack into disjoint whole words.
    pub segment_length: u64,
    /// Workers building segments concurrently. Output is identical for
    /// every worker count because segments write disjoint word ranges.
    pub worker_count: usize,
    /// Hard cap on the packed allocation.
    pub memory_ceiling_bytes: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_length: 1 << 20,
            worker_count: std::thread::available_parallelism().map_or(1, |p| p.get()),
            memory_ceiling_bytes: 16 << 30,
        }
    }
}

impl SieveConfig {
    fn validate(&self) -> Result<()> {
        if self.segment_length < 2 {
            return Err(Error::Domain("segment_length must be at least 2".into()));
        }
        if self.worker_count < 1 {
            return Err(Error::Domain("worker_count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Read access shared by both tables: values on `[1, N]` plus the signed
/// extension a(−n) = a(n), a(0) = 0.
pub trait ArithmeticTable: Sync {
    fn upper_bound(&self) -> u64;
    fn kind(&self) -> TableKind;

    /// Value at `1 ≤ n ≤ upper_bound`; callers must stay in range.
    fn value(&self, n: u64) -> i8;

    /// Signed extension without a range check; hot loops validate their
    /// whole index range up front and then use this.
    #[inline]
    fn value_signed_unchecked(&self, n: i64) -> i8 {
        if n == 0 {
            0
        } else {
            self.value(n.unsigned_abs())
        }
    }

    /// Signed extension with a range check.
    fn value_at(&self, n: i64) -> Result<i8> {
        if n != 0 && n.unsigned_abs() > self.upper_bound() {
            return Err(Error::OutOfRange(format!(
                "|{n}| exceeds table bound {}",
                self.upper_bound()
            )));
        }
        Ok(self.value_signed_unchecked(n))
    }
}

/// λ on `[1, N]`, one bit per value.
pub struct LiouvilleTable {
    n: u64,
    words: Vec<u64>,
}

impl LiouvilleTable {
    /// True iff λ(n) = −1. Bit-level accessor for scanning loops.
    #[inline]
    pub fn sign_bit(&self, n: u64) -> bool {
        debug_assert!(n >= 1 && n <= self.n);
        let idx = n - 1;
        (self.words[(idx >> 6) as usize] >> (idx & 63)) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl ArithmeticTable for LiouvilleTable {
    fn upper_bound(&self) -> u64 {
        self.n
    }

    fn kind(&self) -> TableKind {
        TableKind::Liouville
    }

    #[inline]
    fn value(&self, n: u64) -> i8 {
        if self.sign_bit(n) {
            -1
        } else {
            1
        }
    }
}

/// μ on `[1, N]`, two bits per value.
pub struct MobiusTable {
    n: u64,
    words: Vec<u64>,
}

impl MobiusTable {
    #[inline]
    fn code(&self, n: u64) -> u64 {
        debug_assert!(n >= 1 && n <= self.n);
        let idx = n - 1;
        (self.words[(idx >> 5) as usize] >> ((idx & 31) * 2)) & 0b11
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl ArithmeticTable for MobiusTable {
    fn upper_bound(&self) -> u64 {
        self.n
    }

    fn kind(&self) -> TableKind {
        TableKind::Mobius
    }

    #[inline]
    fn value(&self, n: u64) -> i8 {
        match self.code(n) {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }
}

/// Either table, as loaded from a cache file.
pub enum SieveTable {
    Liouville(LiouvilleTable),
    Mobius(MobiusTable),
}

/// Primes ≤ `limit` in increasing order (flat odd-only sieve).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut primes = vec![2u64];
    if limit < 3 {
        return primes;
    }
    // odd numbers 3, 5, … ≤ limit; index i represents 2i + 3
    let count = ((limit - 3) / 2 + 1) as usize;
    let mut composite = vec![false; count];
    let mut i = 0u64;
    while (2 * i + 3) * (2 * i + 3) <= limit {
        if !composite[i as usize] {
            let p = 2 * i + 3;
            let mut j = (p * p - 3) / 2;
            while j < count as u64 {
                composite[j as usize] = true;
                j += p;
            }
        }
        i += 1;
    }
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 3),
    );
    primes
}

/// Per-segment factor scan: fills `omega[i]` with Ω(lo + i) and marks
/// `has_square[i]` when some p² divides lo + i.
fn scan_segment(lo: u64, hi: u64, primes: &[u64], rem: &mut [u64], omega: &mut [u8], has_square: &mut [bool]) {
    let len = (hi - lo + 1) as usize;
    for (i, slot) in rem[..len].iter_mut().enumerate() {
        *slot = lo + i as u64;
    }
    omega[..len].fill(0);
    has_square[..len].fill(false);
    for &p in primes {
        if p * p > hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let i = (m - lo) as usize;
            let mut e = 0u8;
            while rem[i] % p == 0 {
                rem[i] /= p;
                e += 1;
            }
            omega[i] += e;
            if e >= 2 {
                has_square[i] = true;
            }
            m += p;
        }
    }
    for i in 0..len {
        if rem[i] > 1 {
            omega[i] += 1;
        }
    }
}

fn check_capacity(n: u64, bytes: u64, cfg: &SieveConfig) -> Result<()> {
    if n == 0 {
        return Err(Error::Capacity("table bound N must be positive".into()));
    }
    if bytes > cfg.memory_ceiling_bytes {
        return Err(Error::Capacity(format!(
            "packed table of {bytes} bytes exceeds the {} byte ceiling",
            cfg.memory_ceiling_bytes
        )));
    }
    Ok(())
}

/// Runs `fill(segment_index, segment_words)` for every segment on
/// `cfg.worker_count` workers. `words_per_value_shift`: 6 for 1-bit
/// packing (64 values/word), 5 for 2-bit packing (32 values/word).
fn build_packed<F>(n: u64, cfg: &SieveConfig, values_per_word_shift: u32, fill: F) -> Result<Vec<u64>>
where
    F: Fn(u64, u64, &mut [u64]) + Sync,
{
    cfg.validate()?;
    let values_per_word = 1u64 << values_per_word_shift;
    let seg_len = cfg.segment_length.next_multiple_of(64);
    let total_words = n.div_ceil(values_per_word) as usize;
    check_capacity(n, total_words as u64 * 8, cfg)?;
    let mut words = vec![0u64; total_words];
    let words_per_seg = (seg_len / values_per_word) as usize;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count)
        .build()
        .map_err(|e| Error::Capacity(format!("worker pool: {e}")))?;
    pool.install(|| {
        use rayon::prelude::*;
        words
            .par_chunks_mut(words_per_seg)
            .enumerate()
            .for_each(|(seg_idx, chunk)| {
                let lo = 1 + seg_idx as u64 * seg_len;
                let hi = (lo + seg_len - 1).min(n);
                fill(lo, hi, chunk);
            });
    });
    Ok(words)
}

/// Sieve λ on `[1, N]`.
pub fn build_liouville(n: u64, cfg: &SieveConfig) -> Result<LiouvilleTable> {
    if n == 0 {
        return Err(Error::Capacity("table bound N must be positive".into()));
    }
    let primes = primes_up_to(n.isqrt());
    let seg_len = cfg.segment_length.next_multiple_of(64) as usize;
    let words = build_packed(n, cfg, 6, |lo, hi, chunk| {
        let mut rem = vec![0u64; seg_len];
        let mut omega = vec![0u8; seg_len];
        let mut sq = vec![false; seg_len];
        scan_segment(lo, hi, &primes, &mut rem, &mut omega, &mut sq);
        for i in 0..(hi - lo + 1) as usize {
            if omega[i] & 1 == 1 {
                chunk[i >> 6] |= 1u64 << (i & 63);
            }
        }
    })?;
    Ok(LiouvilleTable { n, words })
}

/// Sieve μ on `[1, N]`.
pub fn build_mobius(n: u64, cfg: &SieveConfig) -> Result<MobiusTable> {
    if n == 0 {
        return Err(Error::Capacity("table bound N must be positive".into()));
    }
    let primes = primes_up_to(n.isqrt());
    let seg_len = cfg.segment_length.next_multiple_of(64) as usize;
    let words = build_packed(n, cfg, 5, |lo, hi, chunk| {
        let mut rem = vec![0u64; seg_len];
        let mut omega = vec![0u8; seg_len];
        let mut sq = vec![false; seg_len];
        scan_segment(lo, hi, &primes, &mut rem, &mut omega, &mut sq);
        for i in 0..(hi - lo + 1) as usize {
            let code: u64 = if sq[i] {
                0b00
            } else if omega[i] & 1 == 1 {
                0b10
            } else {
                0b01
            };
            chunk[i >> 5] |= code << ((i & 31) * 2);
        }
    })?;
    Ok(MobiusTable { n, words })
}

// ---------------------------------------------------------------------------
// Cache file format: 8-byte magic "SRNKSIEV", u32 version, u8 kind
// (0 = λ, 1 = μ), u64 N, packed payload. All integers little-endian.
// ---------------------------------------------------------------------------

fn payload_words(kind: TableKind, n: u64) -> u64 {
    match kind {
        TableKind::Liouville => n.div_ceil(64),
        TableKind::Mobius => n.div_ceil(32),
    }
}

fn save_raw(kind: TableKind, n: u64, words: &[u64], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut buf = Vec::with_capacity(21 + words.len() * 8);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.push(kind.tag());
    buf.extend_from_slice(&n.to_le_bytes());
    for w in words {
        buf.extend_from_slice(&w.to_le_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

/// Persist a table. Round-trips bit-identically through [`load_table`].
pub fn save_table(table: &SieveTable, path: &Path) -> Result<()> {
    match table {
        SieveTable::Liouville(t) => save_raw(TableKind::Liouville, t.n, &t.words, path),
        SieveTable::Mobius(t) => save_raw(TableKind::Mobius, t.n, &t.words, path),
    }
}

/// Load either table kind from a cache file.
pub fn load_table(path: &Path) -> Result<SieveTable> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 21 {
        return Err(Error::Truncated {
            expected: 21,
            got: bytes.len() as u64,
        });
    }
    if &bytes[0..8] != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::BadVersion(version));
    }
    let kind = TableKind::from_tag(bytes[12])?;
    let n = u64::from_le_bytes(bytes[13..21].try_into().unwrap());
    if n == 0 {
        return Err(Error::Capacity("table bound N must be positive".into()));
    }
    let expected = payload_words(kind, n) * 8;
    let got = (bytes.len() - 21) as u64;
    if got != expected {
        return Err(Error::Truncated { expected, got });
    }
    let words: Vec<u64> = bytes[21..]
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(match kind {
        TableKind::Liouville => SieveTable::Liouville(LiouvilleTable { n, words }),
        TableKind::Mobius => SieveTable::Mobius(MobiusTable { n, words }),
    })
}

/// Cache path for a `(kind, N)` pair under `dir`.
pub fn cache_path(dir: &Path, kind: TableKind, n: u64) -> PathBuf {
    dir.join(format!("{}_{n}.sieve", kind.name()))
}

/// Load the λ table for `(N)` from `dir`, building and saving it on a miss.
pub fn load_or_build_liouville(dir: &Path, n: u64, cfg: &SieveConfig) -> Result<LiouvilleTable> {
    let path = cache_path(dir, TableKind::Liouville, n);
    if path.exists() {
        if let Ok(SieveTable::Liouville(t)) = load_table(&path) {
            if t.n == n {
                return Ok(t);
            }
        }
    }
    let table = build_liouville(n, cfg)?;
    save_raw(TableKind::Liouville, table.n, &table.words, &path)?;
    Ok(table)
}

/// Load the μ table for `(N)` from `dir`, building and saving it on a miss.
pub fn load_or_build_mobius(dir: &Path, n: u64, cfg: &SieveConfig) -> Result<MobiusTable> {
    let path = cache_path(dir, TableKind::Mobius, n);
    if path.exists() {
        if let Ok(SieveTable::Mobius(t)) = load_table(&path) {
            if t.n == n {
                return Ok(t);
            }
        }
    }
    let table = build_mobius(n, cfg)?;
    save_raw(TableKind::Mobius, table.n, &table.words, &path)?;
    Ok(table)
}
