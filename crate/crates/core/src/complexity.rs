//! Block complexity of sign sequences: the number of distinct length-n
//! words among consecutive values, plus right/left special-word counts.
//!
//! Words of up to 64 letters pack into a single `u64` key (first letter
//! most significant), so distinctness is exact set membership — no
//! probabilistic counting. Scans parallelize over contiguous spans and
//! merge by set union, which is order-independent.

use crate::error::{Error, Result};
use crate::sieve::LiouvilleTable;
use rayon::prelude::*;
use std::collections::HashSet;

/// Distinct-word counts `P(n)` for `1 ≤ n ≤ max_word_length` over the
/// windows of `[1, scan_bound]`.
#[derive(Clone, Debug)]
pub struct BlockComplexityReport {
    pub scan_bound: u64,
    pub max_word_length: u32,
    counts: Vec<u64>,
}

impl BlockComplexityReport {
    pub fn count(&self, n: u32) -> u64 {
        self.counts[(n - 1) as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `(n, P(n)/n)` rows.
    pub fn ratios(&self) -> Vec<(u32, f64)> {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u32 + 1, c as f64 / (i + 1) as f64))
            .collect()
    }
}

/// Ratio table of a report plus whether the ratios never decrease over
/// the computed range (finite-scale evidence, not a limit statement).
#[derive(Clone, Debug)]
pub struct TrendReport {
    pub ratios: Vec<(u32, f64)>,
    pub nondecreasing: bool,
}

/// Right/left special-word counts at one word length.
#[derive(Clone, Debug)]
pub struct SpecialWordReport {
    pub word_length: u32,
    pub right_special_count: u64,
    pub left_special_count: u64,
    /// Up to a few right-special words, packed; decode with [`word_string`].
    pub witnesses: Vec<u64>,
}

/// Render a packed word as a ±-string, first letter leftmost.
pub fn word_string(key: u64, n: u32) -> String {
    (0..n)
        .rev()
        .map(|b| if key >> b & 1 == 1 { '-' } else { '+' })
        .collect()
}

enum WordSet {
    Bitmap(Vec<u64>),
    Hashed(HashSet<u64>),
}

impl WordSet {
    fn new(n: u32) -> WordSet {
        if n <= 24 {
            WordSet::Bitmap(vec![0u64; 1 << (n.max(6) - 6)])
        } else {
            WordSet::Hashed(HashSet::new())
        }
    }

    #[inline]
    fn insert(&mut self, key: u64) {
        match self {
            WordSet::Bitmap(words) => words[(key >> 6) as usize] |= 1u64 << (key & 63),
            WordSet::Hashed(set) => {
                set.insert(key);
            }
        }
    }

    fn contains(&self, key: u64) -> bool {
        match self {
            WordSet::Bitmap(words) => words[(key >> 6) as usize] >> (key & 63) & 1 == 1,
            WordSet::Hashed(set) => set.contains(&key),
        }
    }

    fn union(mut self, other: WordSet) -> WordSet {
        match (&mut self, other) {
            (WordSet::Bitmap(a), WordSet::Bitmap(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x |= y;
                }
            }
            (WordSet::Hashed(a), WordSet::Hashed(b)) => a.extend(b),
            _ => unreachable!("span collectors share one representation"),
        }
        self
    }

    fn len(&self) -> u64 {
        match self {
            WordSet::Bitmap(words) => words.iter().map(|w| u64::from(w.count_ones())).sum(),
            WordSet::Hashed(set) => set.len() as u64,
        }
    }

    fn sorted_keys(&self) -> Vec<u64> {
        let mut keys = match self {
            WordSet::Bitmap(words) => {
                let mut keys = Vec::new();
                for (wi, &w) in words.iter().enumerate() {
                    let mut bits = w;
                    while bits != 0 {
                        keys.push((wi as u64) << 6 | u64::from(bits.trailing_zeros()));
                        bits &= bits - 1;
                    }
                }
                keys
            }
            WordSet::Hashed(set) => set.iter().copied().collect(),
        };
        keys.sort_unstable();
        keys
    }
}

fn check_word_length(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("word length must be positive".into()));
    }
    if n > 64 {
        return Err(Error::Capacity(
            "word length capped at 64 (one machine word of letters)".into(),
        ));
    }
    Ok(())
}

/// Set of distinct length-`n` words among windows starting at
/// `1 ≤ i ≤ scan_bound − n + 1` of the ±1 sequence `bit_at`
/// (`true` = −1).
fn word_set<F>(bit_at: &F, n: u32, scan_bound: u64) -> WordSet
where
    F: Fn(u64) -> bool + Sync,
{
    let window_count = scan_bound - u64::from(n) + 1; // callers validated scan_bound ≥ n
    let spans = rayon::current_num_threads() as u64;
    let span_len = window_count.div_ceil(spans);
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (0..spans)
        .into_par_iter()
        .filter_map(|s| {
            let first = 1 + s * span_len;
            let last = (first + span_len - 1).min(window_count);
            if first > last {
                return None;
            }
            let mut set = WordSet::new(n);
            let mut key = 0u64;
            for t in 0..u64::from(n) {
                key = key << 1 | u64::from(bit_at(first + t));
            }
            set.insert(key);
            for start in first + 1..=last {
                key = (key << 1 | u64::from(bit_at(start + u64::from(n) - 1))) & mask;
                set.insert(key);
            }
            Some(set)
        })
        .reduce_with(WordSet::union)
        .unwrap_or_else(|| WordSet::new(n))
}

/// Block complexity of an arbitrary ±1 sequence given as a sign-bit
/// accessor over `n ≥ 1` (`true` = −1).
pub fn block_complexity_bits<F>(bit_at: &F, n_max: u32, scan_bound: u64) -> Result<BlockComplexityReport>
where
    F: Fn(u64) -> bool + Sync,
{
    check_word_length(n_max.max(1))?;
    if n_max == 0 {
        return Err(Error::Domain("n_max must be positive".into()));
    }
    if scan_bound < u64::from(n_max) {
        return Err(Error::Domain(format!(
            "scan bound {scan_bound} shorter than the longest word {n_max}"
        )));
    }
    let counts = (1..=n_max)
        .map(|n| word_set(bit_at, n, scan_bound).len())
        .collect();
    Ok(BlockComplexityReport {
        scan_bound,
        max_word_length: n_max,
        counts,
    })
}

/// Block complexity `P_λ(n)` of the sieved Liouville sequence.
pub fn block_complexity(table: &LiouvilleTable, n_max: u32, scan_bound: u64) -> Result<BlockComplexityReport> {
    use crate::sieve::ArithmeticTable;
    if scan_bound > table.upper_bound() {
        return Err(Error::OutOfRange(format!(
            "scan bound {scan_bound} exceeds table bound {}",
            table.upper_bound()
        )));
    }
    block_complexity_bits(&|k| table.sign_bit(k), n_max, scan_bound)
}

/// Ratio table plus the nondecreasing flag.
pub fn superlinear_trend(report: &BlockComplexityReport) -> TrendReport {
    let ratios = report.ratios();
    let nondecreasing = ratios.windows(2).all(|w| w[1].1 >= w[0].1);
    TrendReport {
        ratios,
        nondecreasing,
    }
}

/// Count length-`n` words extendable by both letters on the right
/// (and symmetrically on the left) within the observed windows.
pub fn special_words_bits<F>(bit_at: &F, n: u32, scan_bound: u64) -> Result<SpecialWordReport>
where
    F: Fn(u64) -> bool + Sync,
{
    check_word_length(n + 1)?;
    if n == 0 {
        return Err(Error::Domain("word length must be positive".into()));
    }
    if scan_bound < u64::from(n) + 1 {
        return Err(Error::Domain(format!(
            "scan bound {scan_bound} shorter than the extended word {}",
            n + 1
        )));
    }
    let extended = word_set(bit_at, n + 1, scan_bound);
    let mut right = 0u64;
    let mut left = 0u64;
    let mut witnesses = Vec::new();
    let top = 1u64 << n;
    for key in extended.sorted_keys() {
        // right special: prefix u with both u·(+) and u·(−) present;
        // count each sibling pair once at its even member
        if key & 1 == 0 && extended.contains(key | 1) {
            right += 1;
            if witnesses.len() < 4 {
                witnesses.push(key >> 1);
            }
        }
        if key & top == 0 && extended.contains(key | top) {
            left += 1;
        }
    }
    Ok(SpecialWordReport {
        word_length: n,
        right_special_count: right,
        left_special_count: left,
        witnesses,
    })
}

/// Special-word statistics of the sieved Liouville sequence.
pub fn special_words(table: &LiouvilleTable, n: u32, scan_bound: u64) -> Result<SpecialWordReport> {
    use crate::sieve::ArithmeticTable;
    if scan_bound > table.upper_bound() {
        return Err(Error::OutOfRange(format!(
            "scan bound {scan_bound} exceeds table bound {}",
            table.upper_bound()
        )));
    }
    special_words_bits(&|k| table.sign_bit(k), n, scan_bound)
}
