//! Multi-point correlations of λ and μ under logarithmic or Cesàro
//! averaging, prime-dilated correlations and their sign-identity
//! residuals, cylinder (sign-pattern) frequencies with the exact
//! finite-N reconstruction identity, and Gowers uniformity norms on
//! finite cyclic groups.
//!
//! Correlation values are weight-normalized means: `Σ w_n t_n / Σ w_n`
//! with `w_n = 1/n` in the logarithmic case, so a constant sequence
//! correlates to itself at every finite N and cylinder frequencies over
//! all patterns partition to exactly 1.

use crate::accum::{Kahan, CHUNK};
use crate::averages::{normalized_mean, AverageKind};
use crate::error::{Error, Result};
use crate::sieve::{primes_up_to, ArithmeticTable};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Shift tuple `(h_1, …, h_ℓ)` of a multi-point correlation.
/// Repetitions allowed; `1 ≤ ℓ ≤ 16`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShiftPattern {
    shifts: Vec<i64>,
}

impl ShiftPattern {
    pub const MAX_LEN: usize = 16;

    pub fn new(shifts: Vec<i64>) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::Domain("shift pattern must be nonempty".into()));
        }
        if shifts.len() > Self::MAX_LEN {
            return Err(Error::Domain(format!(
                "shift pattern capped at {} entries",
                Self::MAX_LEN
            )));
        }
        Ok(ShiftPattern { shifts })
    }

    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every `n + h_j` for `n ∈ [1, N]` must stay within the signed
    /// extension of the table.
    pub(crate) fn check_range<T: ArithmeticTable>(&self, table: &T, n: u64) -> Result<()> {
        check_shift_range(&self.shifts, table, n)
    }
}

pub(crate) fn check_shift_range<T: ArithmeticTable>(shifts: &[i64], table: &T, n: u64) -> Result<()> {
    let bound = table.upper_bound() as i128;
    for &h in shifts {
        let top = n as i128 + h as i128;
        let bottom = 1 + h as i128;
        if top.abs() > bound || bottom.abs() > bound {
            return Err(Error::OutOfRange(format!(
                "shift {h} pushes indices outside ±{bound} at N = {n}"
            )));
        }
    }
    Ok(())
}

/// How the prime average in a dilated correlation weights its primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimeWeighting {
    /// `1/π(P₀)` on every prime `p ≤ P₀`.
    Uniform,
    /// Weights `∝ 1/p` on the dyadic block `P₀/2 ≤ p < P₀`.
    DyadicReciprocal,
}

impl PrimeWeighting {
    pub fn name(self) -> &'static str {
        match self {
            PrimeWeighting::Uniform => "uniform",
            PrimeWeighting::DyadicReciprocal => "dyadic-1/p",
        }
    }
}

/// Truncated average over primes: the primes `p ≤ P₀` with a weighting.
#[derive(Clone, Debug)]
pub struct PrimeDilationSpec {
    pub prime_cutoff: u64,
    pub prime_list: Vec<u64>,
    pub weighting: PrimeWeighting,
}

impl PrimeDilationSpec {
    pub fn uniform(prime_cutoff: u64) -> Result<Self> {
        Self::new(prime_cutoff, PrimeWeighting::Uniform)
    }

    pub fn new(prime_cutoff: u64, weighting: PrimeWeighting) -> Result<Self> {
        if prime_cutoff < 2 {
            return Err(Error::Domain(
                "prime cutoff below 2 leaves no primes to average".into(),
            ));
        }
        Ok(PrimeDilationSpec {
            prime_cutoff,
            prime_list: primes_up_to(prime_cutoff),
            weighting,
        })
    }

    /// `(p, weight)` pairs in increasing prime order; weights sum to 1.
    fn weighted_primes(&self) -> Result<Vec<(u64, f64)>> {
        match self.weighting {
            PrimeWeighting::Uniform => {
                let w = 1.0 / self.prime_list.len() as f64;
                Ok(self.prime_list.iter().map(|&p| (p, w)).collect())
            }
            PrimeWeighting::DyadicReciprocal => {
                let lo = self.prime_cutoff.div_ceil(2);
                let block: Vec<u64> = self
                    .prime_list
                    .iter()
                    .copied()
                    .filter(|&p| p >= lo && p < self.prime_cutoff)
                    .collect();
                if block.is_empty() {
                    return Err(Error::Domain(format!(
                        "no primes in dyadic block [{} , {})",
                        lo, self.prime_cutoff
                    )));
                }
                let mut mass = Kahan::default();
                for &p in &block {
                    mass.add(1.0 / p as f64);
                }
                let total = mass.value();
                Ok(block.iter().map(|&p| (p, 1.0 / p as f64 / total)).collect())
            }
        }
    }
}

/// A correlation measurement.
#[derive(Clone, Debug)]
pub struct CorrValue {
    pub value: f64,
    pub n: u64,
    pub pattern: ShiftPattern,
    pub kind: AverageKind,
    pub dilation: Option<PrimeDilationSpec>,
}

fn shifted_product_mean<T: ArithmeticTable>(
    table: &T,
    shifts: &[i64],
    n: u64,
    kind: AverageKind,
) -> Result<f64> {
    check_shift_range(shifts, table, n)?;
    normalized_mean(n, kind, |k| {
        let mut v = 1i32;
        for &h in shifts {
            v *= i32::from(table.value_signed_unchecked(k as i64 + h));
        }
        f64::from(v)
    })
}

/// Finite-N average of `∏_j a(n + h_j)` over `n ∈ [1, N]`.
pub fn multi_corr<T: ArithmeticTable>(
    table: &T,
    pattern: &ShiftPattern,
    n: u64,
    kind: AverageKind,
) -> Result<CorrValue> {
    let value = shifted_product_mean(table, pattern.shifts(), n, kind)?;
    Ok(CorrValue {
        value,
        n,
        pattern: pattern.clone(),
        kind,
        dilation: None,
    })
}

/// Weighted prime average of the correlations with dilated shifts
/// `(p·h_1, …, p·h_ℓ)`. Per-prime results merge in prime order.
pub fn prime_dilated_corr<T: ArithmeticTable>(
    table: &T,
    pattern: &ShiftPattern,
    n: u64,
    kind: AverageKind,
    dil: &PrimeDilationSpec,
) -> Result<CorrValue> {
    let weighted = dil.weighted_primes()?;
    // validate the worst dilation once, then scan unchecked
    let p_max = weighted.last().map_or(2, |&(p, _)| p);
    let worst: Vec<i64> = pattern
        .shifts()
        .iter()
        .map(|&h| {
            h.checked_mul(p_max as i64)
                .ok_or_else(|| Error::OutOfRange("dilated shift overflows i64".into()))
        })
        .collect::<Result<_>>()?;
    check_shift_range(&worst, table, n)?;

    let per_prime: Vec<f64> = weighted
        .par_iter()
        .map(|&(p, _)| {
            let scaled: Vec<i64> = pattern.shifts().iter().map(|&h| h * p as i64).collect();
            shifted_product_mean(table, &scaled, n, kind)
        })
        .collect::<Result<_>>()?;
    let mut acc = Kahan::default();
    for (v, &(_, w)) in per_prime.iter().zip(&weighted) {
        acc.add(w * v);
    }
    Ok(CorrValue {
        value: acc.value(),
        n,
        pattern: pattern.clone(),
        kind,
        dilation: Some(dil.clone()),
    })
}

/// Residual of the prime-dilation sign identity:
/// `| corr(h) − (−1)^ℓ · E_p corr(p·h) |` under logarithmic averaging.
pub fn tao_residual<T: ArithmeticTable>(
    table: &T,
    pattern: &ShiftPattern,
    n: u64,
    dil: &PrimeDilationSpec,
) -> Result<f64> {
    let direct = multi_corr(table, pattern, n, AverageKind::Logarithmic)?;
    let dilated = prime_dilated_corr(table, pattern, n, AverageKind::Logarithmic, dil)?;
    let sign = if pattern.len() % 2 == 0 { 1.0 } else { -1.0 };
    Ok((direct.value - sign * dilated.value).abs())
}

/// A word `ε_{−m}, …, ε_m` over `{−1, 0, +1}` of length `2m + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CylinderPattern {
    half_width: u32,
    letters: Vec<i8>,
}

impl CylinderPattern {
    pub fn new(half_width: u32, letters: Vec<i8>) -> Result<Self> {
        if letters.len() != 2 * half_width as usize + 1 {
            return Err(Error::Domain(format!(
                "cylinder word must have length {}",
                2 * half_width + 1
            )));
        }
        if letters.iter().any(|&l| !(-1..=1).contains(&l)) {
            return Err(Error::Domain("cylinder letters must be in {-1, 0, 1}".into()));
        }
        Ok(CylinderPattern {
            half_width,
            letters,
        })
    }

    pub fn half_width(&self) -> u32 {
        self.half_width
    }

    pub fn letters(&self) -> &[i8] {
        &self.letters
    }

    /// Letter at offset `j ∈ [−m, m]`.
    pub fn letter(&self, j: i64) -> i8 {
        self.letters[(j + self.half_width as i64) as usize]
    }
}

fn check_window_range<T: ArithmeticTable>(table: &T, m: u32, n: u64) -> Result<()> {
    let shifts = [-(m as i64), m as i64];
    check_shift_range(&shifts, table, n)
}

/// Average of the indicator `a(n + j) = ε_j for all |j| ≤ m`.
pub fn cylinder_frequency<T: ArithmeticTable>(
    table: &T,
    cyl: &CylinderPattern,
    n: u64,
    kind: AverageKind,
) -> Result<f64> {
    let m = cyl.half_width;
    check_window_range(table, m, n)?;
    normalized_mean(n, kind, |k| {
        for j in -(m as i64)..=(m as i64) {
            if table.value_signed_unchecked(k as i64 + j) != cyl.letter(j) {
                return 0.0;
            }
        }
        1.0
    })
}

const CYL_BASE: u64 = 3;

fn letter_code(v: i8) -> u64 {
    // 0 → 0, +1 → 1, −1 → 2
    match v {
        0 => 0,
        1 => 1,
        _ => 2,
    }
}

fn word_index_at<T: ArithmeticTable>(table: &T, center: i64, m: u32) -> u64 {
    let mut idx = 0u64;
    // most significant digit at offset +m
    for j in (-(m as i64)..=(m as i64)).rev() {
        idx = idx * CYL_BASE + letter_code(table.value_signed_unchecked(center + j));
    }
    idx
}

/// All `3^(2m+1)` cylinder frequencies at once, indexed by the base-3
/// word code with the letter at offset −m least significant.
/// Frequencies are each in `[0, 1]` and sum to 1 up to rounding.
pub fn cylinder_spectrum<T: ArithmeticTable>(
    table: &T,
    m: u32,
    n: u64,
    kind: AverageKind,
) -> Result<Vec<f64>> {
    if m > 12 {
        return Err(Error::Capacity("cylinder spectrum capped at m = 12".into()));
    }
    check_window_range(table, m, n)?;
    let cells = CYL_BASE.pow(2 * m + 1) as usize;
    let top_place = CYL_BASE.pow(2 * m);

    // chunked scan with a rolling base-3 word; per-chunk cell sums merge
    // in chunk order, exactly like accum::sum_range
    let first = 1 / CHUNK;
    let last = n / CHUNK;
    let partials: Vec<(Vec<Kahan>, Kahan)> = (first..=last)
        .into_par_iter()
        .map(|ci| {
            let a = (ci * CHUNK).max(1);
            let b = (ci * CHUNK + (CHUNK - 1)).min(n);
            let mut cell = vec![Kahan::default(); cells];
            let mut mass = Kahan::default();
            let mut word = word_index_at(table, a as i64, m);
            for k in a..=b {
                let w = match kind {
                    AverageKind::Cesaro => 1.0,
                    AverageKind::Logarithmic => 1.0 / k as f64,
                };
                cell[word as usize].add(w);
                mass.add(w);
                // roll the window one step right
                word /= CYL_BASE;
                word += letter_code(table.value_signed_unchecked(k as i64 + 1 + m as i64)) * top_place;
            }
            (cell, mass)
        })
        .collect();

    let mut cell = vec![Kahan::default(); cells];
    let mut mass = Kahan::default();
    for (pc, pm) in partials {
        for (c, p) in cell.iter_mut().zip(pc) {
            c.merge(p);
        }
        mass.merge(pm);
    }
    let total = mass.value();
    Ok(cell.iter().map(|c| c.value() / total).collect())
}

/// Decode a spectrum index into its cylinder pattern.
pub fn spectrum_pattern(index: u64, m: u32) -> CylinderPattern {
    let mut letters = Vec::with_capacity(2 * m as usize + 1);
    let mut rest = index;
    for _ in 0..(2 * m + 1) {
        letters.push(match rest % CYL_BASE {
            0 => 0i8,
            1 => 1,
            _ => -1,
        });
        rest /= CYL_BASE;
    }
    CylinderPattern::new(m, letters).expect("constructed word is well-formed")
}

/// Rebuild `multi_corr` from cylinder frequencies,
/// `Σ_ε (∏_j ε_{h_j}) · freq(ε)`, and return the absolute difference
/// from the direct computation. A finite-N identity: the two sides are
/// the same sum regrouped, so the result is float-level small.
pub fn correspondence_check<T: ArithmeticTable>(
    table: &T,
    pattern: &ShiftPattern,
    m: u32,
    n: u64,
    kind: AverageKind,
) -> Result<f64> {
    let max_shift = pattern.shifts().iter().map(|h| h.unsigned_abs()).max().unwrap();
    if u64::from(m) < max_shift {
        return Err(Error::Domain(format!(
            "cylinder half-width {m} smaller than max |shift| {max_shift}"
        )));
    }
    let direct = multi_corr(table, pattern, n, kind)?.value;
    let freqs = cylinder_spectrum(table, m, n, kind)?;
    let mut acc = Kahan::default();
    for (idx, &f) in freqs.iter().enumerate() {
        if f == 0.0 {
            continue;
        }
        let word = spectrum_pattern(idx as u64, m);
        let mut prod = 1i32;
        for &h in pattern.shifts() {
            prod *= i32::from(word.letter(h));
        }
        acc.add(f64::from(prod) * f);
    }
    Ok((acc.value() - direct).abs())
}

// ---------------------------------------------------------------------------
// Gowers uniformity norms on Z/NZ
// ---------------------------------------------------------------------------

/// Operation budget above which cube dimensions are subsampled
/// (deterministically) instead of enumerated.
const GOWERS_EXACT_BUDGET: f64 = 1.5e9;
const GOWERS_SAMPLE_SEED: u64 = 0x5eed_90e5;

fn mean(f: &[Complex64]) -> Complex64 {
    let mut acc = crate::accum::KahanComplex::default();
    for &z in f {
        acc.add(z);
    }
    acc.value() / f.len() as f64
}

fn mult_derivative(f: &[Complex64], h: usize, out: &mut Vec<Complex64>) {
    let n = f.len();
    out.clear();
    out.extend((0..n).map(|i| f[(i + h) % n] * f[i].conj()));
}

fn norm_pow(f: &[Complex64], k: u32) -> f64 {
    // returns ‖f‖_{U^k}^{2^k}
    if k == 1 {
        return mean(f).norm_sqr();
    }
    let n = f.len();
    let full_cost = (n as f64).powi(k as i32);
    let hs: Vec<usize> = if full_cost <= GOWERS_EXACT_BUDGET {
        (0..n).collect()
    } else {
        let subtree = (n as f64).powi(k as i32 - 1);
        let samples = ((GOWERS_EXACT_BUDGET / subtree) as usize).clamp(32, n);
        let mut rng = ChaCha8Rng::seed_from_u64(GOWERS_SAMPLE_SEED ^ u64::from(k));
        (0..samples).map(|_| rng.gen_range(0..n)).collect()
    };
    let partials: Vec<f64> = hs
        .par_iter()
        .map(|&h| {
            let mut buf = Vec::with_capacity(n);
            mult_derivative(f, h, &mut buf);
            norm_pow(&buf, k - 1)
        })
        .collect();
    let mut acc = Kahan::default();
    for p in partials {
        acc.add(p);
    }
    acc.value() / hs.len() as f64
}

/// Gowers `U^k` norm of `f` on the cyclic group `Z/NZ`, by the inductive
/// `‖f‖_{U^{k+1}}^{2^{k+1}} = E_h ‖f̄ · f(·+h)‖_{U^k}^{2^k}` recursion.
/// Exact for inputs within the operation budget; larger inputs
/// subsample shift dimensions with a fixed seed (still deterministic).
pub fn gowers_norm(f: &[Complex64], k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("Gowers norm needs k ≥ 1".into()));
    }
    if k > 4 {
        return Err(Error::Domain("Gowers norm capped at k = 4".into()));
    }
    if f.len() < 2 {
        return Err(Error::Domain("Gowers norm needs at least 2 samples".into()));
    }
    let pow = norm_pow(f, k).max(0.0);
    Ok(pow.powf(1.0 / f64::from(1u32 << k)))
}

/// [`gowers_norm`] of a ±1/0-valued table segment `[1, N]`, cyclically.
pub fn gowers_norm_table<T: ArithmeticTable>(table: &T, n: u64, k: u32) -> Result<f64> {
    if n > table.upper_bound() {
        return Err(Error::OutOfRange(format!(
            "segment bound {n} exceeds table bound {}",
            table.upper_bound()
        )));
    }
    if n > (1 << 26) {
        return Err(Error::Capacity("Gowers segment capped at 2^26 samples".into()));
    }
    let f: Vec<Complex64> = (1..=n).map(|i| Complex64::from(f64::from(table.value(i)))).collect();
    gowers_norm(&f, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::AverageKind::{Cesaro, Logarithmic};
    use crate::phase;
    use crate::sieve::{build_liouville, build_mobius, SieveConfig};

    fn lam(n: u64) -> crate::sieve::LiouvilleTable {
        build_liouville(n, &SieveConfig::default()).unwrap()
    }

    fn mob(n: u64) -> crate::sieve::MobiusTable {
        build_mobius(n, &SieveConfig::default()).unwrap()
    }

    #[test]
    fn lambda_squared_correlates_to_one_exactly() {
        let t = lam(10_000);
        let p = ShiftPattern::new(vec![0, 0]).unwrap();
        for kind in [Cesaro, Logarithmic] {
            let c = multi_corr(&t, &p, 10_000, kind).unwrap();
            assert_eq!(c.value, 1.0);
        }
    }

    #[test]
    fn mobius_squared_is_squarefree_density() {
        let n = 1_000_000u64;
        let t = mob(n);
        let p = ShiftPattern::new(vec![0, 0]).unwrap();
        // independent direct-summation oracle over μ(k)²
        let mut num = Kahan::default();
        let mut den = Kahan::default();
        let mut count = 0u64;
        for k in 1..=n {
            let sq = f64::from(crate::sieve::ArithmeticTable::value(&t, k).pow(2));
            num.add(sq / k as f64);
            den.add(1.0 / k as f64);
            count += u64::from(sq == 1.0);
        }
        let log_oracle = num.value() / den.value();
        let ces_oracle = count as f64 / n as f64;

        let ces = multi_corr(&t, &p, n, Cesaro).unwrap();
        assert!((ces.value - ces_oracle).abs() < 1e-12);
        // natural squarefree density is 6/π² ≈ 0.607927
        assert!((ces.value - 0.6079).abs() < 2e-3, "got {}", ces.value);

        let log = multi_corr(&t, &p, n, Logarithmic).unwrap();
        assert!((log.value - log_oracle).abs() < 1e-12);
        // the log-weighted finite value carries a slowly decaying
        // correction; measured 0.65608 at N = 10^6
        assert!((log.value - 0.6561).abs() < 2e-3, "got {}", log.value);
    }

    #[test]
    fn shift_symmetry_is_exact() {
        let t = lam(50_010);
        let a = multi_corr(&t, &ShiftPattern::new(vec![0, 3, 7]).unwrap(), 50_000, Logarithmic)
            .unwrap();
        let b = multi_corr(&t, &ShiftPattern::new(vec![7, 0, 3]).unwrap(), 50_000, Logarithmic)
            .unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn range_violations_error() {
        let t = lam(1000);
        let p = ShiftPattern::new(vec![0, 5]).unwrap();
        assert!(multi_corr(&t, &p, 996, Logarithmic).is_err());
        assert!(multi_corr(&t, &p, 995, Logarithmic).is_ok());
    }

    #[test]
    fn shift_covariance_boundary_bound() {
        // shifting all offsets by c moves only boundary mass: under
        // Cesàro weights that mass is 2ℓ|c|/N, far below 1e-3; under
        // logarithmic weights the first |c| terms carry H_c/H_N.
        let t = lam(1_000_100);
        let n = 1_000_000u64;
        let ell = 2.0;
        let ces_base = multi_corr(&t, &ShiftPattern::new(vec![0, 1]).unwrap(), n, Cesaro)
            .unwrap()
            .value;
        let log_base = multi_corr(&t, &ShiftPattern::new(vec![0, 1]).unwrap(), n, Logarithmic)
            .unwrap()
            .value;
        for c in [-10i64, -3, 3, 10] {
            let p = ShiftPattern::new(vec![c, 1 + c]).unwrap();
            let ces = multi_corr(&t, &p, n, Cesaro).unwrap().value;
            assert!(
                (ces - ces_base).abs() < 1e-3,
                "Cesàro c={c}: |{ces} - {ces_base}|"
            );
            let log = multi_corr(&t, &p, n, Logarithmic).unwrap().value;
            let boundary_mass = crate::averages::harmonic(c.unsigned_abs())
                / crate::averages::harmonic(n);
            assert!(
                (log - log_base).abs() <= ell * boundary_mass + 1e-12,
                "log c={c}: |{log} - {log_base}| vs mass {boundary_mass}"
            );
        }
    }

    #[test]
    fn dilation_by_primes_with_zero_shift_is_identity() {
        let t = lam(100_000);
        let p = ShiftPattern::new(vec![0]).unwrap();
        let dil = PrimeDilationSpec::uniform(50).unwrap();
        let plain = multi_corr(&t, &p, 100_000, Logarithmic).unwrap();
        let dilated = prime_dilated_corr(&t, &p, 100_000, Logarithmic, &dil).unwrap();
        assert!((plain.value - dilated.value).abs() < 1e-13);
    }

    #[test]
    fn dilated_corr_is_deterministic() {
        let t = lam(200_000);
        let p = ShiftPattern::new(vec![0, 1]).unwrap();
        let dil = PrimeDilationSpec::uniform(100).unwrap();
        let a = prime_dilated_corr(&t, &p, 100_000, Logarithmic, &dil).unwrap();
        let b = prime_dilated_corr(&t, &p, 100_000, Logarithmic, &dil).unwrap();
        assert_eq!(a.value, b.value);
        assert!(a.value.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn dyadic_weighting_runs_and_normalizes() {
        let t = lam(200_000);
        let p = ShiftPattern::new(vec![0]).unwrap();
        let dil = PrimeDilationSpec::new(100, PrimeWeighting::DyadicReciprocal).unwrap();
        // pattern (0) is undilated by every p, so any normalized weighting
        // must reproduce the plain correlation
        let plain = multi_corr(&t, &p, 100_000, Logarithmic).unwrap();
        let dilated = prime_dilated_corr(&t, &p, 100_000, Logarithmic, &dil).unwrap();
        assert!((plain.value - dilated.value).abs() < 1e-13);
    }

    #[test]
    fn empty_prime_list_is_domain_error() {
        assert!(PrimeDilationSpec::uniform(1).is_err());
    }

    #[test]
    fn tao_residual_on_equal_even_pattern_is_zero() {
        let t = lam(10_000);
        let p = ShiftPattern::new(vec![0, 0]).unwrap();
        let dil = PrimeDilationSpec::uniform(30).unwrap();
        let r = tao_residual(&t, &p, 10_000, &dil).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn tao_residual_single_zero_shift_is_twice_log_mean() {
        let t = lam(100_000);
        let p = ShiftPattern::new(vec![0]).unwrap();
        let dil = PrimeDilationSpec::uniform(100).unwrap();
        let r = tao_residual(&t, &p, 100_000, &dil).unwrap();
        let mean = multi_corr(&t, &p, 100_000, Logarithmic).unwrap().value;
        assert!((r - 2.0 * mean.abs()).abs() < 1e-12);
    }

    #[test]
    fn cylinder_lambda_never_vanishes() {
        let t = lam(10_000);
        let cyl = CylinderPattern::new(0, vec![0]).unwrap();
        let f = cylinder_frequency(&t, &cyl, 10_000, Logarithmic).unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn cylinder_mobius_zero_density() {
        let t = mob(1_000_000);
        let cyl = CylinderPattern::new(0, vec![0]).unwrap();
        for kind in [Cesaro, Logarithmic] {
            // complement of the squarefree density measured independently
            let f = cylinder_frequency(&t, &cyl, 1_000_000, kind).unwrap();
            let sq = multi_corr(&t, &ShiftPattern::new(vec![0, 0]).unwrap(), 1_000_000, kind)
                .unwrap()
                .value;
            assert!((f - (1.0 - sq)).abs() < 1e-12);
            if kind == Cesaro {
                assert!((f - 0.3921).abs() < 2e-3, "got {f}");
            }
        }
    }

    #[test]
    fn spectrum_partitions_to_one_and_matches_single_patterns() {
        for kind in [Cesaro, Logarithmic] {
            let t = mob(50_050);
            let freqs = cylinder_spectrum(&t, 1, 50_000, kind).unwrap();
            let total: f64 = freqs.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "total {total}");
            assert!(freqs.iter().all(|&f| (0.0..=1.0 + 1e-12).contains(&f)));
            for idx in [0usize, 5, 13, 22, 26] {
                let pat = spectrum_pattern(idx as u64, 1);
                let direct = cylinder_frequency(&t, &pat, 50_000, kind).unwrap();
                assert!(
                    (freqs[idx] - direct).abs() < 1e-12,
                    "idx {idx}: {} vs {direct}",
                    freqs[idx]
                );
            }
        }
    }

    #[test]
    fn correspondence_identity_examples() {
        let t = lam(100_100);
        let m1 = mob(100_100);
        let n = 100_000;
        let d = correspondence_check(&t, &ShiftPattern::new(vec![0]).unwrap(), 0, n, Logarithmic)
            .unwrap();
        assert!(d < 1e-12, "λ single shift: {d}");
        let d = correspondence_check(&m1, &ShiftPattern::new(vec![0, 1]).unwrap(), 1, n, Logarithmic)
            .unwrap();
        assert!(d < 1e-10, "μ (0,1): {d}");
        let d = correspondence_check(
            &t,
            &ShiftPattern::new(vec![-1, 0, 1]).unwrap(),
            1,
            n,
            Logarithmic,
        )
        .unwrap();
        assert!(d < 1e-10, "λ (−1,0,1): {d}");
    }

    #[test]
    fn correspondence_rejects_narrow_window() {
        let t = lam(1000);
        let err = correspondence_check(&t, &ShiftPattern::new(vec![0, 2]).unwrap(), 1, 500, Logarithmic);
        assert!(err.is_err());
    }

    #[test]
    fn gowers_of_constant_one() {
        let f = vec![Complex64::new(1.0, 0.0); 64];
        for k in 1..=4 {
            assert!((gowers_norm(&f, k).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gowers_rejects_bad_k() {
        let f = vec![Complex64::new(1.0, 0.0); 16];
        assert!(gowers_norm(&f, 0).is_err());
        assert!(gowers_norm(&f, 5).is_err());
    }

    /// Direct 2^k-fold cube-average oracle, independent of the recursion.
    fn gowers_oracle(f: &[Complex64], k: u32) -> f64 {
        let n = f.len();
        let mut total = Kahan::default();
        let mut count = 0u64;
        let dims = k as usize;
        let mut hs = vec![0usize; dims];
        loop {
            // for this h-tuple, average over n of the cube product
            let mut inner = Kahan::default();
            for base in 0..n {
                let mut prod = Complex64::new(1.0, 0.0);
                for mask in 0..(1u32 << dims) {
                    let mut idx = base;
                    for (d, &h) in hs.iter().enumerate() {
                        if mask >> d & 1 == 1 {
                            idx += h;
                        }
                    }
                    let v = f[idx % n];
                    prod *= if mask.count_ones() % 2 == 1 { v.conj() } else { v };
                }
                inner.add(prod.re); // imaginary parts cancel in the full average
            }
            total.add(inner.value() / n as f64);
            count += 1;
            // odometer over h-tuples
            let mut d = 0;
            loop {
                if d == dims {
                    return (total.value() / count as f64).max(0.0).powf(1.0 / f64::from(1u32 << k));
                }
                hs[d] += 1;
                if hs[d] < n {
                    break;
                }
                hs[d] = 0;
                d += 1;
            }
        }
    }

    #[test]
    fn gowers_matches_direct_cube_oracle() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let f: Vec<Complex64> = (0..24)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for k in 1..=3 {
            let fast = gowers_norm(&f, k).unwrap();
            let slow = gowers_oracle(&f, k);
            assert!((fast - slow).abs() < 1e-10, "k={k}: {fast} vs {slow}");
        }
    }

    #[test]
    fn gowers_quadratic_phase_has_square_root_smallness() {
        // e(n²/N) at odd prime N: the 4-fold sum collapses to exactly 1/N
        let n = 997u64;
        let f: Vec<Complex64> = (0..n)
            .map(|i| phase::e(phase::frac_mul_int((i * i) as i128, 1.0 / n as f64)))
            .collect();
        let u2 = gowers_norm(&f, 2).unwrap();
        let pow4 = u2.powi(4);
        assert!((pow4 - 1.0 / n as f64).abs() < 1e-6, "U²⁴ = {pow4}");
        // whereas the linear character is maximally U²-structured
        let g: Vec<Complex64> = (0..n)
            .map(|i| phase::e(phase::frac_mul_int(i as i128, 1.0 / n as f64)))
            .collect();
        let u2g = gowers_norm(&g, 2).unwrap();
        assert!((u2g - 1.0).abs() < 1e-9, "character U² = {u2g}");
    }

    #[test]
    fn gowers_lambda_segment_is_small() {
        let t = lam(10_000);
        let u2 = gowers_norm_table(&t, 10_000, 2).unwrap();
        assert!(u2 < 0.2, "U² of λ segment = {u2}");
    }

    #[test]
    fn gowers_monotone_in_k() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f: Vec<Complex64> = (0..60)
            .map(|_| Complex64::from(if rng.gen::<bool>() { 1.0 } else { -1.0 }))
            .collect();
        let t = lam(64);
        let g: Vec<Complex64> = (1..=64)
            .map(|i| Complex64::from(f64::from(crate::sieve::ArithmeticTable::value(&t, i))))
            .collect();
        for input in [f, g] {
            let norms: Vec<f64> = (1..=4).map(|k| gowers_norm(&input, k).unwrap()).collect();
            for k in 0..3 {
                assert!(
                    norms[k] <= norms[k + 1] + 1e-10,
                    "monotonicity at k={}: {} vs {}",
                    k + 1,
                    norms[k],
                    norms[k + 1]
                );
            }
        }
    }
}
