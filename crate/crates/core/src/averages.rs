//! Streaming Cesàro and logarithmic averages of bounded sequences.
//!
//! The logarithmic average here is the classical normalization
//! `(1/log N) Σ_{n≤N} a(n)/n`; at finite N it averages the constant 1
//! to `H_N / log N ≈ 1.04` rather than to 1. The correlation operations
//! in [`crate::correlations`] normalize by the accumulated weight mass
//! instead — see there.

use crate::accum::{sum_range, sum_range_stateful, Kahan, KahanComplex};
use crate::correlations::ShiftPattern;
use crate::error::{Error, Result};
use crate::phase::{self, PolyPhase};
use crate::sieve::ArithmeticTable;
use num_complex::Complex64;

/// Averaging normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AverageKind {
    /// `(1/N) Σ_{n≤N} a(n)`
    Cesaro,
    /// `(1/log N) Σ_{n≤N} a(n)/n`
    Logarithmic,
}

impl AverageKind {
    pub fn name(self) -> &'static str {
        match self {
            AverageKind::Cesaro => "cesaro",
            AverageKind::Logarithmic => "log",
        }
    }
}

/// Multiplicative weight applied to each term of an average.
#[derive(Clone, Debug)]
pub enum WeightSpec {
    Unit,
    /// `e(n·alpha)`
    LinearPhase { alpha: f64 },
    /// `e(P(n))` with `P(n) = c_0 + c_1 n + … + c_k n^k`
    PolynomialPhase { coeffs: Vec<f64> },
}

impl WeightSpec {
    pub fn linear(alpha: f64) -> Self {
        WeightSpec::LinearPhase {
            alpha: phase::frac(alpha),
        }
    }

    /// Coefficients constant-first; reduced to `[0, 1)`.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("polynomial weight needs coefficients".into()));
        }
        Ok(WeightSpec::PolynomialPhase {
            coeffs: coeffs.into_iter().map(phase::frac).collect(),
        })
    }
}

/// Result of an averaging run.
#[derive(Clone, Copy, Debug)]
pub struct AvgResult {
    pub value: Complex64,
    pub n: u64,
    pub kind: AverageKind,
    pub term_count: u64,
}

fn check_cutoff(n: u64, kind: AverageKind) -> Result<()> {
    match kind {
        AverageKind::Cesaro if n < 1 => Err(Error::Domain("Cesàro average needs N ≥ 1".into())),
        AverageKind::Logarithmic if n < 2 => {
            Err(Error::Domain("logarithmic average needs N ≥ 2".into()))
        }
        _ => Ok(()),
    }
}

/// Average `seq` over `[1, N]` under `kind`.
pub fn average<F>(seq: F, n: u64, kind: AverageKind) -> Result<AvgResult>
where
    F: Fn(u64) -> Complex64 + Sync,
{
    check_cutoff(n, kind)?;
    let value = match kind {
        AverageKind::Cesaro => sum_range(1, n, &seq) / n as f64,
        AverageKind::Logarithmic => {
            let s: Complex64 = sum_range(1, n, |k| seq(k) / k as f64);
            s / (n as f64).ln()
        }
    };
    Ok(AvgResult {
        value,
        n,
        kind,
        term_count: n,
    })
}

/// Logarithmic average computed from running Cesàro partial sums by Abel
/// summation: `Σ a(n)/n = Σ_{m<N} A(m)/(m(m+1)) + A(N)/N`. Sequential by
/// construction; agrees with the direct form to ~1e-12 for |a| ≤ 1.
pub fn log_average_by_partial_summation<F>(seq: F, n: u64) -> Result<AvgResult>
where
    F: Fn(u64) -> Complex64,
{
    check_cutoff(n, AverageKind::Logarithmic)?;
    let mut partial = KahanComplex::default();
    let mut total = KahanComplex::default();
    for m in 1..n {
        partial.add(seq(m));
        total.add(partial.value() / (m as f64 * (m + 1) as f64));
    }
    partial.add(seq(n));
    total.add(partial.value() / n as f64);
    Ok(AvgResult {
        value: total.value() / (n as f64).ln(),
        n,
        kind: AverageKind::Logarithmic,
        term_count: n,
    })
}

/// Average of `weight(n) · ∏_j table(n + h_j)` over `[1, N]`.
///
/// `pattern: None` drops the product entirely and averages the bare
/// weight. Shifted indices use the signed extension of the table.
pub fn weighted_average<T: ArithmeticTable>(
    table: &T,
    weight: &WeightSpec,
    pattern: Option<&ShiftPattern>,
    n: u64,
    kind: AverageKind,
) -> Result<AvgResult> {
    check_cutoff(n, kind)?;
    if let Some(p) = pattern {
        p.check_range(table, n)?;
    }
    let shifts: &[i64] = pattern.map_or(&[], |p| p.shifts());
    let product = |k: u64| -> f64 {
        let mut v = 1i32;
        for &h in shifts {
            v *= i32::from(table.value_signed_unchecked(k as i64 + h));
        }
        f64::from(v)
    };
    let log_weight = |k: u64| -> f64 {
        match kind {
            AverageKind::Cesaro => 1.0,
            AverageKind::Logarithmic => 1.0 / k as f64,
        }
    };
    let sum: Complex64 = match weight {
        WeightSpec::Unit => sum_range(1, n, |k| Complex64::from(product(k) * log_weight(k))),
        WeightSpec::LinearPhase { alpha } => {
            let alpha = *alpha;
            sum_range(1, n, |k| {
                phase::e(phase::frac_mul_int(k as i128, alpha)) * (product(k) * log_weight(k))
            })
        }
        WeightSpec::PolynomialPhase { coeffs } => sum_range_stateful(
            1,
            n,
            |chunk_start| PolyPhase::at(chunk_start, coeffs),
            |gen, k| phase::e(gen.next_phase()) * (product(k) * log_weight(k)),
        ),
    };
    let value = match kind {
        AverageKind::Cesaro => sum / n as f64,
        AverageKind::Logarithmic => sum / (n as f64).ln(),
    };
    Ok(AvgResult {
        value,
        n,
        kind,
        term_count: n,
    })
}

/// Weighted mean with the weight mass of `kind` as denominator:
/// `Σ w_n t_n / Σ w_n` with `w_n = 1` (Cesàro) or `1/n` (logarithmic).
/// Constants average to themselves at every finite N. This is the
/// normalization used by the correlation operations.
pub(crate) fn normalized_mean<F>(n: u64, kind: AverageKind, term: F) -> Result<f64>
where
    F: Fn(u64) -> f64 + Sync,
{
    check_cutoff(n, kind)?;
    match kind {
        AverageKind::Cesaro => {
            let s: f64 = sum_range(1, n, &term);
            Ok(s / n as f64)
        }
        AverageKind::Logarithmic => {
            let (num, den): (f64, f64) = sum_range(1, n, |k| {
                let w = 1.0 / k as f64;
                (term(k) * w, w)
            });
            Ok(num / den)
        }
    }
}

/// Complex-valued [`normalized_mean`].
pub(crate) fn normalized_mean_complex<F>(n: u64, kind: AverageKind, term: F) -> Result<Complex64>
where
    F: Fn(u64) -> Complex64 + Sync,
{
    check_cutoff(n, kind)?;
    match kind {
        AverageKind::Cesaro => {
            let s: Complex64 = sum_range(1, n, &term);
            Ok(s / n as f64)
        }
        AverageKind::Logarithmic => {
            let (num, den): (Complex64, f64) = sum_range(1, n, |k| {
                let w = 1.0 / k as f64;
                (term(k) * w, w)
            });
            Ok(num / den)
        }
    }
}

/// Harmonic number `H_N` by direct compensated summation.
pub fn harmonic(n: u64) -> f64 {
    let mut k = Kahan::default();
    for m in 1..=n {
        k.add(1.0 / m as f64);
    }
    k.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{build_liouville, SieveConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one(_: u64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn cesaro_of_ones_is_exact() {
        let r = average(one, 100, AverageKind::Cesaro).unwrap();
        assert_eq!(r.value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn log_average_of_ones_is_harmonic_over_log() {
        let n = 1_000_000u64;
        let r = average(one, n, AverageKind::Logarithmic).unwrap();
        let oracle = harmonic(n) / (n as f64).ln();
        assert!((r.value.re - oracle).abs() < 1e-12);
        assert!((r.value.re - 1.04177).abs() < 1e-4, "got {}", r.value.re);
        assert_eq!(r.value.im, 0.0);
    }

    #[test]
    fn alternating_cesaro_cancels_exactly() {
        let r = average(
            |n| Complex64::from(if n % 2 == 0 { 1.0 } else { -1.0 }),
            1_000_000,
            AverageKind::Cesaro,
        )
        .unwrap();
        assert_eq!(r.value.re, 0.0);
    }

    #[test]
    fn log_average_rejects_tiny_n() {
        assert!(average(one, 1, AverageKind::Logarithmic).is_err());
        assert!(average(one, 2, AverageKind::Logarithmic).is_ok());
    }

    #[test]
    fn abel_summation_matches_direct_on_ones() {
        let direct = average(one, 1000, AverageKind::Logarithmic).unwrap();
        let abel = log_average_by_partial_summation(one, 1000).unwrap();
        assert!((direct.value - abel.value).norm() < 1e-12);
    }

    #[test]
    fn abel_summation_matches_direct_on_liouville() {
        let table = build_liouville(100_000, &SieveConfig::default()).unwrap();
        let seq = |n: u64| Complex64::from(f64::from(table.value(n)));
        let direct = average(&seq, 100_000, AverageKind::Logarithmic).unwrap();
        let abel = log_average_by_partial_summation(&seq, 100_000).unwrap();
        let rel = (direct.value - abel.value).norm() / direct.value.norm().max(1e-30);
        assert!(rel < 1e-10, "relative error {rel}");
    }

    #[test]
    fn abel_summation_matches_direct_on_half_phase() {
        let seq = |n: u64| crate::phase::e(crate::phase::frac_mul_int(n as i128, 0.5));
        let direct = average(&seq, 10_000, AverageKind::Logarithmic).unwrap();
        let abel = log_average_by_partial_summation(&seq, 10_000).unwrap();
        assert!((direct.value - abel.value).norm() < 1e-10);
    }

    #[test]
    fn abel_summation_matches_direct_on_random_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let signs: Vec<f64> = (0..100_000)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect();
            let seq = |n: u64| Complex64::from(signs[(n - 1) as usize]);
            let direct = average(&seq, 100_000, AverageKind::Logarithmic).unwrap();
            let abel = log_average_by_partial_summation(&seq, 100_000).unwrap();
            let rel = (direct.value - abel.value).norm() / direct.value.norm().max(1e-30);
            assert!(rel < 1e-10, "relative error {rel}");
        }
    }

    #[test]
    fn linearity_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a: Vec<Complex64> = (0..5000)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / 2.0)
            .collect();
        let b: Vec<Complex64> = (0..5000)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / 2.0)
            .collect();
        let (c1, c2) = (Complex64::new(0.3, -0.7), Complex64::new(-1.2, 0.4));
        for kind in [AverageKind::Cesaro, AverageKind::Logarithmic] {
            let fa = |n: u64| a[(n - 1) as usize];
            let fb = |n: u64| b[(n - 1) as usize];
            let combo = |n: u64| c1 * a[(n - 1) as usize] + c2 * b[(n - 1) as usize];
            let va = average(&fa, 5000, kind).unwrap().value;
            let vb = average(&fb, 5000, kind).unwrap().value;
            let vc = average(&combo, 5000, kind).unwrap().value;
            assert!((vc - (c1 * va + c2 * vb)).norm() < 1e-12);
            let sup = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(va.norm() <= sup * (1.0 + 1e-12) * 1.05);
        }
    }

    #[test]
    fn weighted_unit_empty_pattern_is_one() {
        let table = build_liouville(100, &SieveConfig::default()).unwrap();
        let r = weighted_average(
            &table,
            &WeightSpec::linear(0.0),
            None,
            100,
            AverageKind::Cesaro,
        )
        .unwrap();
        assert_eq!(r.value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn weighted_polynomial_matches_linear_special_case() {
        let table = build_liouville(2000, &SieveConfig::default()).unwrap();
        let alpha = 0.6180339887498949;
        let lin = weighted_average(
            &table,
            &WeightSpec::linear(alpha),
            None,
            2000,
            AverageKind::Cesaro,
        )
        .unwrap();
        let poly = weighted_average(
            &table,
            &WeightSpec::polynomial(vec![0.0, alpha]).unwrap(),
            None,
            2000,
            AverageKind::Cesaro,
        )
        .unwrap();
        assert!((lin.value - poly.value).norm() < 1e-11);
    }

    #[test]
    fn normalized_mean_of_ones_is_one() {
        for kind in [AverageKind::Cesaro, AverageKind::Logarithmic] {
            let v = normalized_mean(1_000, kind, |_| 1.0).unwrap();
            assert_eq!(v, 1.0);
        }
    }
}
