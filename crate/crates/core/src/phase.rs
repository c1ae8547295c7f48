//! Unit-circle phases and exact mod-1 reductions.

use num_complex::Complex64;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::f64::consts::TAU;

/// `e(t) = exp(2πi t)`.
#[inline]
pub fn e(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// Fractional part in `[0, 1)`. The subtraction `x - floor(x)` is exact
/// in IEEE-754 (Sterbenz), so no precision is lost here.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `m·alpha mod 1` without the O(|m·alpha|·eps) rounding loss of the
/// naive product: the fma residual recovers the low bits exactly.
/// Requires `|m| < 2^53`.
#[inline]
pub fn frac_mul_int(m: i128, alpha: f64) -> f64 {
    let mf = m as f64;
    debug_assert_eq!(mf as i128, m, "integer exceeds the exact f64 range");
    let p = mf * alpha;
    let err = mf.mul_add(alpha, -p);
    frac(frac(p) + err)
}

/// Exact fractional part of `P(m) = c_0 + c_1 m + … + c_k m^k` for an
/// unsigned integer `m`, where the coefficients are f64 (hence dyadic
/// rationals). Computed in exact integer arithmetic over the common
/// denominator `2^D`, then rounded once to f64.
pub fn frac_poly_exact(m: u64, coeffs: &[f64]) -> f64 {
    assert!(!coeffs.is_empty(), "empty coefficient list");
    // decompose each coefficient as sign * mant * 2^exp
    let parts: Vec<(BigInt, i64)> = coeffs
        .iter()
        .map(|&c| {
            if c == 0.0 {
                (BigInt::zero(), 0)
            } else {
                let bits = c.to_bits();
                let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
                let raw_exp = ((bits >> 52) & 0x7ff) as i64;
                let raw_mant = bits & ((1u64 << 52) - 1);
                let (mant, exp) = if raw_exp == 0 {
                    (raw_mant, -1074)
                } else {
                    (raw_mant | (1u64 << 52), raw_exp - 1075)
                };
                (BigInt::from(mant) * sign, exp)
            }
        })
        .collect();
    let d = parts
        .iter()
        .filter(|(m, _)| !m.is_zero())
        .map(|&(_, e)| (-e).max(0))
        .max()
        .unwrap_or(0) as u64;
    let mut num = BigInt::zero();
    let mb = BigInt::from(m);
    for (i, (mant, exp)) in parts.iter().enumerate() {
        if mant.is_zero() {
            continue;
        }
        let shift = (exp + d as i64) as u64;
        num += mant * mb.pow(i as u32) << shift;
    }
    // reduce mod 2^D and convert the top bits
    let modulus = BigInt::from(1u8) << d;
    let mut r = num % &modulus;
    if r.is_negative() {
        r += &modulus;
    }
    if d <= 63 {
        r.to_u64().unwrap() as f64 / (1u64 << d) as f64
    } else {
        let top = (r >> (d - 63)).to_u64().unwrap();
        top as f64 / (1u64 << 63) as f64
    }
}

/// Forward-difference generator for `frac(P(n))` along consecutive `n`.
///
/// A degree-k difference table drifts like t^k·eps/k! after t steps, so
/// the table is re-seeded from [`frac_poly_exact`] every `restart` steps;
/// the interval is chosen to keep the phase error below ~3e-12.
pub struct PolyPhase {
    coeffs: Vec<f64>,
    diffs: Vec<f64>,
    index: u64,
    since_seed: u32,
    restart: u32,
}

impl PolyPhase {
    pub fn at(start: u64, coeffs: &[f64]) -> Self {
        let k = (coeffs.len() - 1) as i32;
        let factorial: f64 = (1..=k.max(1)).map(f64::from).product();
        let budget = 3e-12 * factorial / f64::EPSILON;
        let restart = budget.powf(1.0 / k.max(1) as f64).floor().clamp(8.0, 4096.0) as u32;
        let mut gen = PolyPhase {
            coeffs: coeffs.to_vec(),
            diffs: Vec::new(),
            index: start,
            since_seed: 0,
            restart,
        };
        gen.seed();
        gen
    }

    fn seed(&mut self) {
        let k = self.coeffs.len() - 1;
        let mut table: Vec<f64> = (0..=k as u64)
            .map(|t| frac_poly_exact(self.index + t, &self.coeffs))
            .collect();
        // finite differences mod 1
        for level in 1..=k {
            for i in (level..=k).rev() {
                table[i] = frac(table[i] - table[i - 1]);
            }
        }
        self.diffs = table;
        self.since_seed = 0;
    }

    /// Phase of the current index, then advance to the next.
    #[inline]
    pub fn next_phase(&mut self) -> f64 {
        if self.since_seed >= self.restart {
            self.seed();
        }
        let out = self.diffs[0];
        let k = self.diffs.len() - 1;
        for i in 0..k {
            self.diffs[i] = frac(self.diffs[i] + self.diffs[i + 1]);
        }
        self.index += 1;
        self.since_seed += 1;
        out
    }
}
