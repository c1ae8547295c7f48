//! Exact arithmetic for arithmetic-progression sequences in unipotent
//! integer matrix groups.
//!
//! The concrete group family is the full upper-triangular unipotent
//! group `U_d` (unit diagonal, integer entries, 2 ≤ d ≤ 8). Its lower
//! central series has a clean band description: `G_m` consists of the
//! matrices whose superdiagonal bands `1..m−1` vanish, so `G_1 = U_d`,
//! `G_d = {e}`, and membership is decidable by inspection.
//!
//! A sequence `g_j = a_0 · a_1^C(j,1) · a_2^C(j,2) ⋯ a_s^C(j,s)` with
//! `a_m ∈ G_m` is generated by [`hp_generate`]; such sequences form a
//! group under pointwise multiplication and are characterized by the
//! discrete derivative `(∂g)_j = g_{j+1} g_j^{−1}` landing in `G_m`
//! after m iterations ([`leibman_check`]), with `∂^(s+1)` identically
//! the identity. All arithmetic is exact over big integers.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// Signed binomial coefficient `C(n, m) = n(n−1)⋯(n−m+1)/m!` for any
/// integer `n` and `m ≥ 0`; the empty product makes `C(n, 0) = 1`.
pub fn binom_signed(n: i64, m: u32) -> BigInt {
    let mut num = BigInt::one();
    for t in 0..i64::from(m) {
        num *= BigInt::from(n - t);
    }
    let mut den = BigInt::one();
    for t in 2..=u64::from(m) {
        den *= BigInt::from(t);
    }
    num / den
}

/// Upper-triangular integer matrix with unit diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnipotentMatrix {
    dim: usize,
    entries: Vec<BigInt>, // row-major d×d
}

impl UnipotentMatrix {
    pub const MIN_DIM: usize = 2;
    pub const MAX_DIM: usize = 8;

    fn check_dim(dim: usize) -> Result<()> {
        if !(Self::MIN_DIM..=Self::MAX_DIM).contains(&dim) {
            return Err(Error::Domain(format!(
                "dimension {dim} outside [{}, {}]",
                Self::MIN_DIM,
                Self::MAX_DIM
            )));
        }
        Ok(())
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        Ok(UnipotentMatrix { dim, entries })
    }

    /// Validates unit diagonal and zero strict lower triangle.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = rows.len();
        Self::check_dim(dim)?;
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Domain("matrix rows must be square".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if !row[i].is_one() {
                return Err(Error::Domain(format!("diagonal entry ({i},{i}) must be 1")));
            }
            for (j, v) in row.iter().enumerate().take(i) {
                if !v.is_zero() {
                    return Err(Error::Domain(format!(
                        "lower-triangle entry ({i},{j}) must be 0"
                    )));
                }
            }
        }
        Ok(UnipotentMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Identity plus a single entry `v` at `(row, col)`, `row < col`.
    pub fn elementary(dim: usize, row: usize, col: usize, v: impl Into<BigInt>) -> Result<Self> {
        if row >= col || col >= dim {
            return Err(Error::Domain(format!(
                "elementary position ({row},{col}) must lie strictly above the diagonal"
            )));
        }
        let mut m = Self::identity(dim)?;
        m.entries[row * dim + col] = v.into();
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim).map(<[BigInt]>::to_vec).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                if i == j {
                    self.get(i, j).is_one()
                } else {
                    self.get(i, j).is_zero()
                }
            })
        })
    }

    /// True iff every entry on superdiagonal band `band` is zero.
    pub fn band_is_zero(&self, band: usize) -> bool {
        (0..self.dim.saturating_sub(band)).all(|i| self.get(i, i + band).is_zero())
    }

    pub fn mul(&self, other: &UnipotentMatrix) -> UnipotentMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let d = self.dim;
        let mut entries = vec![BigInt::zero(); d * d];
        for i in 0..d {
            // both factors are upper triangular: k runs over [i, d)
            for k in i..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in k..d {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        entries[i * d + j] += a * b;
                    }
                }
            }
        }
        UnipotentMatrix { dim: d, entries }
    }

    /// Exact inverse by back-substitution; unipotent inverses are
    /// integral.
    pub fn inverse(&self) -> UnipotentMatrix {
        let d = self.dim;
        let mut inv = UnipotentMatrix::identity(d).expect("dimension already validated");
        // solve self · X = I column by column, bottom-up
        for j in 0..d {
            for i in (0..=j).rev() {
                if i == j {
                    continue; // diagonal of X is 1
                }
                let mut acc = BigInt::zero();
                for k in i + 1..=j {
                    let a = self.get(i, k);
                    if !a.is_zero() {
                        acc += a * inv.get(k, j);
                    }
                }
                inv.entries[i * d + j] = -acc;
            }
        }
        inv
    }

    /// Matrix power with an exact (possibly negative) integer exponent:
    /// square-and-multiply on |e|, then inversion for negative e.
    pub fn pow(&self, e: &BigInt) -> UnipotentMatrix {
        let d = self.dim;
        let mut base = if e.is_negative() {
            self.inverse()
        } else {
            self.clone()
        };
        let mut result = UnipotentMatrix::identity(d).expect("dimension already validated");
        let mag = e.magnitude();
        let bits = mag.bits();
        for b in 0..bits {
            if mag.bit(b) {
                result = result.mul(&base);
            }
            if b + 1 < bits {
                base = base.mul(&base);
            }
        }
        result
    }
}

/// True iff `g` lies in the lower-central-series level `G_m` of the
/// full unipotent group: superdiagonal bands `1..m−1` vanish. Levels
/// 0 and 1 are the whole group; level ≥ d passes only the identity.
pub fn lcs_membership(g: &UnipotentMatrix, m: u32) -> bool {
    (1..m as usize).take(g.dim() - 1).all(|band| g.band_is_zero(band))
}

/// A window of group elements indexed by consecutive integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSequence {
    start: i64,
    values: Vec<UnipotentMatrix>,
}

impl GroupSequence {
    pub fn new(start: i64, values: Vec<UnipotentMatrix>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("sequence window must be nonempty".into()));
        }
        let dim = values[0].dim();
        if values.iter().any(|v| v.dim() != dim) {
            return Err(Error::Domain("sequence values must share a dimension".into()));
        }
        Ok(GroupSequence { start, values })
    }

    /// Inclusive index window `[start, end]`.
    pub fn window(&self) -> (i64, i64) {
        (self.start, self.start + self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn value(&self, j: i64) -> Option<&UnipotentMatrix> {
        usize::try_from(j - self.start).ok().and_then(|i| self.values.get(i))
    }

    pub fn values(&self) -> &[UnipotentMatrix] {
        &self.values
    }
}

/// A Hall–Petresco sequence: the generating coefficients plus the
/// cached window values.
#[derive(Clone, Debug)]
pub struct HPSequence {
    coefficients: Vec<UnipotentMatrix>,
    seq: GroupSequence,
}

impl HPSequence {
    /// `a_0, …, a_s` with `a_m ∈ G_m`.
    pub fn coefficients(&self) -> &[UnipotentMatrix] {
        &self.coefficients
    }

    pub fn step_count(&self) -> u32 {
        self.coefficients.len() as u32 - 1
    }

    pub fn sequence(&self) -> &GroupSequence {
        &self.seq
    }

    pub fn window(&self) -> (i64, i64) {
        self.seq.window()
    }

    pub fn value(&self, j: i64) -> Option<&UnipotentMatrix> {
        self.seq.value(j)
    }
}

/// Generate `g_j = a_0 · a_1^C(j,1) ⋯ a_s^C(j,s)` on the inclusive
/// window. Every `a_m` must pass `lcs_membership(a_m, m)`.
pub fn hp_generate(coeffs: &[UnipotentMatrix], window: (i64, i64)) -> Result<HPSequence> {
    if coeffs.is_empty() {
        return Err(Error::Domain("need at least the constant coefficient a_0".into()));
    }
    let dim = coeffs[0].dim();
    if coeffs.iter().any(|c| c.dim() != dim) {
        return Err(Error::Domain("coefficients must share a dimension".into()));
    }
    for (m, a) in coeffs.iter().enumerate() {
        if !lcs_membership(a, m as u32) {
            return Err(Error::InvalidCoefficient(format!(
                "a_{m} lies outside filtration level G_{m}"
            )));
        }
    }
    let (j_min, j_max) = window;
    if j_min > j_max {
        return Err(Error::Domain("window must be nonempty".into()));
    }
    let values: Vec<UnipotentMatrix> = (j_min..=j_max)
        .map(|j| {
            let mut g = coeffs[0].clone();
            for (m, a) in coeffs.iter().enumerate().skip(1) {
                g = g.mul(&a.pow(&binom_signed(j, m as u32)));
            }
            g
        })
        .collect();
    Ok(HPSequence {
        coefficients: coeffs.to_vec(),
        seq: GroupSequence {
            start: j_min,
            values,
        },
    })
}

/// Discrete derivative `(∂g)_j = g_{j+1} g_j^{−1}`; the window shrinks
/// by one at the top.
pub fn derivative(seq: &GroupSequence) -> Result<GroupSequence> {
    if seq.len() < 2 {
        return Err(Error::Domain("derivative needs a window of length ≥ 2".into()));
    }
    let values: Vec<UnipotentMatrix> = seq
        .values
        .windows(2)
        .map(|w| w[1].mul(&w[0].inverse()))
        .collect();
    Ok(GroupSequence {
        start: seq.start,
        values,
    })
}

/// Index shift `(σg)_j = g_{j+1}`: same values, window slides down.
pub fn shift(seq: &GroupSequence) -> GroupSequence {
    GroupSequence {
        start: seq.start - 1,
        values: seq.values.clone(),
    }
}

/// Iterated-derivative membership test: for every `m = 1..s+1`, all
/// values of `∂^∘m(seq)` lie in `G_m`. With `s = d−1` the top level
/// forces `∂^(s+1)` to be identically the identity, which makes the
/// test the full Hall–Petresco membership criterion for `U_d`.
pub fn leibman_check(seq: &GroupSequence, s: u32) -> Result<bool> {
    if (seq.len() as u64) < u64::from(s) + 2 {
        return Err(Error::Domain(format!(
            "window of length {} cannot support {} derivatives",
            seq.len(),
            s + 1
        )));
    }
    let mut cur = seq.clone();
    for m in 1..=s + 1 {
        cur = derivative(&cur)?;
        if !cur.values.iter().all(|g| lcs_membership(g, m)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pointwise product on the window intersection.
pub fn hp_pointwise_product(x: &HPSequence, y: &HPSequence) -> Result<GroupSequence> {
    if x.seq.dim() != y.seq.dim() {
        return Err(Error::Domain("pointwise product needs equal dimensions".into()));
    }
    let (ax, bx) = x.window();
    let (ay, by) = y.window();
    let (lo, hi) = (ax.max(ay), bx.min(by));
    if lo > hi {
        return Err(Error::Domain("windows do not overlap".into()));
    }
    let values: Vec<UnipotentMatrix> = (lo..=hi)
        .map(|j| x.value(j).unwrap().mul(y.value(j).unwrap()))
        .collect();
    Ok(GroupSequence { start: lo, values })
}

/// Pointwise inverse `j ↦ g_j^{−1}`.
pub fn pointwise_inverse(seq: &GroupSequence) -> GroupSequence {
    GroupSequence {
        start: seq.start,
        values: seq.values.iter().map(UnipotentMatrix::inverse).collect(),
    }
}

/// Reverse direction of the derivative criterion: peel coefficients
/// off a window by anti-differencing at `j = 0`:
/// `a_0 = g_0`, then `a_m` is the residual value at `j = m` after the
/// lower coefficients are removed. Needs `[0, s] ⊆ window`; fails with
/// an invalid-coefficient error if some extracted `a_m ∉ G_m`.
pub fn reconstruct_hp(seq: &GroupSequence, s: u32) -> Result<HPSequence> {
    let (lo, hi) = seq.window();
    if lo > 0 || hi < i64::from(s) {
        return Err(Error::Domain(format!(
            "reconstruction needs [0, {s}] inside the window [{lo}, {hi}]"
        )));
    }
    let mut residual: Vec<UnipotentMatrix> = seq.values.clone();
    let idx = |j: i64| (j - lo) as usize;
    let mut coeffs = vec![residual[idx(0)].clone()];
    // remove a_0 from the left
    let a0_inv = coeffs[0].inverse();
    for v in &mut residual {
        *v = a0_inv.mul(v);
    }
    for m in 1..=s {
        let a_m = residual[idx(i64::from(m))].clone();
        if !lcs_membership(&a_m, m) {
            return Err(Error::InvalidCoefficient(format!(
                "peeled a_{m} lies outside filtration level G_{m}"
            )));
        }
        for (i, v) in residual.iter_mut().enumerate() {
            let j = lo + i as i64;
            let factor = a_m.pow(&(-binom_signed(j, m)));
            *v = factor.mul(v);
        }
        coeffs.push(a_m);
    }
    hp_generate(&coeffs, seq.window())
}

/// Random element of `G_m ⊂ U_d` with band entries in `[−bound, bound]`.
pub fn random_in_level<R: Rng>(dim: usize, m: u32, bound: i64, rng: &mut R) -> Result<UnipotentMatrix> {
    let mut g = UnipotentMatrix::identity(dim)?;
    for band in (m.max(1) as usize)..dim {
        for i in 0..dim - band {
            let v = rng.gen_range(-bound..=bound);
            g.entries[i * dim + (i + band)] = BigInt::from(v);
        }
    }
    Ok(g)
}

/// Random Hall–Petresco sequence in `U_d` with `s = d−1` steps.
pub fn random_hp<R: Rng>(dim: usize, window: (i64, i64), bound: i64, rng: &mut R) -> Result<HPSequence> {
    let coeffs: Vec<UnipotentMatrix> = (0..dim as u32)
        .map(|m| random_in_level(dim, m, bound, rng))
        .collect::<Result<_>>()?;
    hp_generate(&coeffs, window)
}
