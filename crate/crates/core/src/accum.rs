//! Compensated accumulation over index ranges.
//!
//! Every long sum in the crate goes through [`sum_range`] (or its
//! stateful cousin): the range `[lo, hi]` is split at fixed absolute
//! chunk boundaries, each chunk is reduced with Neumaier-compensated
//! summation, and the per-chunk partials are merged in chunk order.
//! Because the split does not depend on the thread count, results are
//! bit-identical for any number of workers.

use num_complex::Complex64;
use rayon::prelude::*;

/// Fixed chunk width; must not change between runs that are expected
/// to be bit-comparable.
pub const CHUNK: u64 = 1 << 16;

/// Neumaier variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn merge(&mut self, other: Kahan) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Complex accumulator built from two real compensated sums.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanComplex {
    re: Kahan,
    im: Kahan,
}

impl KahanComplex {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn merge(&mut self, other: KahanComplex) {
        self.re.merge(other.re);
        self.im.merge(other.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// A term type that knows how to accumulate itself compensatedly.
pub trait Accumulable: Copy + Send + Sync {
    type Acc: Default + Send;
    fn accumulate(acc: &mut Self::Acc, x: Self);
    fn merge(acc: &mut Self::Acc, other: Self::Acc);
    fn finish(acc: Self::Acc) -> Self;
}

impl Accumulable for f64 {
    type Acc = Kahan;
    #[inline]
    fn accumulate(acc: &mut Kahan, x: f64) {
        acc.add(x);
    }
    fn merge(acc: &mut Kahan, other: Kahan) {
        acc.merge(other);
    }
    fn finish(acc: Kahan) -> f64 {
        acc.value()
    }
}

impl Accumulable for Complex64 {
    type Acc = KahanComplex;
    #[inline]
    fn accumulate(acc: &mut KahanComplex, x: Complex64) {
        acc.add(x);
    }
    fn merge(acc: &mut KahanComplex, other: KahanComplex) {
        acc.merge(other);
    }
    fn finish(acc: KahanComplex) -> Complex64 {
        acc.value()
    }
}

impl Accumulable for (f64, f64) {
    type Acc = (Kahan, Kahan);
    #[inline]
    fn accumulate(acc: &mut (Kahan, Kahan), x: (f64, f64)) {
        acc.0.add(x.0);
        acc.1.add(x.1);
    }
    fn merge(acc: &mut (Kahan, Kahan), other: (Kahan, Kahan)) {
        acc.0.merge(other.0);
        acc.1.merge(other.1);
    }
    fn finish(acc: (Kahan, Kahan)) -> (f64, f64) {
        (acc.0.value(), acc.1.value())
    }
}

impl Accumulable for (Complex64, f64) {
    type Acc = (KahanComplex, Kahan);
    #[inline]
    fn accumulate(acc: &mut (KahanComplex, Kahan), x: (Complex64, f64)) {
        acc.0.add(x.0);
        acc.1.add(x.1);
    }
    fn merge(acc: &mut (KahanComplex, Kahan), other: (KahanComplex, Kahan)) {
        acc.0.merge(other.0);
        acc.1.merge(other.1);
    }
    fn finish(acc: (KahanComplex, Kahan)) -> (Complex64, f64) {
        (acc.0.value(), acc.1.value())
    }
}

fn chunk_bounds(lo: u64, hi: u64) -> impl Iterator<Item = (u64, u64)> {
    let first = lo / CHUNK;
    let last = hi / CHUNK;
    (first..=last).map(move |ci| {
        let a = (ci * CHUNK).max(lo);
        let b = (ci * CHUNK + (CHUNK - 1)).min(hi);
        (a, b)
    })
}

/// Compensated sum of `term(n)` over the inclusive range `[lo, hi]`.
pub fn sum_range<T, F>(lo: u64, hi: u64, term: F) -> T
where
    T: Accumulable,
    F: Fn(u64) -> T + Sync,
{
    sum_range_stateful(lo, hi, |_| (), |_, n| term(n))
}

/// Like [`sum_range`], with per-chunk scan state. `init` is called with
/// the first index of each chunk; `term` may advance the state. Used by
/// rolling-window and forward-difference scans that are sequential
/// within a chunk but independent across chunks.
pub fn sum_range_stateful<T, S, I, F>(lo: u64, hi: u64, init: I, term: F) -> T
where
    T: Accumulable,
    S: Send,
    I: Fn(u64) -> S + Sync,
    F: Fn(&mut S, u64) -> T + Sync,
{
    if lo > hi {
        return T::finish(T::Acc::default());
    }
    let bounds: Vec<(u64, u64)> = chunk_bounds(lo, hi).collect();
    let partials: Vec<T::Acc> = bounds
        .into_par_iter()
        .map(|(a, b)| {
            let mut state = init(a);
            let mut acc = T::Acc::default();
            for n in a..=b {
                T::accumulate(&mut acc, term(&mut state, n));
            }
            acc
        })
        .collect();
    let mut total = T::Acc::default();
    for p in partials {
        T::merge(&mut total, p);
    }
    T::finish(total)
}
