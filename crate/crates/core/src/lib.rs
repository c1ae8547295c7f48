//! Numerical laboratory for multiplicative-function correlations.
//!
//! The crate is organized around six subsystems:
//!
//! * [`sieve`] — segmented, bit-packed evaluation of the Liouville and
//!   Möbius functions on `[1, N]`, with a persistent cache format.
//! * [`averages`] — streaming Cesàro and logarithmic averaging with
//!   compensated summation, phase weights, and an Abel-summation
//!   cross-check.
//! * [`correlations`] — multi-point and prime-dilated correlations,
//!   Tao-identity residuals, cylinder measures, and Gowers uniformity
//!   norms on finite cyclic groups.
//! * [`complexity`] — block complexity and special-word statistics of
//!   sign sequences.
//! * [`nilap`] — exact Hall–Petresco arithmetic-progression sequences
//!   in unipotent integer matrix groups.
//! * [`dynamics`] — torus rotations, character products, and the
//!   square-block skew sequence, for finite-scale dilation-invariance
//!   and stationarity checks.

pub mod accum;
pub mod averages;
pub mod complexity;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod nilap;
pub mod phase;
pub mod sieve;

pub use error::{Error, Result};
