//! Scalar abstraction for the numeric core.
//!
//! Everything downstream (masks, discrete moments, the recursions, the
//! eigen/solve kernel, the cascade oracle) is generic over [`Scalar`] so the
//! same code runs in `f32` or `f64`. The crate root exposes `f64` aliases,
//! which is what the file formats and the CLI use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion for diagnostics (error payloads, report printing).
    fn to_f64_lossy(self) -> f64;

    /// Shorthand for converting an `f64` constant, panicking only for
    /// non-finite inputs (which we never pass).
    fn from_f64_const(v: f64) -> Self {
        Self::from_f64(v).expect("finite constant")
    }

    fn from_usize_const(v: usize) -> Self {
        Self::from_usize(v).expect("usize fits scalar")
    }
}

impl Scalar for f32 {
    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}

impl Scalar for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

/// `k^j` with the convention `0^0 = 1`, so the zeroth moment is the plain
/// coefficient sum including `k = 0`.
pub fn int_pow<T: Scalar>(k: i64, j: usize) -> T {
    if j == 0 {
        return T::one();
    }
    T::from_i64(k).expect("index fits scalar").powi(j as i32)
}
