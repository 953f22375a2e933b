//! Discrete and continuous moment computations.

pub mod discrete;
pub mod doubling;
pub mod separation;

use crate::scalar::Scalar;

/// Hard cap on the moment order. Keeps `k^j` and the exact binomial table
/// well inside integer/double range for any plausible support width.
pub const MAX_ORDER: usize = 16;

/// Default maximum order for the pipelines and the CLI.
pub const DEFAULT_MAX_ORDER: usize = 8;

/// Exact binomial coefficient via Pascal's rule; `n <= MAX_ORDER` keeps
/// every value far below 2^53 so the conversion to the scalar is lossless.
pub(crate) fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    debug_assert!(n <= MAX_ORDER && k <= n);
    let mut row = [0u64; MAX_ORDER + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=i).rev() {
            row[j] += row[j - 1];
        }
    }
    T::from_u64(row[k]).expect("binomial fits scalar")
}

pub(crate) fn check_order(requested: usize) -> crate::error::Result<()> {
    if requested > MAX_ORDER {
        Err(crate::error::Error::OrderTooLarge {
            requested,
            max: MAX_ORDER,
        })
    } else {
        Ok(())
    }
}

/// `d^j` as a scalar, exact for every order this crate accepts.
pub(crate) fn dilation_pow<T: Scalar>(d: u32, j: usize) -> T {
    T::from_u32(d).expect("dilation fits scalar").powi(j as i32)
}
