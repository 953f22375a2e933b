//! Discrete moments: coefficient-weighted power sums of a mask.
//!
//! For order `j` the positive/negative parts are
//! `(1/sqrt(d)) * sum_k k^j P_k^{+/-}` (and likewise with `Q` for a wavelet
//! branch); the total is their sum and the doubled form is the power sum of
//! the `2r x 2r` reflection blocks of the deduced one-direction refinement.

use std::collections::BTreeMap;

use crate::mask::{CoefficientMask, WaveletMask};
use crate::matrix::Matrix;
use crate::scalar::{int_pow, Scalar};

/// All four discrete moment matrices of one order.
#[derive(Clone, Debug)]
pub struct DiscreteMomentSet<T> {
    pub order: usize,
    /// `r x r` total moment (`M_j` or `N_j`).
    pub total: Matrix<T>,
    /// `r x r` positive part (`M_j^+` or `N_j^+`).
    pub positive: Matrix<T>,
    /// `r x r` negative part (`M_j^-` or `N_j^-`).
    pub negative: Matrix<T>,
    /// `2r x 2r` doubled moment (`M_j^{+-}` or `N_j^{+-}`).
    pub doubled: Matrix<T>,
}

fn power_sum<T: Scalar>(
    table: &BTreeMap<i64, Matrix<T>>,
    r: usize,
    inv_sqrt_d: T,
    j: usize,
) -> Matrix<T> {
    let mut sum = Matrix::zeros(r, r);
    for (&k, m) in table {
        sum.axpy(int_pow(k, j), m);
    }
    sum.scaled(inv_sqrt_d)
}

fn moment_set<T: Scalar>(
    positive: &BTreeMap<i64, Matrix<T>>,
    negative: &BTreeMap<i64, Matrix<T>>,
    r: usize,
    dilation: u32,
    j: usize,
) -> DiscreteMomentSet<T> {
    let inv_sqrt_d = T::one() / T::from_usize_const(dilation as usize).sqrt();
    let pos = power_sum(positive, r, inv_sqrt_d, j);
    let neg = power_sum(negative, r, inv_sqrt_d, j);
    let total = pos.add(&neg);

    // Doubled form: the literal power sum over the reflection blocks
    // [[C_k^+, C_k^-], [C_{-k}^-, C_{-k}^+]].
    let zero = Matrix::zeros(r, r);
    let mut shifts: Vec<i64> = positive
        .keys()
        .chain(negative.keys())
        .flat_map(|&k| [k, -k])
        .collect();
    shifts.sort_unstable();
    shifts.dedup();
    let mut doubled = Matrix::zeros(2 * r, 2 * r);
    for k in shifts {
        let mut block = Matrix::zeros(2 * r, 2 * r);
        block.set_block(0, 0, positive.get(&k).unwrap_or(&zero));
        block.set_block(0, r, negative.get(&k).unwrap_or(&zero));
        block.set_block(r, 0, negative.get(&-k).unwrap_or(&zero));
        block.set_block(r, r, positive.get(&-k).unwrap_or(&zero));
        doubled.axpy(int_pow(k, j), &block);
    }
    let doubled = doubled.scaled(inv_sqrt_d);

    DiscreteMomentSet {
        order: j,
        total,
        positive: pos,
        negative: neg,
        doubled,
    }
}

/// Discrete moments of order `j` for a scaling mask.
pub fn scaling_moment<T: Scalar>(mask: &CoefficientMask<T>, j: usize) -> DiscreteMomentSet<T> {
    moment_set(
        mask.positive(),
        mask.negative(),
        mask.multiplicity(),
        mask.dilation(),
        j,
    )
}

/// Discrete moments of order `j` for one wavelet branch. The dilation comes
/// from the parent scaling mask.
pub fn wavelet_moment<T: Scalar>(
    wmask: &WaveletMask<T>,
    dilation: u32,
    multiplicity: usize,
    j: usize,
) -> DiscreteMomentSet<T> {
    moment_set(wmask.positive(), wmask.negative(), multiplicity, dilation, j)
}
