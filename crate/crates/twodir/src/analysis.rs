//! Cross-validation and interpretation: method comparison, vanishing-moment
//! counting, and an independent cascade-plus-quadrature oracle.
//!
//! The oracle iterates the deduced one-direction refinement operator from a
//! box profile on a dyadic grid and integrates monomials against the
//! iterates. It shares no code path with the moment recursions, which is
//! the point: agreement between the two is evidence for both.

use crate::error::{Error, Result};
use crate::mask::{doubled_mask_at_one, CoefficientMask, MaskBundle};
use crate::matrix::{vec_axpy, vec_inf_norm, vec_sub, Matrix};
use crate::moments::doubling::moments_by_doubling;
use crate::moments::separation::moments_by_separation;
use crate::scalar::Scalar;
use crate::spectral::{unit_eigvec, DEFAULT_EIG_ONE_TOL};

/// Elementwise agreement between the two moment pipelines.
#[derive(Clone, Debug)]
pub struct ComparisonReport<T> {
    /// `j ->` largest absolute difference across the scaling moment and
    /// every wavelet moment of that order.
    pub per_order: Vec<T>,
    pub overall_max: T,
    pub tolerance: T,
    pub pass: bool,
}

/// Run both pipelines and diff them elementwise.
pub fn compare_methods<T: Scalar>(
    bundle: &MaskBundle<T>,
    max_order: usize,
    tol: T,
) -> Result<ComparisonReport<T>> {
    let doubled = moments_by_doubling(bundle, max_order)?;
    let separated = moments_by_separation(bundle, max_order)?;

    let mut per_order = vec![T::zero(); max_order + 1];
    for j in 0..=max_order {
        let mut worst = vec_inf_norm(&vec_sub(&doubled.scaling[j], &separated.scaling[j]));
        for (branch, series) in &doubled.wavelets {
            let other = &separated.wavelets[branch];
            let diff = vec_inf_norm(&vec_sub(&series[j], &other[j]));
            if diff > worst {
                worst = diff;
            }
        }
        per_order[j] = worst;
    }
    let overall_max = per_order
        .iter()
        .copied()
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    Ok(ComparisonReport {
        per_order,
        overall_max,
        tolerance: tol,
        pass: overall_max <= tol,
    })
}

/// Count of leading vanishing moments in a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VanishingCount {
    /// Largest `p` such that orders `0..p` all vanish within tolerance.
    pub count: usize,
    /// Every supplied order vanished; more orders would be needed to
    /// certify a higher count.
    pub exhausted: bool,
}

/// Count leading orders with `||n_j||_inf <= tol`.
pub fn vanishing_moments<T: Scalar>(series: &[Vec<T>], tol: T) -> VanishingCount {
    let mut count = 0;
    for v in series {
        if vec_inf_norm(v) <= tol {
            count += 1;
        } else {
            return VanishingCount {
                count,
                exhausted: false,
            };
        }
    }
    VanishingCount {
        count,
        exhausted: true,
    }
}

/// Samples of the doubled vector function on a uniform dyadic grid.
///
/// Grid points are `x_i = grid_min + i * 2^-level`; `values[i]` holds the
/// `2r` components at `x_i`. Cascade iterates are right-continuous
/// piecewise-constant functions, so `values[i]` is also the value on the
/// whole cell `[x_i, x_{i+1})`.
#[derive(Clone, Debug)]
pub struct SampledFunction<T> {
    /// Integer left endpoint of the (symmetric) grid interval.
    pub grid_min: i64,
    /// Dyadic refinement level; spacing is `2^-level`.
    pub level: u32,
    pub values: Vec<Vec<T>>,
    pub iterations: u32,
}

impl<T: Scalar> SampledFunction<T> {
    pub fn spacing(&self) -> T {
        T::from_f64_const(0.5).powi(self.level as i32)
    }

    pub fn x(&self, i: usize) -> T {
        T::from_i64(self.grid_min).expect("grid endpoint fits scalar")
            + T::from_usize_const(i) * self.spacing()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Half-width of the symmetric grid interval: the one-direction refinement
/// support of the doubled coefficient set is `[k_min, k_max] / (d - 1)`;
/// symmetrizing guarantees the grid covers both mirrored parts.
fn grid_half_width<T: Scalar>(mask: &CoefficientMask<T>) -> i64 {
    let shifts = mask.doubled_shifts();
    let lo = shifts.first().copied().unwrap_or(0);
    let hi = shifts.last().copied().unwrap_or(0);
    let d = i64::from(mask.dilation());
    let extent = lo.abs().max(hi.abs());
    // ceil(extent / (d-1)), at least 1
    ((extent + d - 2) / (d - 1)).max(1)
}

/// Iterate the deduced refinement operator `n` times from the box profile
/// and sample on the dyadic grid of the given level.
///
/// The initial profile is the zeroth doubled moment times the indicator of
/// `[0, 1)`, which has the right integral; Condition E then drives the
/// iterates toward the doubled limit function. Requires `2^level >= d^n` so
/// the grid resolves every piecewise-constant cell the iteration creates.
pub fn cascade_samples<T: Scalar>(
    mask: &CoefficientMask<T>,
    iterations: u32,
    level: u32,
) -> Result<SampledFunction<T>> {
    let d = mask.dilation();
    let r = mask.multiplicity();
    if d < 2 {
        return Err(Error::Invalid(vec![crate::mask::Violation::BadDilation {
            dilation: d,
        }]));
    }

    // resolvability: d^n cells per unit must land on the 2^-L grid
    if (f64::from(d)).powi(iterations as i32) > 2f64.powi(level as i32) {
        return Err(Error::GridTooCoarse {
            iterations,
            level,
            dilation: d,
        });
    }

    let half_width = grid_half_width(mask);
    if level > 30 {
        return Err(Error::GridTooLarge {
            level,
            points: u64::MAX,
        });
    }
    let points_per_unit = 1u64 << level;
    let num_points = 2 * (half_width as u128) * u128::from(points_per_unit) + 1;
    if num_points > 50_000_000 {
        return Err(Error::GridTooLarge {
            level,
            points: num_points.min(u128::from(u64::MAX)) as u64,
        });
    }
    let num_points = num_points as usize;

    let m0 = doubled_mask_at_one(mask);
    let start = unit_eigvec(&m0, T::from_f64_const(DEFAULT_EIG_ONE_TOL)).map_err(|_| {
        Error::ConditionENotSatisfied {
            context: "cascade initial profile",
        }
    })?;

    // box profile on [0, 1)
    let zero_vec = vec![T::zero(); 2 * r];
    let mut values = vec![zero_vec.clone(); num_points];
    for (i, v) in values.iter_mut().enumerate() {
        let offset = i as i64 - half_width * points_per_unit as i64;
        if offset >= 0 && (offset as u64) < points_per_unit {
            *v = start.clone();
        }
    }

    let sqrt_d = T::from_usize_const(d as usize).sqrt();
    let blocks: Vec<(i64, Matrix<T>)> = mask
        .doubled_shifts()
        .into_iter()
        .map(|k| (k, mask.doubled_block(k)))
        .collect();

    for _ in 0..iterations {
        let mut next = vec![zero_vec.clone(); num_points];
        for (i, out) in next.iter_mut().enumerate() {
            // x_i = -S + i h; the argument d*x_i - k lands on the same grid
            let mut acc = vec![T::zero(); 2 * r];
            let base = i64::from(d) * i as i64
                - (i64::from(d) - 1) * half_width * points_per_unit as i64;
            let mut any = false;
            for (k, block) in &blocks {
                let src = base - k * points_per_unit as i64;
                if src < 0 || src >= num_points as i64 {
                    continue;
                }
                let v = &values[src as usize];
                if v.iter().all(|&x| x == T::zero()) {
                    continue;
                }
                vec_axpy(&mut acc, T::one(), &block.mul_vec(v));
                any = true;
            }
            if any {
                *out = acc.iter().map(|&x| x * sqrt_d).collect();
            }
        }
        values = next;
    }

    Ok(SampledFunction {
        grid_min: -half_width,
        level,
        values,
        iterations,
    })
}

/// Midpoint-rule approximation of the order-`j` moment of a sampled
/// function: sum over cells of `value * midpoint^j * spacing`.
pub fn quadrature_moment<T: Scalar>(f: &SampledFunction<T>, j: usize) -> Vec<T> {
    let components = f.values.first().map_or(0, Vec::len);
    let mut acc = vec![T::zero(); components];
    if f.len() < 2 {
        return acc;
    }
    let h = f.spacing();
    let half = T::from_f64_const(0.5);
    for i in 0..f.len() - 1 {
        let v = &f.values[i];
        if v.iter().all(|&x| x == T::zero()) {
            continue;
        }
        let mid = f.x(i) + half * h;
        let weight = mid.powi(j as i32) * h;
        vec_axpy(&mut acc, weight, v);
    }
    // order 0 uses weight h exactly (mid^0 = 1), handled by powi(0) = 1
    acc
}
