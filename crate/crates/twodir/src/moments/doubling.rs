//! Continuous moments by doubling.
//!
//! The two-direction scaling function and its reflection are stacked into a
//! `2r`-vector satisfying an ordinary one-direction refinement, so the
//! classical moment recursion applies at size `2r`: the zeroth moment is the
//! unit eigenvector of the doubled mask at 1, higher orders come from linear
//! solves against `d^j I - M_0`, and wavelet moments follow by direct
//! summation. The moments of the original functions are the upper halves.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mask::{doubled_mask_at_one, validate, MaskBundle};
use crate::matrix::{vec_axpy, Matrix};
use crate::moments::discrete::{scaling_moment, wavelet_moment};
use crate::moments::{binomial, check_order, dilation_pow};
use crate::scalar::Scalar;
use crate::spectral::{condition_e, solve, unit_eigvec};

/// Continuous moments of the doubled system up to `order_max`, plus the
/// extracted moments of the underlying functions.
#[derive(Clone, Debug)]
pub struct DoubledMoments<T> {
    pub order_max: usize,
    /// `j -> m_j` of the doubled scaling vector (length `2r`).
    pub doubled_scaling: Vec<Vec<T>>,
    /// `branch -> j -> n_j` of the doubled wavelet vector (length `2r`).
    pub doubled_wavelets: BTreeMap<u32, Vec<Vec<T>>>,
    /// `j -> m_j` of the scaling function (upper halves, length `r`).
    pub scaling: Vec<Vec<T>>,
    /// `branch -> j -> n_j` of each wavelet (upper halves, length `r`).
    pub wavelets: BTreeMap<u32, Vec<Vec<T>>>,
}

/// First half of an even-length vector.
pub fn extract_upper<T: Scalar>(v: &[T]) -> Result<Vec<T>> {
    if !v.len().is_multiple_of(2) {
        return Err(Error::OddLength { len: v.len() });
    }
    Ok(v[..v.len() / 2].to_vec())
}

/// Run the doubling recursion for all orders `0..=max_order`.
///
/// Requires Condition E for the doubled mask at 1 (checked with `eig_tol`);
/// fails before any recursion otherwise.
pub fn moments_by_doubling_with_tol<T: Scalar>(
    bundle: &MaskBundle<T>,
    max_order: usize,
    eig_tol: T,
) -> Result<DoubledMoments<T>> {
    check_order(max_order)?;
    let report = validate(bundle);
    if !report.ok() {
        return Err(Error::Invalid(report.violations));
    }

    let mask = &bundle.scaling;
    let d = mask.dilation();
    let r = mask.multiplicity();
    let size = 2 * r;

    let m0_doubled = doubled_mask_at_one(mask);
    let cond = condition_e(&m0_doubled, eig_tol)?;
    if !cond.satisfied {
        return Err(Error::ConditionENotSatisfied {
            context: "doubled mask at 1",
        });
    }

    // discrete moments of every order we will touch
    let discrete: Vec<Matrix<T>> = (0..=max_order)
        .map(|j| scaling_moment(mask, j).doubled)
        .collect();

    // zeroth moment: unit eigenvector (Euclidean norm 1 is the doubled
    // normalization), sign fixed by the largest-magnitude-positive rule
    let mut doubled_scaling: Vec<Vec<T>> = Vec::with_capacity(max_order + 1);
    doubled_scaling.push(unit_eigvec(&m0_doubled, eig_tol)?);

    for j in 1..=max_order {
        let mut rhs = vec![T::zero(); size];
        for l in 0..j {
            let c: T = binomial(j, l);
            let contrib = discrete[j - l].mul_vec(&doubled_scaling[l]);
            vec_axpy(&mut rhs, c, &contrib);
        }
        let mut lhs = Matrix::identity(size).scaled(dilation_pow(d, j));
        lhs = lhs.sub(&discrete[0]);
        let m_j = solve(&lhs, &rhs).map_err(|e| Error::SingularAtOrder {
            order: j,
            source: Box::new(e),
        })?;
        doubled_scaling.push(m_j);
    }

    let mut doubled_wavelets = BTreeMap::new();
    for w in &bundle.wavelets {
        let n_discrete: Vec<Matrix<T>> = (0..=max_order)
            .map(|j| wavelet_moment(w, d, r, j).doubled)
            .collect();
        let mut series: Vec<Vec<T>> = Vec::with_capacity(max_order + 1);
        for j in 0..=max_order {
            let mut acc = vec![T::zero(); size];
            for l in 0..=j {
                let c: T = binomial(j, l);
                let contrib = n_discrete[j - l].mul_vec(&doubled_scaling[l]);
                vec_axpy(&mut acc, c, &contrib);
            }
            let scale = T::one() / dilation_pow(d, j);
            series.push(acc.iter().map(|&v| v * scale).collect());
        }
        doubled_wavelets.insert(w.branch(), series);
    }

    let scaling: Vec<Vec<T>> = doubled_scaling
        .iter()
        .map(|v| extract_upper(v))
        .collect::<Result<_>>()?;
    let wavelets: BTreeMap<u32, Vec<Vec<T>>> = doubled_wavelets
        .iter()
        .map(|(&s, series)| {
            let upper: Result<Vec<Vec<T>>> = series.iter().map(|v| extract_upper(v)).collect();
            upper.map(|u| (s, u))
        })
        .collect::<Result<_>>()?;

    Ok(DoubledMoments {
        order_max: max_order,
        doubled_scaling,
        doubled_wavelets,
        scaling,
        wavelets,
    })
}

/// [`moments_by_doubling_with_tol`] with the default eigenvalue tolerance.
pub fn moments_by_doubling<T: Scalar>(
    bundle: &MaskBundle<T>,
    max_order: usize,
) -> Result<DoubledMoments<T>> {
    moments_by_doubling_with_tol(
        bundle,
        max_order,
        T::from_f64_const(crate::spectral::DEFAULT_EIG_ONE_TOL),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io;
    use crate::matrix::{vec_inf_norm, vec_norm2, vec_sub};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && vec_inf_norm(&vec_sub(a, b)) <= tol
    }

    #[test]
    fn example_5_1_first_moments() {
        let bundle = io::load_bundled("example_5_1").unwrap();
        let m = moments_by_doubling(&bundle, 2).unwrap();
        let s = 0.5f64.sqrt();
        let c1 = (7.0 * 2f64.sqrt() - 14f64.sqrt()) / 12.0;
        let c2 = (28.0 * 2f64.sqrt() - 7.0 * 14f64.sqrt()) / 36.0;
        assert!(close(&m.doubled_scaling[0], &[s, s], 1e-13));
        assert!(close(&m.doubled_scaling[1], &[c1, -c1], 1e-13));
        assert!(close(&m.doubled_scaling[2], &[c2, c2], 1e-13));
        // extracted scalar moments
        assert!(close(&m.scaling[0], &[s], 1e-13));
        assert!(close(&m.scaling[1], &[c1], 1e-13));
        assert!(close(&m.scaling[2], &[c2], 1e-13));
        // spot-check against 7-digit approximations
        assert!((m.scaling[1][0] - 0.5131531).abs() < 5e-8);
        assert!((m.scaling[2][0] - 0.3723994).abs() < 5e-8);
    }

    #[test]
    fn example_5_1_wavelet_moments() {
        let bundle = io::load_bundled("example_5_1").unwrap();
        let m = moments_by_doubling(&bundle, 2).unwrap();
        let n = &m.doubled_wavelets[&1];
        let c = (4.0 * 2f64.sqrt() - 14f64.sqrt()) / 48.0;
        assert!(close(&n[0], &[0.0, 0.0], 1e-13));
        assert!(close(&n[1], &[0.0, 0.0], 1e-13));
        assert!(close(&n[2], &[c, c], 1e-13));
        assert!((m.wavelets[&1][2][0] - 0.0398999).abs() < 5e-8);
    }

    #[test]
    fn zero_wavelet_branch_gives_zero_moments() {
        let mut bundle = io::load_bundled("example_5_1").unwrap();
        let zero = Matrix::<f64>::zeros(1, 1);
        bundle.wavelets = vec![crate::mask::WaveletMask::new(
            1,
            (0, 0),
            [(0i64, zero.clone())].into(),
            [(0i64, zero)].into(),
        )];
        let m = moments_by_doubling(&bundle, 4).unwrap();
        for series in m.doubled_wavelets.values() {
            for v in series {
                assert!(vec_inf_norm(v) == 0.0);
            }
        }
    }

    #[test]
    fn zeroth_moment_is_unit_and_fixed_point() {
        for name in ["example_5_1", "example_5_2"] {
            let bundle = io::load_bundled(name).unwrap();
            let m = moments_by_doubling(&bundle, 0).unwrap();
            let m0 = &m.doubled_scaling[0];
            assert!((vec_norm2(m0) - 1.0).abs() < 1e-12);
            let a = doubled_mask_at_one(&bundle.scaling);
            let residual = vec_norm2(&vec_sub(&a.mul_vec(m0), m0));
            assert!(residual <= 1e-9, "fixed-point residual {residual}");
        }
    }

    /// Lower halves mirror the upper halves with sign `(-1)^j`.
    #[test]
    fn mirror_identity() {
        for name in ["example_5_1", "example_5_2"] {
            let bundle = io::load_bundled(name).unwrap();
            let r = bundle.scaling.multiplicity();
            let m = moments_by_doubling(&bundle, 6).unwrap();
            let check = |series: &Vec<Vec<f64>>| {
                for (j, v) in series.iter().enumerate() {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    for i in 0..r {
                        assert!(
                            (v[r + i] - sign * v[i]).abs() <= 1e-10,
                            "{name} order {j} entry {i}"
                        );
                    }
                }
            };
            check(&m.doubled_scaling);
            for series in m.doubled_wavelets.values() {
                check(series);
            }
        }
    }

    /// Substituting the solved moments back into the unsolved recursion
    /// reproduces them.
    #[test]
    fn recursion_consistency() {
        for name in ["example_5_1", "example_5_2"] {
            let bundle = io::load_bundled(name).unwrap();
            let m = moments_by_doubling(&bundle, 6).unwrap();
            let d = bundle.scaling.dilation();
            let discrete: Vec<Matrix<f64>> = (0..=6)
                .map(|j| scaling_moment(&bundle.scaling, j).doubled)
                .collect();
            for j in 0..=6usize {
                let mut acc = vec![0.0; m.doubled_scaling[0].len()];
                for l in 0..=j {
                    let c: f64 = binomial(j, l);
                    vec_axpy(&mut acc, c, &discrete[j - l].mul_vec(&m.doubled_scaling[l]));
                }
                let scale = 1.0 / dilation_pow::<f64>(d, j);
                let predicted: Vec<f64> = acc.iter().map(|v| v * scale).collect();
                assert!(
                    close(&predicted, &m.doubled_scaling[j], 1e-10),
                    "{name} order {j}"
                );
            }
        }
    }

    #[test]
    fn condition_e_failure_rejected_before_recursion() {
        let mut bundle = io::load_bundled("example_5_1").unwrap();
        // bump one coefficient so the row sums no longer give eigenvalue 1
        let mut positive = bundle.scaling.positive().clone();
        if let Some(m) = positive.get_mut(&1) {
            *m = m.add(&Matrix::from_rows(&[vec![0.1]]));
        }
        bundle.scaling = crate::mask::CoefficientMask::new(
            "perturbed",
            2,
            1,
            bundle.scaling.support(),
            positive,
            bundle.scaling.negative().clone(),
        );
        match moments_by_doubling(&bundle, 2) {
            Err(Error::ConditionENotSatisfied { .. }) => {}
            other => panic!("expected Condition E failure, got {other:?}"),
        }
    }

    #[test]
    fn extract_upper_halves() {
        assert_eq!(extract_upper(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![1.0, 2.0]);
        let s = 0.5f64.sqrt();
        assert_eq!(extract_upper(&[s, s]).unwrap(), vec![s]);
        assert!(matches!(
            extract_upper(&[1.0, 2.0, 3.0]),
            Err(Error::OddLength { len: 3 })
        ));
    }

    #[test]
    fn order_cap_enforced() {
        let bundle = io::load_bundled("example_5_1").unwrap();
        assert!(matches!(
            moments_by_doubling(&bundle, 17),
            Err(Error::OrderTooLarge { .. })
        ));
    }
}
