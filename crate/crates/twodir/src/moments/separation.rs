//! Continuous moments by separation.
//!
//! Instead of doubling, the moment sums are split into their positive- and
//! negative-direction parts, which folds the reflection into `(-1)^l` signs
//! and keeps every solve at size `r`. The zeroth moment is the eigenvector
//! of the total zeroth discrete moment for eigenvalue 1, scaled so its
//! squared norm is 1/2; order `j` solves against
//! `d^j I - (M_0^+ + (-1)^j M_0^-)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mask::{validate, MaskBundle};
use crate::matrix::{vec_axpy, vec_inf_norm, vec_norm2, vec_scale, vec_sub, Matrix};
use crate::moments::discrete::{scaling_moment, wavelet_moment, DiscreteMomentSet};
use crate::moments::{binomial, check_order, dilation_pow};
use crate::scalar::Scalar;
use crate::spectral::{condition_e, solve, unit_eigvec};

/// Continuous moments of the scaling function and wavelets up to `order_max`.
#[derive(Clone, Debug)]
pub struct SeparatedMoments<T> {
    pub order_max: usize,
    /// `j -> m_j` (length `r`).
    pub scaling: Vec<Vec<T>>,
    /// `branch -> j -> n_j` (length `r`).
    pub wavelets: BTreeMap<u32, Vec<Vec<T>>>,
}

/// `M^+ + (-1)^parity M^-` — the sign-folded bracket of the separated
/// recursion.
fn folded<T: Scalar>(set: &DiscreteMomentSet<T>, parity: usize) -> Matrix<T> {
    if parity.is_multiple_of(2) {
        set.positive.add(&set.negative)
    } else {
        set.positive.sub(&set.negative)
    }
}

/// Run the separated recursion for all orders `0..=max_order`.
///
/// Requires Condition E for the total zeroth discrete moment (an `r x r`
/// check, distinct from the doubled `2r x 2r` check used by doubling).
pub fn moments_by_separation_with_tol<T: Scalar>(
    bundle: &MaskBundle<T>,
    max_order: usize,
    eig_tol: T,
) -> Result<SeparatedMoments<T>> {
    check_order(max_order)?;
    let report = validate(bundle);
    if !report.ok() {
        return Err(Error::Invalid(report.violations));
    }

    let mask = &bundle.scaling;
    let d = mask.dilation();
    let r = mask.multiplicity();

    let discrete: Vec<DiscreteMomentSet<T>> =
        (0..=max_order).map(|j| scaling_moment(mask, j)).collect();

    let m0_total = &discrete[0].total;
    let cond = condition_e(m0_total, eig_tol)?;
    if !cond.satisfied {
        return Err(Error::ConditionENotSatisfied {
            context: "zeroth discrete moment",
        });
    }

    // zeroth moment: eigenvector direction, scaled so m0^T m0 = 1/2
    let direction = unit_eigvec(m0_total, eig_tol)?;
    let target = T::from_f64_const(0.5).sqrt();
    let mut scaling: Vec<Vec<T>> = vec![vec_scale(&direction, target / vec_norm2(&direction))];

    for j in 1..=max_order {
        let mut rhs = vec![T::zero(); r];
        for l in 0..j {
            let c: T = binomial(j, l);
            let contrib = folded(&discrete[j - l], l).mul_vec(&scaling[l]);
            vec_axpy(&mut rhs, c, &contrib);
        }
        let lhs = Matrix::identity(r)
            .scaled(dilation_pow(d, j))
            .sub(&folded(&discrete[0], j));
        let m_j = solve(&lhs, &rhs).map_err(|e| Error::SingularAtOrder {
            order: j,
            source: Box::new(e),
        })?;
        scaling.push(m_j);
    }

    let mut wavelets = BTreeMap::new();
    for w in &bundle.wavelets {
        let n_discrete: Vec<DiscreteMomentSet<T>> = (0..=max_order)
            .map(|j| wavelet_moment(w, d, r, j))
            .collect();
        let mut series: Vec<Vec<T>> = Vec::with_capacity(max_order + 1);
        for j in 0..=max_order {
            let mut acc = vec![T::zero(); r];
            for l in 0..=j {
                let c: T = binomial(j, l);
                let contrib = folded(&n_discrete[j - l], l).mul_vec(&scaling[l]);
                vec_axpy(&mut acc, c, &contrib);
            }
            let scale = T::one() / dilation_pow(d, j);
            series.push(acc.iter().map(|&v| v * scale).collect());
        }
        wavelets.insert(w.branch(), series);
    }

    Ok(SeparatedMoments {
        order_max: max_order,
        scaling,
        wavelets,
    })
}

/// [`moments_by_separation_with_tol`] with the default eigenvalue tolerance.
pub fn moments_by_separation<T: Scalar>(
    bundle: &MaskBundle<T>,
    max_order: usize,
) -> Result<SeparatedMoments<T>> {
    moments_by_separation_with_tol(
        bundle,
        max_order,
        T::from_f64_const(crate::spectral::DEFAULT_EIG_ONE_TOL),
    )
}

/// Deviation between the general recursion and the explicit low-order
/// formulas, evaluated independently for orders up to 3.
#[derive(Clone, Debug)]
pub struct ClosedFormReport<T> {
    /// `(label, absolute deviation)` per checked moment.
    pub deviations: Vec<(String, T)>,
    pub max_deviation: T,
}

/// Evaluate the explicit closed forms for orders 0..=3 (scaling and every
/// wavelet branch) and report the largest absolute deviation from the
/// general recursion.
pub fn closed_form_check<T: Scalar>(bundle: &MaskBundle<T>) -> Result<ClosedFormReport<T>> {
    let general = moments_by_separation(bundle, 3)?;
    let mask = &bundle.scaling;
    let d = mask.dilation();
    let r = mask.multiplicity();
    let dt = |j: usize| dilation_pow::<T>(d, j);

    let md: Vec<DiscreteMomentSet<T>> = (0..=3).map(|j| scaling_moment(mask, j)).collect();
    let total = |j: usize| md[j].total.clone();
    let diff = |j: usize| md[j].positive.sub(&md[j].negative);

    // m0 from the general run (same eigenvector either way), then the
    // explicit chains:
    //   m1 = (d I - M0^+ + M0^-)^-1 M1 m0
    //   m2 = (d^2 I - M0)^-1 [M2 m0 + 2 (M1^+ - M1^-) m1]
    //   m3 = (d^3 I - M0^+ + M0^-)^-1 [M3 m0 + 3 (M2^+ - M2^-) m1 + 3 M1 m2]
    let m0 = general.scaling[0].clone();
    let odd_lhs = |j: usize| Matrix::identity(r).scaled(dt(j)).sub(&diff(0));
    let m1 = solve(&odd_lhs(1), &total(1).mul_vec(&m0))?;

    let mut rhs2 = total(2).mul_vec(&m0);
    vec_axpy(&mut rhs2, T::from_f64_const(2.0), &diff(1).mul_vec(&m1));
    let even_lhs2 = Matrix::identity(r).scaled(dt(2)).sub(&total(0));
    let m2 = solve(&even_lhs2, &rhs2)?;

    let mut rhs3 = total(3).mul_vec(&m0);
    vec_axpy(&mut rhs3, T::from_f64_const(3.0), &diff(2).mul_vec(&m1));
    vec_axpy(&mut rhs3, T::from_f64_const(3.0), &total(1).mul_vec(&m2));
    let m3 = solve(&odd_lhs(3), &rhs3)?;

    let mut deviations = Vec::new();
    let explicit_m = [m0.clone(), m1.clone(), m2.clone(), m3.clone()];
    for (j, v) in explicit_m.iter().enumerate() {
        deviations.push((
            format!("scaling order {j}"),
            vec_inf_norm(&vec_sub(v, &general.scaling[j])),
        ));
    }

    // wavelet closed forms:
    //   n0 = N0 m0
    //   n1 = d^-1 [N1 m0 + (N0^+ - N0^-) m1]
    //   n2 = d^-2 [N2 m0 + 2 (N1^+ - N1^-) m1 + N0 m2]
    //   n3 = d^-3 [N3 m0 + 3 (N2^+ - N2^-) m1 + 3 N1 m2 + (N0^+ - N0^-) m3]
    for w in &bundle.wavelets {
        let nd: Vec<DiscreteMomentSet<T>> =
            (0..=3).map(|j| wavelet_moment(w, d, r, j)).collect();
        let ntotal = |j: usize| nd[j].total.clone();
        let ndiff = |j: usize| nd[j].positive.sub(&nd[j].negative);

        let n0 = ntotal(0).mul_vec(&m0);

        let mut n1 = ntotal(1).mul_vec(&m0);
        vec_axpy(&mut n1, T::one(), &ndiff(0).mul_vec(&m1));
        let n1 = vec_scale(&n1, T::one() / dt(1));

        let mut n2 = ntotal(2).mul_vec(&m0);
        vec_axpy(&mut n2, T::from_f64_const(2.0), &ndiff(1).mul_vec(&m1));
        vec_axpy(&mut n2, T::one(), &ntotal(0).mul_vec(&m2));
        let n2 = vec_scale(&n2, T::one() / dt(2));

        let mut n3 = ntotal(3).mul_vec(&m0);
        vec_axpy(&mut n3, T::from_f64_const(3.0), &ndiff(2).mul_vec(&m1));
        vec_axpy(&mut n3, T::from_f64_const(3.0), &ntotal(1).mul_vec(&m2));
        vec_axpy(&mut n3, T::one(), &ndiff(0).mul_vec(&m3));
        let n3 = vec_scale(&n3, T::one() / dt(3));

        let series = &general.wavelets[&w.branch()];
        for (j, v) in [n0, n1, n2, n3].iter().enumerate() {
            deviations.push((
                format!("wavelet branch {} order {j}", w.branch()),
                vec_inf_norm(&vec_sub(v, &series[j])),
            ));
        }
    }

    let max_deviation = deviations
        .iter()
        .map(|(_, v)| *v)
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    Ok(ClosedFormReport {
        deviations,
        max_deviation,
    })
}
