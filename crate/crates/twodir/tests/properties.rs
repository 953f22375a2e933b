//! Property tests: spectral kernel contracts (with an independent
//! singular-value oracle), discrete-moment identities, pipeline invariants
//! on randomly constructed Condition-E masks, and format round-trips.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use proptest::prelude::*;

use twodir::analysis::vanishing_moments;
use twodir::mask::{doubled_mask_at_one, CoefficientMask, MaskBundle, WaveletMask};
use twodir::matrix::{vec_inf_norm, vec_norm2, vec_sub, Matrix};
use twodir::moments::discrete::scaling_moment;
use twodir::moments::doubling::moments_by_doubling;
use twodir::moments::separation::moments_by_separation;
use twodir::spectral::{eigenvalues, solve, unit_eigvec};
use twodir::{io, Real};

// --- independent oracle: smallest singular value via Jacobi ---------------

/// Smallest singular value of a small square real matrix via one-sided
/// Jacobi (rotations orthogonalize the columns; singular values are the
/// final column norms). Test-only oracle, independent of the library's
/// QR/LU code paths, accurate to machine precision times the norm.
fn sigma_min(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    // column-major copy
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| rows[i][j]).collect())
        .collect();
    for _sweep in 0..60 {
        let mut converged = true;
        for p in 0..n {
            for q in (p + 1)..n {
                let app: f64 = cols[p].iter().map(|v| v * v).sum();
                let aqq: f64 = cols[q].iter().map(|v| v * v).sum();
                let apq: f64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a * b).sum();
                if app * aqq == 0.0 || apq.abs() <= 1e-15 * (app * aqq).sqrt() {
                    continue;
                }
                converged = false;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let vp = cols[p][i];
                    let vq = cols[q][i];
                    cols[p][i] = c * vp - s * vq;
                    cols[q][i] = s * vp + c * vq;
                }
            }
        }
        if converged {
            break;
        }
    }
    cols.iter()
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// Smallest singular value of `A - lambda I` for complex `lambda`, via the
/// real 2n x 2n embedding of the complex matrix.
fn sigma_min_shifted(a: &Matrix<f64>, re: f64, im: f64) -> f64 {
    let n = a.rows();
    let mut rows = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let x = a[(i, j)] - if i == j { re } else { 0.0 };
            rows[i][j] = x;
            rows[n + i][n + j] = x;
        }
        // imaginary part of A - lambda I is -im on the diagonal
        rows[i][n + i] = im;
        rows[n + i][i] = -im;
    }
    sigma_min(&rows)
}

// --- random structured inputs ---------------------------------------------

/// Orthogonalize a random square matrix (Gram-Schmidt); identity fallback.
fn orthogonalize(raw: &[f64], n: usize) -> Matrix<f64> {
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| raw[i * n + j]).collect())
        .collect();
    for j in 0..n {
        for k in 0..j {
            let proj: f64 = (0..n).map(|i| cols[j][i] * cols[k][i]).sum();
            for i in 0..n {
                cols[j][i] -= proj * cols[k][i];
            }
        }
        let norm = vec_norm2(&cols[j]);
        if norm < 1e-3 {
            // degenerate draw: replace with a basis vector
            cols[j] = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            for k in 0..j {
                let proj: f64 = (0..n).map(|i| cols[j][i] * cols[k][i]).sum();
                for i in 0..n {
                    cols[j][i] -= proj * cols[k][i];
                }
            }
        }
        let norm = vec_norm2(&cols[j]);
        for i in 0..n {
            cols[j][i] /= norm;
        }
    }
    let mut q = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            q[(i, j)] = cols[j][i];
        }
    }
    q
}

/// Real matrix with a known spectrum: orthogonal similarity of a block
/// diagonal with `reals` on the diagonal and optional 2x2 rotation blocks
/// contributing conjugate pairs.
fn matrix_with_spectrum(
    reals: &[f64],
    pairs: &[(f64, f64)],
    basis_raw: &[f64],
) -> (Matrix<f64>, Vec<(f64, f64)>) {
    let n = reals.len() + 2 * pairs.len();
    let mut d = Matrix::zeros(n, n);
    let mut spectrum = Vec::new();
    for (i, &v) in reals.iter().enumerate() {
        d[(i, i)] = v;
        spectrum.push((v, 0.0));
    }
    for (b, &(re, im)) in pairs.iter().enumerate() {
        let at = reals.len() + 2 * b;
        d[(at, at)] = re;
        d[(at, at + 1)] = im;
        d[(at + 1, at)] = -im;
        d[(at + 1, at + 1)] = re;
        spectrum.push((re, im));
        spectrum.push((re, -im));
    }
    let q = orthogonalize(basis_raw, n);
    let a = q.matmul(&d).matmul(&q.transpose());
    (a, spectrum)
}

/// Multiplicity-2 mask pair engineered so that the doubled mask at 1 has
/// spectrum {1, u, a, b} and the zeroth total moment has spectrum {1, u}:
/// both Condition E checks hold by construction.
fn structured_r2_mask(
    u: f64,
    a_eig: f64,
    b_eig: f64,
    basis_raw: &[f64],
    split: &[f64],
) -> CoefficientMask<f64> {
    let q = orthogonalize(basis_raw, 2);
    let total = q
        .matmul(&Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, u]]))
        .matmul(&q.transpose());
    let diff = q
        .matmul(&Matrix::from_rows(&[vec![a_eig, 0.0], vec![0.0, b_eig]]))
        .matmul(&q.transpose());
    // positive block sum A = (total + diff)/2, negative B = (total - diff)/2
    let a = total.add(&diff).scaled(0.5);
    let b = total.sub(&diff).scaled(0.5);
    let sqrt_d = 2f64.sqrt();
    let r = Matrix::from_rows(&[vec![split[0], split[1]], vec![split[2], split[3]]]);
    let mut positive = BTreeMap::new();
    positive.insert(-1i64, a.scaled(0.5 * sqrt_d).add(&r));
    positive.insert(2i64, a.scaled(0.5 * sqrt_d).sub(&r));
    let r2 = Matrix::from_rows(&[vec![split[3], split[0]], vec![split[1], split[2]]]);
    let mut negative = BTreeMap::new();
    negative.insert(0i64, b.scaled(0.5 * sqrt_d).add(&r2));
    negative.insert(3i64, b.scaled(0.5 * sqrt_d).sub(&r2));
    CoefficientMask::new("structured", 2, 2, (-1, 3), positive, negative)
}

fn random_wavelet_r2(entries: &[f64]) -> WaveletMask<f64> {
    let m1 = Matrix::from_rows(&[vec![entries[0], entries[1]], vec![entries[2], entries[3]]]);
    let m2 = Matrix::from_rows(&[vec![entries[4], entries[5]], vec![entries[6], entries[7]]]);
    WaveletMask::new(1, (-2, 1), [(-2i64, m1)].into(), [(1i64, m2)].into())
}

// --- properties ------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every reported eigenvalue leaves `A - lambda I` numerically singular.
    #[test]
    fn eigenvalues_have_small_residual(
        reals in proptest::collection::vec(-2.0f64..2.0, 0..=4),
        pairs in proptest::collection::vec((-2.0f64..2.0, 0.1f64..2.0), 0..=2),
        raw in proptest::collection::vec(-1.0f64..1.0, 64),
    ) {
        let n = reals.len() + 2 * pairs.len();
        prop_assume!((2..=6).contains(&n));
        let (a, _) = matrix_with_spectrum(&reals, &pairs, &raw);
        let norm = a.inf_norm().max(1.0);
        for lambda in eigenvalues(&a).unwrap() {
            let s = sigma_min_shifted(&a, lambda.re, lambda.im);
            prop_assert!(
                s <= 1e-8 * norm,
                "sigma_min(A - ({} + {}i) I) = {s:.3e}, norm {norm:.3e}",
                lambda.re,
                lambda.im
            );
        }
    }

    /// Reported eigenvalues match the constructed spectrum.
    #[test]
    fn eigenvalues_match_known_spectrum(
        reals in proptest::collection::vec(-2.0f64..2.0, 1..=4),
        pairs in proptest::collection::vec((-2.0f64..2.0, 0.1f64..2.0), 0..=1),
        raw in proptest::collection::vec(-1.0f64..1.0, 36),
    ) {
        let n = reals.len() + 2 * pairs.len();
        prop_assume!((2..=6).contains(&n));
        let (a, mut want) = matrix_with_spectrum(&reals, &pairs, &raw);
        let mut got: Vec<(f64, f64)> = eigenvalues(&a).unwrap().iter().map(|l| (l.re, l.im)).collect();
        let key = |x: &(f64, f64)| (x.0, x.1);
        got.sort_by(|p, q| key(p).partial_cmp(&key(q)).unwrap());
        want.sort_by(|p, q| key(p).partial_cmp(&key(q)).unwrap());
        // tolerance scales with eigenvalue conditioning; these orthogonal
        // similarities keep it near machine precision
        for (g, w) in got.iter().zip(&want) {
            let dist = ((g.0 - w.0).powi(2) + (g.1 - w.1).powi(2)).sqrt();
            prop_assert!(dist <= 1e-7, "eigenvalue {g:?} vs {w:?}");
        }
    }

    /// Solve residual contract on diagonally dominant systems.
    #[test]
    fn solve_residual_contract(
        entries in proptest::collection::vec(-1.0f64..1.0, 36),
        b in proptest::collection::vec(-10.0f64..10.0, 6),
        n in 1usize..=6,
    ) {
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                if i != j {
                    a[(i, j)] = entries[i * 6 + j];
                    row_sum += a[(i, j)].abs();
                }
            }
            a[(i, i)] = row_sum + 1.0 + entries[i * 6 + i].abs();
        }
        let b = &b[..n];
        let x = solve(&a, b).unwrap();
        let residual = vec_norm2(&vec_sub(&a.mul_vec(&x), b));
        let bound = 1e-10 * (a.inf_norm() * vec_norm2(&x) + vec_norm2(b));
        prop_assert!(residual <= bound, "residual {residual:.3e} > bound {bound:.3e}");
    }

    /// Eigenvector contract: unit norm, positive largest-magnitude entry,
    /// small fixed-point residual.
    #[test]
    fn unit_eigvec_contract(
        rest in proptest::collection::vec(-0.9f64..0.9, 1..=5),
        raw in proptest::collection::vec(-1.0f64..1.0, 36),
    ) {
        let mut reals = vec![1.0];
        reals.extend(rest.iter().copied());
        let n = reals.len();
        prop_assume!(rest.iter().all(|v| (v - 1.0).abs() > 1e-3));
        let (a, _) = matrix_with_spectrum(&reals, &[], &raw[..n * n]);
        let v = unit_eigvec(&a, 1e-9).unwrap();
        prop_assert!((vec_norm2(&v) - 1.0).abs() < 1e-12);
        let max = v.iter().cloned().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let first_max = v.iter().find(|x| x.abs() == max).unwrap();
        prop_assert!(*first_max > 0.0, "sign convention violated: {v:?}");
        let residual = vec_norm2(&vec_sub(&a.mul_vec(&v), &v));
        prop_assert!(residual <= 1e-9);
    }

    /// total = positive + negative and the doubled block structure, for
    /// arbitrary masks (no Condition E needed).
    #[test]
    fn discrete_moment_identities(
        entries in proptest::collection::vec(-2.0f64..2.0, 16),
        shifts in proptest::collection::vec(-4i64..=4, 4),
        d in 2u32..=3,
        j in 0usize..=6,
    ) {
        prop_assume!(shifts.len() == 4);
        let mut positive = BTreeMap::new();
        let mut negative = BTreeMap::new();
        for (i, &k) in shifts.iter().enumerate() {
            let m = Matrix::from_rows(&[
                vec![entries[4 * i], entries[4 * i + 1]],
                vec![entries[4 * i + 2], entries[4 * i + 3]],
            ]);
            if i % 2 == 0 {
                positive.insert(k, m);
            } else {
                negative.insert(k, m);
            }
        }
        let mask = CoefficientMask::new("prop", d, 2, (-4, 4), positive, negative);
        let set = scaling_moment(&mask, j);
        // total = positive + negative
        let sum = set.positive.add(&set.negative);
        for i in 0..2 {
            for c in 0..2 {
                prop_assert!((set.total[(i, c)] - sum[(i, c)]).abs() <= 1e-14 * set.total.max_abs().max(1.0));
            }
        }
        // doubled = [[pos, neg], [(-1)^j neg, (-1)^j pos]]
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let tol = 1e-14 * set.doubled.max_abs().max(1.0);
        for i in 0..2 {
            for c in 0..2 {
                prop_assert!((set.doubled[(i, c)] - set.positive[(i, c)]).abs() <= tol);
                prop_assert!((set.doubled[(i, 2 + c)] - set.negative[(i, c)]).abs() <= tol);
                prop_assert!((set.doubled[(2 + i, c)] - sign * set.negative[(i, c)]).abs() <= tol);
                prop_assert!((set.doubled[(2 + i, 2 + c)] - sign * set.positive[(i, c)]).abs() <= tol);
            }
        }
    }

    /// On structured multiplicity-2 Condition-E masks: normalizations,
    /// mirroring, scalar-free method equivalence, and wavelet agreement.
    #[test]
    fn pipelines_agree_on_structured_masks(
        u in -0.8f64..0.8,
        a_eig in -0.8f64..0.8,
        b_eig in -0.8f64..0.8,
        raw in proptest::collection::vec(-1.0f64..1.0, 4),
        split in proptest::collection::vec(-0.5f64..0.5, 4),
        wavelet_entries in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        prop_assume!((u - 1.0).abs() > 0.05 && (a_eig - 1.0).abs() > 0.05 && (b_eig - 1.0).abs() > 0.05);
        let mask = structured_r2_mask(u, a_eig, b_eig, &raw, &split);
        let bundle = MaskBundle::new(mask, vec![random_wavelet_r2(&wavelet_entries)]);

        let dbl = moments_by_doubling(&bundle, 5).unwrap();
        let sep = moments_by_separation(&bundle, 5).unwrap();

        // normalizations
        let norm2: f64 = dbl.doubled_scaling[0].iter().map(|v| v * v).sum();
        prop_assert!((norm2 - 1.0).abs() <= 1e-12);
        let dot: f64 = sep.scaling[0].iter().map(|v| v * v).sum();
        prop_assert!((dot - 0.5).abs() <= 1e-12);

        // mirroring of the doubled moments
        for (j, v) in dbl.doubled_scaling.iter().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..2 {
                prop_assert!((v[2 + i] - sign * v[i]).abs() <= 1e-10);
            }
        }

        // the two methods agree elementwise
        for j in 0..=5usize {
            let diff = vec_inf_norm(&vec_sub(&dbl.scaling[j], &sep.scaling[j]));
            prop_assert!(diff <= 1e-9, "scaling order {j}: {diff:.3e}");
            let diff = vec_inf_norm(&vec_sub(&dbl.wavelets[&1][j], &sep.wavelets[&1][j]));
            prop_assert!(diff <= 1e-9, "wavelet order {j}: {diff:.3e}");
        }
    }

    /// Larger tolerance never yields a smaller vanishing count.
    #[test]
    fn vanishing_count_monotone(
        series in proptest::collection::vec(
            proptest::collection::vec(-1.0f64..1.0, 2),
            1..6
        ),
        t1 in 1e-12f64..1.0,
        t2 in 1e-12f64..1.0,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let a = vanishing_moments(&series, lo).count;
        let b = vanishing_moments(&series, hi).count;
        prop_assert!(a <= b);
    }

    /// Mask serialization round-trips bit-exactly.
    #[test]
    fn mask_save_load_round_trip(
        entries in proptest::collection::vec(-5.0f64..5.0, 8),
        shifts in proptest::collection::vec(-6i64..=6, 2),
    ) {
        let mut positive = BTreeMap::new();
        let mut negative = BTreeMap::new();
        positive.insert(shifts[0], Matrix::from_rows(&[
            vec![entries[0], entries[1]],
            vec![entries[2], entries[3]],
        ]));
        negative.insert(shifts[1], Matrix::from_rows(&[
            vec![entries[4], entries[5]],
            vec![entries[6], entries[7]],
        ]));
        let mask = CoefficientMask::new("roundtrip", 2, 2, (-6, 6), positive, negative);
        let bundle = MaskBundle::new(mask, vec![]);
        let text = io::save_mask(&bundle);
        let reloaded = io::load_mask_str(&text).unwrap();
        for (k, m) in bundle.scaling.positive() {
            let rm = &reloaded.scaling.positive()[k];
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert_eq!(m[(i, j)].to_bits(), rm[(i, j)].to_bits());
                }
            }
        }
        for (k, m) in bundle.scaling.negative() {
            let rm = &reloaded.scaling.negative()[k];
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert_eq!(m[(i, j)].to_bits(), rm[(i, j)].to_bits());
                }
            }
        }
    }
}

/// The whole pipeline also runs in f32 (with correspondingly loose
/// tolerances): the core is generic over the scalar.
#[test]
fn pipelines_run_in_f32() {
    use twodir::moments::doubling::moments_by_doubling_with_tol;
    use twodir::moments::separation::moments_by_separation_with_tol;

    let f64_bundle = io::load_bundled("example_5_1").unwrap();
    let convert = |table: &BTreeMap<i64, Matrix<f64>>| -> BTreeMap<i64, Matrix<f32>> {
        table
            .iter()
            .map(|(&k, m)| {
                let rows: Vec<Vec<f32>> = (0..m.rows())
                    .map(|i| m.row(i).iter().map(|&v| v as f32).collect())
                    .collect();
                (k, Matrix::from_rows(&rows))
            })
            .collect()
    };
    let scaling = CoefficientMask::<f32>::new(
        "example_5_1_f32",
        2,
        1,
        (1, 3),
        convert(f64_bundle.scaling.positive()),
        convert(f64_bundle.scaling.negative()),
    );
    let w = &f64_bundle.wavelets[0];
    let wavelet = WaveletMask::<f32>::new(1, w.support(), convert(w.positive()), convert(w.negative()));
    let bundle = MaskBundle::new(scaling, vec![wavelet]);

    let tol = 1e-4f32;
    let dbl = moments_by_doubling_with_tol(&bundle, 2, tol).unwrap();
    let sep = moments_by_separation_with_tol(&bundle, 2, tol).unwrap();
    let expect = [0.70710677f32, 0.5131531, 0.3723994];
    for j in 0..=2usize {
        assert!((dbl.scaling[j][0] - expect[j]).abs() < 1e-5);
        assert!((sep.scaling[j][0] - expect[j]).abs() < 1e-5);
    }
    assert!(sep.wavelets[&1][2][0] - 0.0398999 < 1e-5);
}

/// The doubled mask at 1 equals [[A, B], [B, A]] built from the plain
/// coefficient sums (the index reflection cannot change a full sum).
#[test]
fn doubled_mask_block_symmetry_on_examples() {
    for name in ["example_5_1", "example_5_2"] {
        let bundle = io::load_bundled(name).unwrap();
        let r = bundle.scaling.multiplicity();
        let doubled = doubled_mask_at_one(&bundle.scaling);
        let inv_sqrt_d = 1.0 / f64::from(bundle.scaling.dilation()).sqrt();
        let mut a = Matrix::<Real>::zeros(r, r);
        for m in bundle.scaling.positive().values() {
            a.axpy(1.0, m);
        }
        let mut b = Matrix::<Real>::zeros(r, r);
        for m in bundle.scaling.negative().values() {
            b.axpy(1.0, m);
        }
        let a = a.scaled(inv_sqrt_d);
        let b = b.scaled(inv_sqrt_d);
        for i in 0..r {
            for j in 0..r {
                assert!((doubled[(i, j)] - a[(i, j)]).abs() < 1e-15);
                assert!((doubled[(i, r + j)] - b[(i, j)]).abs() < 1e-15);
                assert!((doubled[(r + i, j)] - b[(i, j)]).abs() < 1e-15);
                assert!((doubled[(r + i, r + j)] - a[(i, j)]).abs() < 1e-15);
            }
        }
    }
}
