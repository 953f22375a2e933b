//! Small dense linear-algebra kernel: eigenvalues, the eigenvector for
//! eigenvalue 1, linear solves, and the Condition E check built on them.
//!
//! Matrices here are tiny (`2r x 2r` with `r` in the low single digits), so
//! everything is direct: closed forms for `n <= 2`, Householder reduction to
//! Hessenberg form followed by Francis double-shift QR for larger `n`, and
//! partially pivoted LU for the solves. The QR sweep follows the classic
//! EISPACK `hqr` scheme.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{vec_norm2, vec_scale, Matrix};
use crate::scalar::Scalar;

/// Default tolerance for detecting the eigenvalue 1. Masks are entered
/// near-exactly through the expression grammar, so 1 is resolved far beyond
/// this in `f64`.
pub const DEFAULT_EIG_ONE_TOL: f64 = 1e-9;

/// Condition E verdict for one matrix.
#[derive(Clone, Debug)]
pub struct ConditionEReport<T> {
    pub eigenvalues: Vec<Complex<T>>,
    /// Exactly one eigenvalue within `tolerance_used` of 1.
    pub has_simple_one: bool,
    /// Every other eigenvalue strictly inside the unit disk.
    pub spectral_ok: bool,
    pub satisfied: bool,
    pub tolerance_used: T,
}

/// Eigenvalues (with multiplicity) of a small real matrix.
pub fn eigenvalues<T: Scalar>(a: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    assert!(a.is_square() && a.rows() >= 1, "square non-empty matrix");
    let n = a.rows();
    match n {
        1 => Ok(vec![Complex::new(a[(0, 0)], T::zero())]),
        2 => Ok(eig2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)])),
        _ => {
            let mut h = a.clone();
            hessenberg(&mut h);
            hqr(&mut h)
        }
    }
}

/// Closed-form eigenvalues of `[[a, b], [c, d]]`.
fn eig2<T: Scalar>(a: T, b: T, c: T, d: T) -> Vec<Complex<T>> {
    let half = T::from_f64_const(0.5);
    let mean = (a + d) * half;
    let det = a * d - b * c;
    let disc = mean * mean - det;
    if disc >= T::zero() {
        let s = disc.sqrt();
        // add the root of matching sign first to avoid cancellation
        let l1 = if mean >= T::zero() { mean + s } else { mean - s };
        let l2 = if l1 == T::zero() { mean } else { det / l1 };
        vec![Complex::new(l1, T::zero()), Complex::new(l2, T::zero())]
    } else {
        let s = (-disc).sqrt();
        vec![Complex::new(mean, s), Complex::new(mean, -s)]
    }
}

/// Householder reduction to upper Hessenberg form (in place).
fn hessenberg<T: Scalar>(h: &mut Matrix<T>) {
    let n = h.rows();
    for m in 1..n.saturating_sub(1) {
        // zero column m-1 below the subdiagonal
        let mut norm2 = T::zero();
        for i in m..n {
            norm2 = norm2 + h[(i, m - 1)] * h[(i, m - 1)];
        }
        let norm = norm2.sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if h[(m, m - 1)] >= T::zero() { -norm } else { norm };
        let mut v = vec![T::zero(); n];
        for i in m..n {
            v[i] = h[(i, m - 1)];
        }
        v[m] = v[m] - alpha;
        let vnorm = vec_norm2(&v);
        if vnorm == T::zero() {
            continue;
        }
        for x in v.iter_mut() {
            *x = *x / vnorm;
        }
        let two = T::from_f64_const(2.0);
        // H A: rows m..n
        for j in (m - 1)..n {
            let mut dot = T::zero();
            for i in m..n {
                dot = dot + v[i] * h[(i, j)];
            }
            for i in m..n {
                h[(i, j)] = h[(i, j)] - two * v[i] * dot;
            }
        }
        // (H A) H: cols m..n
        for i in 0..n {
            let mut dot = T::zero();
            for j in m..n {
                dot = dot + h[(i, j)] * v[j];
            }
            for j in m..n {
                h[(i, j)] = h[(i, j)] - two * dot * v[j];
            }
        }
    }
    // the reflections annihilate these entries exactly in exact arithmetic
    for i in 2..n {
        for j in 0..(i - 1) {
            h[(i, j)] = T::zero();
        }
    }
}

fn sign_of<T: Scalar>(magnitude: T, sign_source: T) -> T {
    if sign_source >= T::zero() {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; returns the
/// eigenvalues. Destroys `h`.
#[allow(clippy::many_single_char_names)]
fn hqr<T: Scalar>(h: &mut Matrix<T>) -> Result<Vec<Complex<T>>> {
    let n = h.rows();
    let eps = T::epsilon();
    let zero = T::zero();
    let mut eigs = vec![Complex::new(zero, zero); n];

    let mut anorm = zero;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm = anorm + h[(i, j)].abs();
        }
    }
    if anorm == zero {
        return Ok(eigs); // zero matrix
    }

    let mut nn = n as isize - 1;
    let mut t = zero;
    'deflate: while nn >= 0 {
        let mut its = 0usize;
        loop {
            // look for a single small subdiagonal element
            let mut l = nn as usize;
            while l >= 1 {
                let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
                if s == zero {
                    s = anorm;
                }
                if h[(l, l - 1)].abs() <= eps * s {
                    h[(l, l - 1)] = zero;
                    break;
                }
                l -= 1;
            }
            let nnu = nn as usize;
            let mut x = h[(nnu, nnu)];
            if l == nnu {
                // one real root found
                eigs[nnu] = Complex::new(x + t, zero);
                nn -= 1;
                continue 'deflate;
            }
            let mut y = h[(nnu - 1, nnu - 1)];
            let mut w = h[(nnu, nnu - 1)] * h[(nnu - 1, nnu)];
            if l == nnu - 1 {
                // a 2x2 block has deflated
                let p = T::from_f64_const(0.5) * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x = x + t;
                if q >= zero {
                    z = p + sign_of(z, p);
                    let l1 = x + z;
                    let l2 = if z == zero { x } else { x - w / z };
                    eigs[nnu - 1] = Complex::new(l1, zero);
                    eigs[nnu] = Complex::new(l2, zero);
                } else {
                    eigs[nnu - 1] = Complex::new(x + p, -z);
                    eigs[nnu] = Complex::new(x + p, z);
                }
                nn -= 2;
                continue 'deflate;
            }
            if its == 30 {
                return Err(Error::EigenNonConvergence { size: n });
            }
            if its == 10 || its == 20 {
                // exceptional shift to break symmetric stalls
                t = t + x;
                for i in 0..=nnu {
                    h[(i, i)] = h[(i, i)] - x;
                }
                let s = h[(nnu, nnu - 1)].abs() + h[(nnu - 1, nnu - 2)].abs();
                x = T::from_f64_const(0.75) * s;
                y = x;
                w = T::from_f64_const(-0.4375) * s * s;
            }
            its += 1;
            let m = find_two_small(h, l, nnu, x, y, w, eps);
            clear_subsub(h, m, nnu);
            let (p, q, r) = initial_column(h, m, x, y, w);
            qr_sweep(h, l, m, nnu, p, q, r);
        }
    }
    Ok(eigs)
}

/// Scan for two consecutive small subdiagonal elements; returns the row `m`
/// where the implicit double shift may start.
fn find_two_small<T: Scalar>(
    h: &Matrix<T>,
    l: usize,
    nn: usize,
    x: T,
    y: T,
    w: T,
    eps: T,
) -> usize {
    let zero = T::zero();
    let mut m = nn - 2;
    loop {
        let z = h[(m, m)];
        let r = x - z;
        let s = y - z;
        let mut p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
        let mut q = h[(m + 1, m + 1)] - z - r - s;
        let rr = h[(m + 2, m + 1)];
        let scale = p.abs() + q.abs() + rr.abs();
        if scale != zero {
            p = p / scale;
            q = q / scale;
        }
        let rr = if scale != zero { rr / scale } else { rr };
        if m == l {
            return m;
        }
        let u = h[(m, m - 1)].abs() * (q.abs() + rr.abs());
        let v = p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
        if u <= eps * v {
            return m;
        }
        m -= 1;
    }
}

fn clear_subsub<T: Scalar>(h: &mut Matrix<T>, m: usize, nn: usize) {
    let zero = T::zero();
    for i in (m + 2)..=nn {
        h[(i, i - 2)] = zero;
        if i != m + 2 {
            h[(i, i - 3)] = zero;
        }
    }
}

fn initial_column<T: Scalar>(h: &Matrix<T>, m: usize, x: T, y: T, w: T) -> (T, T, T) {
    let z = h[(m, m)];
    let r = x - z;
    let s = y - z;
    let p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
    let q = h[(m + 1, m + 1)] - z - r - s;
    let rr = h[(m + 2, m + 1)];
    let scale = p.abs() + q.abs() + rr.abs();
    if scale == T::zero() {
        (p, q, rr)
    } else {
        (p / scale, q / scale, rr / scale)
    }
}

/// One implicit double-shift QR sweep on rows/cols `l..=nn`, with the
/// bulge-chasing reflector seeded by `(p, q, r)` at row `m`.
fn qr_sweep<T: Scalar>(h: &mut Matrix<T>, l: usize, m: usize, nn: usize, p0: T, q0: T, r0: T) {
    let zero = T::zero();
    let (mut p, mut q, mut r) = (p0, q0, r0);
    for k in m..nn {
        let mut scale = T::one();
        if k != m {
            p = h[(k, k - 1)];
            q = h[(k + 1, k - 1)];
            r = if k + 1 != nn { h[(k + 2, k - 1)] } else { zero };
            scale = p.abs() + q.abs() + r.abs();
            if scale != zero {
                p = p / scale;
                q = q / scale;
                r = r / scale;
            }
        }
        let s = sign_of((p * p + q * q + r * r).sqrt(), p);
        if s == zero {
            continue;
        }
        if k == m {
            if l != m {
                h[(k, k - 1)] = -h[(k, k - 1)];
            }
        } else {
            h[(k, k - 1)] = -s * scale;
        }
        p = p + s;
        let x = p / s;
        let y = q / s;
        let z = r / s;
        q = q / p;
        r = r / p;
        // row transform
        for j in k..=nn {
            let mut pp = h[(k, j)] + q * h[(k + 1, j)];
            if k + 1 != nn {
                pp = pp + r * h[(k + 2, j)];
                h[(k + 2, j)] = h[(k + 2, j)] - pp * z;
            }
            h[(k + 1, j)] = h[(k + 1, j)] - pp * y;
            h[(k, j)] = h[(k, j)] - pp * x;
        }
        // column transform
        let mmin = nn.min(k + 3);
        for i in l..=mmin {
            let mut pp = x * h[(i, k)] + y * h[(i, k + 1)];
            if k + 1 != nn {
                pp = pp + z * h[(i, k + 2)];
                h[(i, k + 2)] = h[(i, k + 2)] - pp * r;
            }
            h[(i, k + 1)] = h[(i, k + 1)] - pp * q;
            h[(i, k)] = h[(i, k)] - pp;
        }
    }
}

/// Condition E: a simple eigenvalue 1 and everything else strictly inside
/// the unit disk. `tol` bounds the eigenvalue-1 test `|lambda - 1| <= tol`.
pub fn condition_e<T: Scalar>(a: &Matrix<T>, tol: T) -> Result<ConditionEReport<T>> {
    let eigs = eigenvalues(a)?;
    let one = Complex::new(T::one(), T::zero());
    let near_one = eigs.iter().filter(|&&l| (l - one).norm() <= tol).count();
    let has_simple_one = near_one == 1;
    let spectral_ok = eigs
        .iter()
        .filter(|&&l| (l - one).norm() > tol)
        .all(|l| l.norm() < T::one());
    Ok(ConditionEReport {
        eigenvalues: eigs,
        has_simple_one,
        spectral_ok,
        satisfied: has_simple_one && spectral_ok,
        tolerance_used: tol,
    })
}

// --- LU ---------------------------------------------------------------

struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

/// Partially pivoted LU. With `pivot_floor` set, near-zero pivots are
/// replaced by the floor instead of failing (used by inverse iteration,
/// which wants solves against nearly singular shifts).
fn lu_factor<T: Scalar>(a: &Matrix<T>, pivot_floor: Option<T>) -> Result<Lu<T>> {
    assert!(a.is_square());
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let threshold = T::epsilon() * a.max_abs() * T::from_usize_const(n.max(1));
    for col in 0..n {
        // pivot search
        let mut pivot_row = col;
        for i in (col + 1)..n {
            if lu[(i, col)].abs() > lu[(pivot_row, col)].abs() {
                pivot_row = i;
            }
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            perm.swap(col, pivot_row);
        }
        let mut pivot = lu[(col, col)];
        if pivot.abs() <= threshold {
            match pivot_floor {
                Some(floor) => {
                    pivot = sign_of(floor, pivot);
                    lu[(col, col)] = pivot;
                }
                None => {
                    return Err(Error::SingularSystem {
                        pivot: pivot.abs().to_f64_lossy(),
                    })
                }
            }
        }
        for i in (col + 1)..n {
            let factor = lu[(i, col)] / pivot;
            lu[(i, col)] = factor;
            for j in (col + 1)..n {
                lu[(i, j)] = lu[(i, j)] - factor * lu[(col, j)];
            }
        }
    }
    Ok(Lu { lu, perm })
}

fn lu_solve<T: Scalar>(f: &Lu<T>, b: &[T]) -> Vec<T> {
    let n = f.perm.len();
    let mut x: Vec<T> = f.perm.iter().map(|&p| b[p]).collect();
    for i in 1..n {
        for j in 0..i {
            x[i] = x[i] - f.lu[(i, j)] * x[j];
        }
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            x[i] = x[i] - f.lu[(i, j)] * x[j];
        }
        x[i] = x[i] / f.lu[(i, i)];
    }
    x
}

/// Solve `A x = b` with partial pivoting. Numerically singular systems fail
/// with the offending pivot magnitude.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    assert_eq!(a.rows(), b.len());
    let f = lu_factor(a, None)?;
    Ok(lu_solve(&f, b))
}

/// Eigenvector for the (checked simple) eigenvalue 1, Euclidean-normalized,
/// with the largest-magnitude entry positive (ties: lowest index wins).
///
/// Inverse iteration with a slightly offset shift; a couple of iterations
/// resolve the eigenvector to rounding level when the rest of the spectrum
/// is separated from 1, which the simplicity check guarantees here.
pub fn unit_eigvec<T: Scalar>(a: &Matrix<T>, tol: T) -> Result<Vec<T>> {
    let n = a.rows();
    let eigs = eigenvalues(a)?;
    let one = Complex::new(T::one(), T::zero());
    let near_one = eigs.iter().filter(|&&l| (l - one).norm() <= tol).count();
    if near_one != 1 {
        return Err(Error::ConditionENotSatisfied {
            context: "eigenvector extraction: eigenvalue 1 absent or not simple",
        });
    }

    let delta = T::epsilon().powf(T::from_f64_const(0.75));
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] = shifted[(i, i)] - (T::one() + delta);
    }
    let floor = T::epsilon() * a.max_abs().max(T::one());
    let f = lu_factor(&shifted, Some(floor))?;

    let mut best_residual = T::infinity();
    let mut best: Option<Vec<T>> = None;
    // start from the flat vector; fall back to basis vectors if unlucky
    for start in 0..=n {
        let mut v: Vec<T> = if start == 0 {
            vec![T::one(); n]
        } else {
            let mut e = vec![T::zero(); n];
            e[start - 1] = T::one();
            e
        };
        let nrm = vec_norm2(&v);
        v = vec_scale(&v, T::one() / nrm);
        let mut ok = true;
        for _ in 0..3 {
            let x = lu_solve(&f, &v);
            let nrm = vec_norm2(&x);
            if !nrm.is_finite() || nrm == T::zero() {
                ok = false;
                break;
            }
            v = vec_scale(&x, T::one() / nrm);
        }
        if !ok {
            continue;
        }
        let av = a.mul_vec(&v);
        let residual = vec_norm2(&crate::matrix::vec_sub(&av, &v));
        if residual < best_residual {
            best_residual = residual;
            best = Some(v);
        }
        if best_residual <= tol {
            break;
        }
    }
    let mut v = best.ok_or(Error::EigvecNonConvergence {
        residual: best_residual.to_f64_lossy(),
    })?;
    if best_residual > tol {
        return Err(Error::EigvecNonConvergence {
            residual: best_residual.to_f64_lossy(),
        });
    }
    // sign convention
    let mut idx = 0;
    for i in 1..n {
        if v[i].abs() > v[idx].abs() {
            idx = i;
        }
    }
    if v[idx] < T::zero() {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    Ok(v)
}
