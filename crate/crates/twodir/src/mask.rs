//! Two-direction refinement masks.
//!
//! A scaling mask holds the positive- and negative-direction recursion
//! coefficients `P_k^+`, `P_k^-` of a two-direction multiscaling function;
//! a wavelet mask holds the `Q_k^+`, `Q_k^-` of one wavelet branch. Masks
//! are immutable after construction and are the sole inputs of every
//! computation in this crate.

use std::collections::BTreeMap;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Scaling mask: dilation, multiplicity, support, and the two coefficient
/// families indexed by integer shift.
#[derive(Clone, Debug)]
pub struct CoefficientMask<T> {
    name: String,
    dilation: u32,
    multiplicity: usize,
    support: (i64, i64),
    positive: BTreeMap<i64, Matrix<T>>,
    negative: BTreeMap<i64, Matrix<T>>,
}

impl<T: Scalar> CoefficientMask<T> {
    /// Permissive constructor: structural problems are reported by
    /// [`validate`], not rejected here, so invalid masks can be inspected.
    pub fn new(
        name: impl Into<String>,
        dilation: u32,
        multiplicity: usize,
        support: (i64, i64),
        positive: BTreeMap<i64, Matrix<T>>,
        negative: BTreeMap<i64, Matrix<T>>,
    ) -> Self {
        CoefficientMask {
            name: name.into(),
            dilation,
            multiplicity,
            support,
            positive,
            negative,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dilation(&self) -> u32 {
        self.dilation
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn support(&self) -> (i64, i64) {
        self.support
    }

    pub fn positive(&self) -> &BTreeMap<i64, Matrix<T>> {
        &self.positive
    }

    pub fn negative(&self) -> &BTreeMap<i64, Matrix<T>> {
        &self.negative
    }

    /// Every shift that carries a coefficient in either direction, plus the
    /// reflected shifts `-k` (which enter the doubled refinement blocks).
    pub fn doubled_shifts(&self) -> Vec<i64> {
        let mut ks: Vec<i64> = self
            .positive
            .keys()
            .chain(self.negative.keys())
            .flat_map(|&k| [k, -k])
            .collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// The `2r x 2r` coefficient block of the deduced one-direction
    /// refinement at shift `k`:
    /// `[[P_k^+, P_k^-], [P_{-k}^-, P_{-k}^+]]`.
    pub fn doubled_block(&self, k: i64) -> Matrix<T> {
        let r = self.multiplicity;
        let zero = Matrix::zeros(r, r);
        let mut block = Matrix::zeros(2 * r, 2 * r);
        block.set_block(0, 0, self.positive.get(&k).unwrap_or(&zero));
        block.set_block(0, r, self.negative.get(&k).unwrap_or(&zero));
        block.set_block(r, 0, self.negative.get(&-k).unwrap_or(&zero));
        block.set_block(r, r, self.positive.get(&-k).unwrap_or(&zero));
        block
    }
}

/// Wavelet mask for one branch `s` in `1..=d-1`.
#[derive(Clone, Debug)]
pub struct WaveletMask<T> {
    branch: u32,
    support: (i64, i64),
    positive: BTreeMap<i64, Matrix<T>>,
    negative: BTreeMap<i64, Matrix<T>>,
}

impl<T: Scalar> WaveletMask<T> {
    pub fn new(
        branch: u32,
        support: (i64, i64),
        positive: BTreeMap<i64, Matrix<T>>,
        negative: BTreeMap<i64, Matrix<T>>,
    ) -> Self {
        WaveletMask {
            branch,
            support,
            positive,
            negative,
        }
    }

    pub fn branch(&self) -> u32 {
        self.branch
    }

    pub fn support(&self) -> (i64, i64) {
        self.support
    }

    pub fn positive(&self) -> &BTreeMap<i64, Matrix<T>> {
        &self.positive
    }

    pub fn negative(&self) -> &BTreeMap<i64, Matrix<T>> {
        &self.negative
    }
}

/// A scaling mask together with its wavelet branches (possibly none).
#[derive(Clone, Debug)]
pub struct MaskBundle<T> {
    pub scaling: CoefficientMask<T>,
    pub wavelets: Vec<WaveletMask<T>>,
}

impl<T: Scalar> MaskBundle<T> {
    pub fn new(scaling: CoefficientMask<T>, wavelets: Vec<WaveletMask<T>>) -> Self {
        MaskBundle { scaling, wavelets }
    }
}

/// One structural defect found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BadDilation { dilation: u32 },
    BadMultiplicity { multiplicity: usize },
    DimensionMismatch { location: String },
    NonFiniteEntry { location: String },
    OutsideSupport { location: String, k: i64 },
    EmptySupport { location: String },
    DuplicateBranch { branch: u32 },
    BranchOutOfRange { branch: u32, dilation: u32 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BadDilation { dilation } => {
                write!(f, "dilation {dilation} must be at least 2")
            }
            Violation::BadMultiplicity { multiplicity } => {
                write!(f, "multiplicity {multiplicity} must be at least 1")
            }
            Violation::DimensionMismatch { location } => {
                write!(f, "dimension mismatch at {location}")
            }
            Violation::NonFiniteEntry { location } => {
                write!(f, "non-finite entry at {location}")
            }
            Violation::OutsideSupport { location, k } => {
                write!(f, "coefficient at shift {k} lies outside the declared support ({location})")
            }
            Violation::EmptySupport { location } => write!(f, "empty support ({location})"),
            Violation::DuplicateBranch { branch } => {
                write!(f, "duplicate wavelet branch {branch}")
            }
            Violation::BranchOutOfRange { branch, dilation } => {
                write!(f, "wavelet branch {branch} outside 1..={}", dilation - 1)
            }
        }
    }
}

/// Outcome of structural validation; `ok()` iff no violations.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_tables<T: Scalar>(
    label: &str,
    r: usize,
    support: (i64, i64),
    tables: [(&str, &BTreeMap<i64, Matrix<T>>); 2],
    out: &mut Vec<Violation>,
) {
    let (k_min, k_max) = support;
    if k_min > k_max {
        out.push(Violation::EmptySupport {
            location: label.to_string(),
        });
    }
    let mut any = false;
    for (side, table) in tables {
        for (&k, m) in table {
            any = true;
            let location = format!("{label} {side} k={k}");
            if m.rows() != r || m.cols() != r {
                out.push(Violation::DimensionMismatch {
                    location: location.clone(),
                });
            }
            if !m.is_finite() {
                out.push(Violation::NonFiniteEntry {
                    location: location.clone(),
                });
            }
            if k < k_min || k > k_max {
                out.push(Violation::OutsideSupport { location, k });
            }
        }
    }
    if !any {
        out.push(Violation::EmptySupport {
            location: format!("{label} (no coefficients)"),
        });
    }
}

/// Structural validation of a bundle. Never fails; every defect found is
/// listed in the report.
pub fn validate<T: Scalar>(bundle: &MaskBundle<T>) -> ValidationReport {
    let mut violations = Vec::new();
    let scaling = &bundle.scaling;
    let d = scaling.dilation();
    let r = scaling.multiplicity();

    if d < 2 {
        violations.push(Violation::BadDilation { dilation: d });
    }
    if r < 1 {
        violations.push(Violation::BadMultiplicity { multiplicity: r });
    }
    check_tables(
        "scaling",
        r,
        scaling.support(),
        [("positive", scaling.positive()), ("negative", scaling.negative())],
        &mut violations,
    );

    let mut seen = Vec::new();
    for w in &bundle.wavelets {
        let s = w.branch();
        if seen.contains(&s) {
            violations.push(Violation::DuplicateBranch { branch: s });
        }
        seen.push(s);
        if d >= 2 && (s == 0 || s > d - 1) {
            violations.push(Violation::BranchOutOfRange {
                branch: s,
                dilation: d,
            });
        }
        check_tables(
            &format!("wavelet branch {s}"),
            r,
            w.support(),
            [("positive", w.positive()), ("negative", w.negative())],
            &mut violations,
        );
    }

    ValidationReport { violations }
}

/// The doubled mask symbol evaluated at 1: the `2r x 2r` matrix
/// `(1/sqrt(d)) * sum_k [[P_k^+, P_k^-], [P_{-k}^-, P_{-k}^+]]`.
///
/// Condition E is stated on this matrix. Because the sum runs over all
/// shifts, the index reflection leaves it equal to `[[A, B], [B, A]]` with
/// `A`, `B` the plain coefficient sums.
pub fn doubled_mask_at_one<T: Scalar>(mask: &CoefficientMask<T>) -> Matrix<T> {
    let r = mask.multiplicity();
    let mut sum = Matrix::zeros(2 * r, 2 * r);
    for k in mask.doubled_shifts() {
        sum.axpy(T::one(), &mask.doubled_block(k));
    }
    sum.scaled(T::one() / T::from_usize_const(mask.dilation() as usize).sqrt())
}
