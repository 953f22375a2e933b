//! Moments of two-direction multiscaling functions and multiwavelets.
//!
//! A two-direction multiscaling function satisfies a refinement relation
//! that mixes `phi(d x - k)` with its reflection `phi(k - d x)`; each
//! associated multiwavelet branch expands the same way. Given the recursion
//! coefficients (the mask), this crate computes:
//!
//! - discrete moments (total, positive/negative parts, and the doubled
//!   `2r x 2r` form),
//! - continuous moments by two independent routes: doubling (stack the
//!   function with its reflection and recurse at size `2r`) and separation
//!   (fold the reflection into signs and recurse at size `r`),
//! - Condition E diagnostics for the matrices the recursions pivot on,
//! - vanishing-moment counts (which give the approximation order),
//! - an independent cascade-plus-quadrature oracle for cross-checking.
//!
//! The numeric core is generic over the scalar type; the crate root exports
//! `f64` aliases, which the file formats and the CLI use.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod expr;
pub mod io;
pub mod mask;
pub mod matrix;
pub mod moments;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Scalar type used by the file formats and the CLI.
pub type Real = f64;

pub type Matrix = matrix::Matrix<Real>;
pub type CoefficientMask = mask::CoefficientMask<Real>;
pub type WaveletMask = mask::WaveletMask<Real>;
pub type MaskBundle = mask::MaskBundle<Real>;
pub type ConditionEReport = spectral::ConditionEReport<Real>;
pub type DiscreteMomentSet = moments::discrete::DiscreteMomentSet<Real>;
pub type DoubledMoments = moments::doubling::DoubledMoments<Real>;
pub type SeparatedMoments = moments::separation::SeparatedMoments<Real>;
pub type ComparisonReport = analysis::ComparisonReport<Real>;
pub type SampledFunction = analysis::SampledFunction<Real>;
