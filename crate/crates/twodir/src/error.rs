//! Crate-wide error type.

use crate::expr::ExprError;
use crate::mask::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bundle failed structural validation; carries every violation found.
    #[error("mask validation failed: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    /// The relevant mask matrix does not have a simple eigenvalue 1 with the
    /// rest of the spectrum inside the unit disk.
    #[error("Condition E prerequisite failed for {context}")]
    ConditionENotSatisfied { context: &'static str },

    /// QR iteration did not converge (does not happen for sane inputs).
    #[error("eigenvalue iteration failed to converge for a {size}x{size} matrix")]
    EigenNonConvergence { size: usize },

    /// Eigenvector extraction failed to reach the requested residual.
    #[error("eigenvector for eigenvalue 1 did not converge (residual {residual:.3e})")]
    EigvecNonConvergence { residual: f64 },

    /// Linear system numerically singular; carries the failing pivot.
    #[error("singular system: pivot magnitude {pivot:.3e} below threshold")]
    SingularSystem { pivot: f64 },

    /// A moment solve failed at a specific recursion order.
    #[error("moment recursion stalled at order {order}: {source}")]
    SingularAtOrder {
        order: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("vector of odd length {len} cannot be split into halves")]
    OddLength { len: usize },

    #[error("moment order {requested} exceeds supported maximum {max}")]
    OrderTooLarge { requested: usize, max: usize },

    /// The dyadic grid cannot resolve the piecewise-constant cells the
    /// cascade produces after the requested number of iterations.
    #[error("grid level {level} too coarse for {iterations} cascade iterations at dilation {dilation}")]
    GridTooCoarse {
        iterations: u32,
        level: u32,
        dilation: u32,
    },

    #[error("grid level {level} would allocate {points} points; refusing")]
    GridTooLarge { level: u32, points: u64 },

    #[error("expression error: {0}")]
    Expr(#[from] ExprError),

    /// Expression error inside a mask file, with the entry it came from.
    #[error("bad entry at {location}: {source}")]
    BadEntry {
        location: String,
        #[source]
        source: ExprError,
    },

    #[error("mask file error: {0}")]
    MaskFile(String),

    #[error("unknown bundled example '{0}'")]
    UnknownExample(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(Violation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
