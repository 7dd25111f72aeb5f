use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by the orbit machinery.
///
/// The variants mirror the failure modes of the public operations: malformed
/// inputs (dimensions, skewness, orthogonality, subalgebra membership),
/// numerical breakdown of a decomposition, and domain errors of the orbit and
/// line constructions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not skew-symmetric: |A + A^T| = {residual:.3e} exceeds {tol:.3e}")]
    NotSkew { residual: f64, tol: f64 },

    #[error("matrix is not orthogonal: |R^T R - I| = {residual:.3e} exceeds {tol:.3e}")]
    NotOrthogonal { residual: f64, tol: f64 },

    #[error("determinant is {det:.6}, but the family requires +1")]
    NotSpecial { det: f64 },

    #[error("{context} must vanish for compact families (O/SO), but has norm {norm:.3e}")]
    TranslationNotSupported { context: &'static str, norm: f64 },

    #[error(
        "matrix does not lie in the subalgebra span: residual {residual:.3e} exceeds {tol:.3e}"
    )]
    NotInSubalgebra { residual: f64, tol: f64 },

    #[error("subalgebra basis is not closed under the commutator: residual {residual:.3e} at pair ({i}, {j})")]
    BasisNotClosed { i: usize, j: usize, residual: f64 },

    #[error("subalgebra basis is linearly dependent (rank {rank} < {len})")]
    BasisDegenerate { rank: usize, len: usize },

    #[error("tolerance `{name}` must be a finite positive number, got {value}")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("numerical decomposition failed: {0}")]
    Decomposition(String),

    #[error("operation is not supported for family {family}: {reason}")]
    UnsupportedFamily {
        family: &'static str,
        reason: &'static str,
    },

    #[error("malformed flag signature: {0}")]
    MalformedSignature(String),

    #[error("no bundle relation between the two orbit classes")]
    NotRelated,

    #[error("momentum vector p is zero; the construction needs p != 0")]
    ZeroMomentum,

    #[error(
        "point is not on the oriented-line orbit: reduced angular part has norm {residual:.3e}"
    )]
    NotOnLineOrbit { residual: f64 },

    #[error("inconsistent line data: residual {residual:.3e}")]
    LineMismatch { residual: f64 },

    #[error("internal cross-check failed: {0}")]
    InvariantViolation(String),
}
