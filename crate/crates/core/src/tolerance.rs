use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances used by every rank, kernel and clustering decision in
/// the crate.
///
/// The three knobs are deliberately separate: `abs` guards residuals of
/// algebraic identities (group axioms, skewness, orthogonality), `rank_rel`
/// is the relative singular-value cutoff for rank and nullspace computations,
/// and `eig_cluster_rel` is the relative gap under which nearby eigenvalue
/// magnitudes of a skew matrix are merged into a single rotation block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Absolute residual tolerance for algebraic identities.
    pub abs: f64,
    /// Relative singular-value threshold for rank decisions.
    pub rank_rel: f64,
    /// Relative gap for grouping eigenvalue magnitudes into blocks.
    pub eig_cluster_rel: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rank_rel: 1e-10,
            eig_cluster_rel: 1e-8,
        }
    }
}

impl ToleranceConfig {
    /// Checks that all three tolerances are strictly positive.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("abs", self.abs),
            ("rank_rel", self.rank_rel),
            ("eig_cluster_rel", self.eig_cluster_rel),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }

    /// Absolute tolerance scaled by the magnitude of the data it is applied
    /// to, `abs * max(1, scale)`.
    pub fn abs_scaled(&self, scale: f64) -> f64 {
        self.abs * scale.max(1.0)
    }
}
