//! Tolerance configuration shared by the structure-sensitive operations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds used throughout the library.
///
/// Jordan-structure verdicts are threshold-dependent, so every report echoes
/// the configuration it ran under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative rank threshold: singular values at or below
    /// `rank_tol * sigma_max` count as zero.
    pub rank_tol: f64,
    /// Single-linkage distance for grouping eigenvalues into clusters.
    pub cluster_tol: f64,
    /// Residual tolerance for consistency and verification checks.
    pub verify_tol: f64,
    /// Relative cutoff below which jet coefficients count as zero.
    pub jet_epsilon: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rank_tol: 1e-8,
            cluster_tol: 1e-6,
            verify_tol: 1e-8,
            jet_epsilon: 1e-9,
        }
    }
}

impl ToleranceConfig {
    /// Rejects non-positive or non-finite thresholds.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol", self.rank_tol),
            ("cluster_tol", self.cluster_tol),
            ("verify_tol", self.verify_tol),
            ("jet_epsilon", self.jet_epsilon),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive() {
        for bad in [0.0, -1.0, f64::NAN] {
            let cfg = ToleranceConfig {
                rank_tol: bad,
                ..Default::default()
            };
            assert!(cfg.validate().is_err());
        }
    }
}
