//! Interpolation-problem instances: nodes, target matrices, and the map into
//! the symmetrized polydisc as polynomial coefficient data.

use num_complex::Complex64;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::jet::{from_polynomial, Jet};
use crate::matrix::ComplexMatrix;
use crate::projection::{in_spectral_ball, project, SymPoint};

/// Maximum accepted polynomial degree for the map components. Vanishing
/// orders at a point depend only on finitely many Taylor coefficients, so
/// analytic maps must be pre-truncated by the caller.
pub const MAX_F_DEGREE: usize = 64;

/// A lifting-problem instance: distinct nodes in the unit disc, target
/// matrices, and the polynomial components of the map into the symmetrized
/// polydisc (ascending coefficients).
#[derive(Debug, Clone, PartialEq)]
pub struct LiftInstance {
    nodes: Vec<Complex64>,
    matrices: Vec<ComplexMatrix>,
    f: Vec<Vec<Complex64>>,
}

impl LiftInstance {
    /// Structural validation only: shapes, finiteness, node distinctness and
    /// disc membership. Semantic checks (spectral-ball membership,
    /// node consistency of `f`) have dedicated entry points since different
    /// commands treat them differently.
    pub fn new(
        nodes: Vec<Complex64>,
        matrices: Vec<ComplexMatrix>,
        f: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("at least one node required".into()));
        }
        if matrices.len() != nodes.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} matrices, got {}",
                nodes.len(),
                matrices.len()
            )));
        }
        let n = matrices[0].dim();
        if matrices.iter().any(|m| m.dim() != n) {
            return Err(Error::InvalidArgument(
                "all matrices must share one dimension".into(),
            ));
        }
        if f.len() != n {
            return Err(Error::InvalidArgument(format!(
                "expected {n} map components, got {}",
                f.len()
            )));
        }
        for (j, comp) in f.iter().enumerate() {
            if comp.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "map component {j} has no coefficients"
                )));
            }
            if comp.len() > MAX_F_DEGREE + 1 {
                return Err(Error::InvalidArgument(format!(
                    "map component {j} exceeds degree {MAX_F_DEGREE}"
                )));
            }
            if !comp.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        for (j, a) in nodes.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            if a.norm() >= 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "node {j} lies outside the open unit disc"
                )));
            }
        }
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if nodes[i] == nodes[j] {
                    return Err(Error::NodeCollision { first: i, second: j });
                }
            }
        }
        Ok(LiftInstance { nodes, matrices, f })
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn map_coeffs(&self) -> &[Vec<Complex64>] {
        &self.f
    }

    /// Value of the map at `v`.
    pub fn eval_map(&self, v: Complex64) -> SymPoint {
        let y = self
            .f
            .iter()
            .map(|comp| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &c in comp.iter().rev() {
                    acc = acc * v + c;
                }
                acc
            })
            .collect();
        SymPoint::new(y).expect("component count is n >= 1")
    }

    /// The map's components recentred at node `j` as jets of the given order.
    pub fn jets_at(&self, j: usize, order: usize) -> Vec<Jet> {
        self.f
            .iter()
            .map(|comp| from_polynomial(comp, self.nodes[j], order))
            .collect()
    }

    /// Every target inside the spectral ball.
    pub fn validate_membership(&self) -> Result<()> {
        for (j, m) in self.matrices.iter().enumerate() {
            if !in_spectral_ball(m)?.inside {
                return Err(Error::InvalidArgument(format!(
                    "matrix {j} lies outside the spectral ball"
                )));
            }
        }
        Ok(())
    }

    /// Largest component mismatch between `f(a_j)` and `project(A_j)`.
    pub fn consistency_residual(&self, j: usize) -> f64 {
        self.eval_map(self.nodes[j]).max_abs_diff(&project(&self.matrices[j]))
    }

    /// `f(a_j) = project(A_j)` at every node, within `verify_tol`.
    pub fn validate_consistency(&self, cfg: &ToleranceConfig) -> Result<()> {
        for j in 0..self.node_count() {
            let r = self.consistency_residual(j);
            if r > cfg.verify_tol {
                return Err(Error::InvalidArgument(format!(
                    "map value at node {j} differs from the target projection by {r:.3e}"
                )));
            }
        }
        Ok(())
    }
}
