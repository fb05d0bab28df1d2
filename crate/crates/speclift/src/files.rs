//! Versioned JSON schemas for instance files, reports, and lifting payloads.
//!
//! Complex numbers are explicit `[re, im]` pairs everywhere; no
//! string-encoded complex values. Report payloads are deterministic given
//! (input, seed, version): maps are avoided in favor of ordered vectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::criterion::{BlockReading, GlobalVerdict, LocalReport, CRITERION_ASSUMPTION};
use crate::error::{Error, Result};
use crate::instance::LiftInstance;
use crate::jordan::JordanStructure;
use crate::lift::{Conjugator, HoloMatrixMap, LinePath, LiftVerification, MatrixInterpolant};
use crate::matrix::ComplexMatrix;

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk instance: nodes, matrices, map coefficients, optional overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema: u32,
    pub n: usize,
    pub nodes: Vec<Complex64>,
    /// Row-major rows per matrix.
    pub matrices: Vec<Vec<Vec<Complex64>>>,
    /// Ascending coefficients per map component.
    pub f: Vec<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reading: Option<String>,
}

/// Optional per-file threshold overrides.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jet_epsilon: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: ToleranceConfig) -> ToleranceConfig {
        ToleranceConfig {
            rank_tol: self.rank_tol.unwrap_or(base.rank_tol),
            cluster_tol: self.cluster_tol.unwrap_or(base.cluster_tol),
            verify_tol: self.verify_tol.unwrap_or(base.verify_tol),
            jet_epsilon: self.jet_epsilon.unwrap_or(base.jet_epsilon),
        }
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile> {
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("parse error: {e}")))?;
        if file.schema != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "schema: expected {SCHEMA_VERSION}, got {}",
                file.schema
            )));
        }
        Ok(file)
    }

    /// Shape validation with field-path diagnostics, then the structural
    /// checks of `LiftInstance::new`.
    pub fn to_instance(&self) -> Result<LiftInstance> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidArgument("n: must be >= 1".into()));
        }
        if self.matrices.len() != self.nodes.len() {
            return Err(Error::InvalidArgument(format!(
                "matrices: expected {} entries to match nodes, got {}",
                self.nodes.len(),
                self.matrices.len()
            )));
        }
        let mut matrices = Vec::with_capacity(self.matrices.len());
        for (k, rows) in self.matrices.iter().enumerate() {
            if rows.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "matrices[{k}]: expected {n} rows, got {}",
                    rows.len()
                )));
            }
            let mut data = Vec::with_capacity(n * n);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "matrices[{k}][{i}]: expected {n} entries, got {}",
                        row.len()
                    )));
                }
                data.extend_from_slice(row);
            }
            let m = ComplexMatrix::new(n, data).map_err(|e| match e {
                Error::NonFinite => {
                    Error::InvalidArgument(format!("matrices[{k}]: non-finite entry"))
                }
                other => other,
            })?;
            matrices.push(m);
        }
        if self.f.len() != n {
            return Err(Error::InvalidArgument(format!(
                "f: expected {n} components, got {}",
                self.f.len()
            )));
        }
        LiftInstance::new(self.nodes.clone(), matrices, self.f.clone())
    }

    pub fn tolerance_config(&self, cli: &ToleranceOverrides) -> Result<ToleranceConfig> {
        let mut cfg = ToleranceConfig::default();
        if let Some(file_overrides) = &self.tolerances {
            cfg = file_overrides.apply(cfg);
        }
        cfg = cli.apply(cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reading requested by the file; a CLI override wins separately.
    pub fn reading(&self) -> Result<Option<BlockReading>> {
        match self.reading.as_deref() {
            None => Ok(None),
            Some(s) => Ok(Some(parse_reading(s)?)),
        }
    }
}

pub fn parse_reading(s: &str) -> Result<BlockReading> {
    match s {
        "grouped" => Ok(BlockReading::Grouped),
        "per-block" => Ok(BlockReading::PerBlock),
        other => Err(Error::InvalidArgument(format!(
            "reading: expected \"grouped\" or \"per-block\", got \"{other}\""
        ))),
    }
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    let n = m.dim();
    (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<Complex64>]) -> Result<ComplexMatrix> {
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for row in rows {
        if row.len() != n {
            return Err(Error::InvalidArgument("matrix rows are not square".into()));
        }
        data.extend_from_slice(row);
    }
    ComplexMatrix::new(n, data)
}

/// Machine-readable error info carried by failure reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

impl ErrorInfo {
    pub fn from_error(e: &Error) -> ErrorInfo {
        ErrorInfo {
            code: error_code(e).to_string(),
            message: e.to_string(),
        }
    }
}

pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "dimension-mismatch",
        Error::NonFinite => "non-finite",
        Error::NonConvergence { .. } => "non-convergence",
        Error::Singular => "singular",
        Error::BranchFailure => "branch-failure",
        Error::AmbiguousClustering => "ambiguous-clustering",
        Error::InconsistentRanks => "inconsistent-ranks",
        Error::NotSimilar => "not-similar",
        Error::NotCyclic { .. } => "not-cyclic",
        Error::NoInvertibleSolution => "no-invertible-solution",
        Error::NodeCollision { .. } => "node-collision",
        Error::BaseMismatch => "base-mismatch",
        Error::StructureFailure(_) => "structure-failure",
        Error::InvalidArgument(_) => "invalid-argument",
    }
}

/// Validation failures exit with 2 and no report; numerical failures exit
/// with 3 and a report carrying the error info.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::DimensionMismatch { .. }
        | Error::NonFinite
        | Error::NodeCollision { .. }
        | Error::BaseMismatch
        | Error::InvalidArgument(_) => 2,
        Error::NonConvergence { .. }
        | Error::Singular
        | Error::BranchFailure
        | Error::AmbiguousClustering
        | Error::InconsistentRanks
        | Error::NotSimilar
        | Error::NotCyclic { .. }
        | Error::NoInvertibleSolution
        | Error::StructureFailure(_) => 3,
    }
}

/// Top-level report written for exit codes 0 and 3.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: u32,
    pub command: String,
    pub input_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifting_sha256: Option<String>,
    pub seed: u64,
    pub reading: String,
    pub thresholds: ToleranceConfig,
    pub payload: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub wall_ms: f64,
}

// ---- payload building blocks -------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipInfo {
    pub inside: bool,
    pub margin: f64,
    pub boundary: bool,
}

impl From<crate::projection::Membership> for MembershipInfo {
    fn from(m: crate::projection::Membership) -> Self {
        MembershipInfo {
            inside: m.inside,
            margin: m.margin,
            boundary: m.boundary,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterInfo {
    pub eigenvalue: Complex64,
    pub multiplicity: usize,
    pub partition: Vec<usize>,
    pub weyr: Vec<usize>,
}

pub fn structure_to_clusters(s: &JordanStructure) -> Vec<ClusterInfo> {
    s.clusters
        .iter()
        .map(|c| ClusterInfo {
            eigenvalue: c.cluster.value,
            multiplicity: c.cluster.multiplicity,
            partition: c.partition.clone(),
            weyr: c.weyr.clone(),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderCheckInfo {
    pub k: usize,
    pub required: usize,
    /// Observed vanishing order; absent when at least the truncation order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<usize>,
    pub at_least_truncation: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterCheckInfo {
    pub eigenvalue: Complex64,
    pub multiplicity: usize,
    pub partition: Vec<usize>,
    pub checks: Vec<OrderCheckInfo>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalReportInfo {
    pub node_index: usize,
    pub node: Complex64,
    pub consistent: bool,
    pub consistency_residual: f64,
    pub clusters: Vec<ClusterCheckInfo>,
    pub pass: bool,
    pub reading: String,
    pub assumption: String,
}

pub fn local_report_info(index: usize, report: &LocalReport) -> LocalReportInfo {
    LocalReportInfo {
        node_index: index,
        node: report.node,
        consistent: report.consistent,
        consistency_residual: report.consistency_residual,
        clusters: report
            .clusters
            .iter()
            .map(|c| ClusterCheckInfo {
                eigenvalue: c.eigenvalue,
                multiplicity: c.multiplicity,
                partition: c.partition.clone(),
                checks: c
                    .checks
                    .iter()
                    .map(|chk| OrderCheckInfo {
                        k: chk.k,
                        required: chk.required,
                        observed: chk.observed.as_option(),
                        at_least_truncation: chk.observed.as_option().is_none(),
                        pass: chk.pass,
                    })
                    .collect(),
            })
            .collect(),
        pass: report.pass,
        reading: report.reading.as_str().to_string(),
        assumption: CRITERION_ASSUMPTION.to_string(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailingTriple {
    pub node_index: usize,
    pub eigenvalue: Complex64,
    pub k: usize,
    pub required: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainWarningInfo {
    pub sample: Complex64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlobalVerdictInfo {
    pub solvable: bool,
    pub reports: Vec<LocalReportInfo>,
    pub failing: Vec<FailingTriple>,
    pub domain_warnings: Vec<DomainWarningInfo>,
}

pub fn global_verdict_info(verdict: &GlobalVerdict) -> GlobalVerdictInfo {
    GlobalVerdictInfo {
        solvable: verdict.solvable,
        reports: verdict
            .reports
            .iter()
            .enumerate()
            .map(|(i, r)| local_report_info(i, r))
            .collect(),
        failing: verdict
            .failing_triples()
            .into_iter()
            .map(|(node_index, eigenvalue, k, required, observed)| FailingTriple {
                node_index,
                eigenvalue,
                k,
                required,
                observed: observed.as_option(),
            })
            .collect(),
        domain_warnings: verdict
            .domain_warnings
            .iter()
            .map(|w| DomainWarningInfo {
                sample: w.sample,
                margin: w.margin,
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationInfo {
    pub node_residual: f64,
    pub projection_residual: f64,
    pub min_margin: f64,
    pub all_inside: bool,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

impl From<&LiftVerification> for VerificationInfo {
    fn from(v: &LiftVerification) -> Self {
        VerificationInfo {
            node_residual: v.node_residual,
            projection_residual: v.projection_residual,
            min_margin: v.min_margin,
            all_inside: v.all_inside,
            samples: v.samples,
            tol: v.tol,
            pass: v.pass,
        }
    }
}

// ---- lifting payload <-> HoloMatrixMap ----------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConjugatorData {
    #[serde(rename = "constant")]
    Constant { matrix: Vec<Vec<Complex64>> },
    #[serde(rename = "exp-interpolant")]
    ExpInterpolant {
        nodes: Vec<Complex64>,
        values: Vec<Vec<Vec<Complex64>>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LiftingData {
    #[serde(rename = "conjugated-companion")]
    ConjugatedCompanion {
        f: Vec<Vec<Complex64>>,
        conjugator: ConjugatorData,
    },
    #[serde(rename = "polynomial")]
    Polynomial {
        n: usize,
        entries: Vec<Vec<Complex64>>,
    },
}

pub fn lifting_data(map: &HoloMatrixMap) -> LiftingData {
    match map {
        HoloMatrixMap::Polynomial { n, entries } => LiftingData::Polynomial {
            n: *n,
            entries: entries.clone(),
        },
        HoloMatrixMap::ConjugatedCompanion { f, conjugator } => {
            let conjugator = match conjugator {
                Conjugator::Constant { s, .. } => ConjugatorData::Constant {
                    matrix: matrix_to_rows(s),
                },
                Conjugator::ExpInterpolant(interp) => ConjugatorData::ExpInterpolant {
                    nodes: interp.nodes().to_vec(),
                    values: interp.values().iter().map(matrix_to_rows).collect(),
                },
            };
            LiftingData::ConjugatedCompanion {
                f: f.clone(),
                conjugator,
            }
        }
    }
}

pub fn lifting_from_data(data: &LiftingData) -> Result<HoloMatrixMap> {
    match data {
        LiftingData::Polynomial { n, entries } => {
            if entries.len() != n * n {
                return Err(Error::InvalidArgument(format!(
                    "lifting: expected {} polynomial entries, got {}",
                    n * n,
                    entries.len()
                )));
            }
            Ok(HoloMatrixMap::Polynomial {
                n: *n,
                entries: entries.clone(),
            })
        }
        LiftingData::ConjugatedCompanion { f, conjugator } => {
            let conjugator = match conjugator {
                ConjugatorData::Constant { matrix } => {
                    Conjugator::constant(rows_to_matrix(matrix)?)?
                }
                ConjugatorData::ExpInterpolant { nodes, values } => {
                    let values = values
                        .iter()
                        .map(|rows| rows_to_matrix(rows))
                        .collect::<Result<Vec<_>>>()?;
                    Conjugator::ExpInterpolant(MatrixInterpolant::new(nodes.clone(), values)?)
                }
            };
            Ok(HoloMatrixMap::ConjugatedCompanion {
                f: f.clone(),
                conjugator,
            })
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinePathData {
    pub mu: Complex64,
    pub factors: Vec<Vec<Vec<Complex64>>>,
    pub endpoint_residual: f64,
}

pub fn line_path_data(path: &LinePath, endpoint_residual: f64) -> LinePathData {
    LinePathData {
        mu: path.mu,
        factors: path.factors().iter().map(matrix_to_rows).collect(),
        endpoint_residual,
    }
}
