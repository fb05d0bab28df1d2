//! The local lifting criterion at one node and the global verdict across all
//! interpolation nodes.
//!
//! At a node p with target M, the criterion compares, for every eigenvalue
//! lambda_j of M and every derivative order k below its multiplicity, the
//! vanishing order in v of the k-th lambda-derivative of the characteristic
//! polynomial of f(v) at lambda_j against the minimal-generator count
//! d_{N_j - k} of the blocks at lambda_j.

use num_complex::Complex64;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::instance::LiftInstance;
use crate::jet::{Jet, VanishingOrder};
use crate::jordan::{d_sequence, jordan_structure};
use crate::matrix::ComplexMatrix;
use crate::projection::{in_symmetrized_polydisc, project};

/// How Jordan blocks sharing an eigenvalue enter the required orders.
///
/// `Grouped` takes the direct sum of all blocks at each eigenvalue with k
/// ranging over the algebraic multiplicity; `PerBlock` reads each literal
/// block separately, which makes every required order equal one. Grouped is
/// the default: the per-block reading cannot reproduce the forced order-two
/// determinant vanishing at the 2x2 zero matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockReading {
    Grouped,
    PerBlock,
}

impl BlockReading {
    pub fn as_str(&self) -> &'static str {
        match self {
            BlockReading::Grouped => "grouped",
            BlockReading::PerBlock => "per-block",
        }
    }
}

/// Recorded in every report: the checker tests the order conditions only and
/// does not require the auxiliary cyclicity of the local section away from
/// the node.
pub const CRITERION_ASSUMPTION: &str =
    "order conditions only; cyclicity of the section off the node is not required";

/// One node of the lifting problem.
#[derive(Debug, Clone)]
pub struct LocalProblem {
    pub node: Complex64,
    pub target: ComplexMatrix,
    pub fjets: Vec<Jet>,
}

impl LocalProblem {
    pub fn new(node: Complex64, target: ComplexMatrix, fjets: Vec<Jet>) -> Result<Self> {
        let n = target.dim();
        if fjets.len() != n {
            return Err(Error::InvalidArgument(format!(
                "expected {n} jets, got {}",
                fjets.len()
            )));
        }
        if fjets.iter().any(|j| j.base() != node) {
            return Err(Error::BaseMismatch);
        }
        let order = fjets[0].order();
        if fjets.iter().any(|j| j.order() != order) {
            return Err(Error::BaseMismatch);
        }
        Ok(LocalProblem { node, target, fjets })
    }
}

/// One (k, required, observed) row of the criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderCheck {
    pub k: usize,
    pub required: usize,
    pub observed: VanishingOrder,
    pub pass: bool,
}

/// Criterion rows for one eigenvalue cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    pub eigenvalue: Complex64,
    pub multiplicity: usize,
    pub partition: Vec<usize>,
    pub checks: Vec<OrderCheck>,
}

/// Verdict at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalReport {
    pub node: Complex64,
    pub consistent: bool,
    pub consistency_residual: f64,
    pub clusters: Vec<ClusterReport>,
    pub pass: bool,
    pub reading: BlockReading,
    pub thresholds: ToleranceConfig,
}

impl LocalReport {
    /// Failing (eigenvalue, k, required, observed) rows.
    pub fn failures(&self) -> Vec<(Complex64, usize, usize, VanishingOrder)> {
        let mut out = Vec::new();
        for c in &self.clusters {
            for chk in &c.checks {
                if !chk.pass {
                    out.push((c.eigenvalue, chk.k, chk.required, chk.observed));
                }
            }
        }
        out
    }
}

/// Membership warning from sampling the map over the disc.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainWarning {
    pub sample: Complex64,
    pub margin: f64,
}

/// Verdict of the global problem: solvable iff every node passes.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalVerdict {
    pub reports: Vec<LocalReport>,
    pub solvable: bool,
    pub domain_warnings: Vec<DomainWarning>,
}

impl GlobalVerdict {
    /// Failing (node index, eigenvalue, k, required, observed) triples; a
    /// "not solvable" verdict always carries at least one unless the failure
    /// is a pure consistency mismatch.
    pub fn failing_triples(&self) -> Vec<(usize, Complex64, usize, usize, VanishingOrder)> {
        let mut out = Vec::new();
        for (j, rep) in self.reports.iter().enumerate() {
            for (lambda, k, required, observed) in rep.failures() {
                out.push((j, lambda, k, required, observed));
            }
        }
        out
    }
}

fn falling_factorial(m: usize, k: usize) -> f64 {
    if k > m {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (m - i) as f64;
    }
    acc
}

fn int_pow(z: Complex64, e: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..e {
        acc *= z;
    }
    acc
}

/// Jet in v of the k-th lambda-derivative of the characteristic polynomial
/// of f(v), evaluated at lambda, together with the magnitude scale of its
/// contributions (the same accumulation run on absolute values).
///
/// The true value cancels to zero on consistent data, so the noise cutoff
/// must be measured against the contribution scale rather than the result.
pub fn chi_derivative_jet_scaled(
    fjets: &[Jet],
    lambda: Complex64,
    k: usize,
) -> Result<(Jet, f64)> {
    let n = fjets.len();
    if n == 0 {
        return Err(Error::InvalidArgument("no jet components".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "derivative order {k} exceeds dimension {n}"
        )));
    }
    let base = fjets[0].base();
    let order = fjets[0].order();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); order];
    let mut abs_coeffs = vec![0.0f64; order];

    // lambda^n term.
    let lead = falling_factorial(n, k);
    if lead != 0.0 {
        let term = int_pow(lambda, n - k) * lead;
        coeffs[0] += term;
        abs_coeffs[0] += term.norm();
    }
    // (-1)^j f_j(v) lambda^(n-j) terms.
    for j in 1..=n {
        let fall = falling_factorial(n - j, k);
        if fall == 0.0 {
            continue;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let weight = int_pow(lambda, n - j - k) * (fall * sign);
        let wnorm = weight.norm();
        for (i, &c) in fjets[j - 1].coeffs().iter().enumerate() {
            coeffs[i] += weight * c;
            abs_coeffs[i] += wnorm * c.norm();
        }
    }
    let scale = abs_coeffs.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok((Jet::new(base, coeffs)?, scale))
}

/// Jet of the k-th lambda-derivative of `chi_{f(v)}` at lambda.
pub fn chi_derivative_jet(fjets: &[Jet], lambda: Complex64, k: usize) -> Result<Jet> {
    Ok(chi_derivative_jet_scaled(fjets, lambda, k)?.0)
}

/// Constant terms of the jets against the projection of the target.
pub fn check_consistency(problem: &LocalProblem, cfg: &ToleranceConfig) -> (bool, f64) {
    let y = project(&problem.target);
    let residual = problem
        .fjets
        .iter()
        .zip(y.components())
        .map(|(jet, &c)| (jet.constant_term() - c).norm())
        .fold(0.0, f64::max);
    (residual <= cfg.verify_tol, residual)
}

/// Decides the order conditions at one node.
pub fn check_local(
    problem: &LocalProblem,
    reading: BlockReading,
    cfg: &ToleranceConfig,
) -> Result<LocalReport> {
    let (consistent, consistency_residual) = check_consistency(problem, cfg);

    // The hypothesis is f(p) = project(M) exactly; data passing the
    // consistency gate is snapped onto it so that sub-verify_tol noise in
    // the constants cannot masquerade as order-zero terms.
    let fjets: Vec<Jet> = if consistent {
        let y = project(&problem.target);
        problem
            .fjets
            .iter()
            .zip(y.components())
            .map(|(jet, &c)| {
                let mut coeffs = jet.coeffs().to_vec();
                coeffs[0] = c;
                Jet::new(jet.base(), coeffs).expect("finite")
            })
            .collect()
    } else {
        problem.fjets.clone()
    };

    let structure = jordan_structure(&problem.target, cfg)
        .map_err(|e| Error::StructureFailure(Box::new(e)))?;

    let mut clusters = Vec::with_capacity(structure.clusters.len());
    let mut all_pass = true;
    for (idx, cs) in structure.clusters.iter().enumerate() {
        let mult = cs.cluster.multiplicity;
        let lambda = cs.cluster.value;
        let dseq = d_sequence(&structure.restrict(idx));
        let max_block = cs.partition.iter().copied().max().unwrap_or(0);
        let mut checks = Vec::with_capacity(mult);
        for k in 0..mult {
            let required = match reading {
                BlockReading::Grouped => dseq.at(mult - k),
                BlockReading::PerBlock => usize::from(k < max_block),
            };
            let (jet, scale) = chi_derivative_jet_scaled(&fjets, lambda, k)?;
            let observed = if scale == 0.0 {
                VanishingOrder::AtLeastK
            } else {
                jet.order_above(cfg.jet_epsilon * scale)
            };
            let pass = observed.satisfies(required);
            all_pass &= pass;
            checks.push(OrderCheck {
                k,
                required,
                observed,
                pass,
            });
        }
        clusters.push(ClusterReport {
            eigenvalue: lambda,
            multiplicity: mult,
            partition: cs.partition.clone(),
            checks,
        });
    }

    Ok(LocalReport {
        node: problem.node,
        consistent,
        consistency_residual,
        clusters,
        pass: consistent && all_pass,
        reading,
        thresholds: *cfg,
    })
}

/// Number of disc samples used for the domain membership warning.
const DOMAIN_SAMPLES: usize = 64;

/// Deterministic quasi-uniform points of the disc of radius `r`.
pub fn disc_samples(count: usize, r: f64) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..count)
        .map(|i| {
            let rad = r * (((i as f64) + 0.5) / (count as f64)).sqrt();
            let theta = golden * (i as f64);
            Complex64::new(rad * theta.cos(), rad * theta.sin())
        })
        .collect()
}

/// Runs the local criterion at every node.
///
/// Targets outside the spectral ball are rejected; map samples leaving the
/// symmetrized polydisc only produce warnings, since the problem statement
/// assumes the map stays inside.
pub fn check_global(
    instance: &LiftInstance,
    reading: BlockReading,
    cfg: &ToleranceConfig,
) -> Result<GlobalVerdict> {
    instance.validate_membership()?;

    let mut domain_warnings = Vec::new();
    for v in disc_samples(DOMAIN_SAMPLES, 0.98) {
        let m = in_symmetrized_polydisc(&instance.eval_map(v))?;
        if !m.inside {
            domain_warnings.push(DomainWarning {
                sample: v,
                margin: m.margin,
            });
        }
    }

    let n = instance.dim();
    let order = 2 * n + 2;
    let mut reports = Vec::with_capacity(instance.node_count());
    for j in 0..instance.node_count() {
        let problem = LocalProblem::new(
            instance.nodes()[j],
            instance.matrices()[j].clone(),
            instance.jets_at(j, order),
        )?;
        reports.push(check_local(&problem, reading, cfg)?);
    }
    let solvable = reports.iter().all(|r| r.pass);
    Ok(GlobalVerdict {
        reports,
        solvable,
        domain_warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{companion, sigma};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn monomial_jet(e: usize, order: usize) -> Jet {
        let mut coeffs = vec![c(0.0, 0.0); order];
        if e < order {
            coeffs[e] = c(1.0, 0.0);
        }
        Jet::new(c(0.0, 0.0), coeffs).unwrap()
    }

    #[test]
    fn chi_jet_examples() {
        // n = 2, f = (t, t^2), lambda = 0.
        let fjets = vec![monomial_jet(1, 6), monomial_jet(2, 6)];
        let j0 = chi_derivative_jet(&fjets, c(0.0, 0.0), 0).unwrap();
        assert!((j0.coeffs()[2] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(j0.coeffs()[0].norm() == 0.0 && j0.coeffs()[1].norm() == 0.0);

        let j1 = chi_derivative_jet(&fjets, c(0.0, 0.0), 1).unwrap();
        assert!((j1.coeffs()[1] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn chi_jet_matches_lambda_finite_differences() {
        // n = 3, polynomial jets; compare the k-th lambda derivative against
        // central finite differences in lambda of the k = 0 jet.
        let fjets = vec![
            Jet::new(c(0.0, 0.0), vec![c(0.1, 0.05), c(0.3, -0.2), c(0.0, 0.1), c(0.0, 0.0)])
                .unwrap(),
            Jet::new(c(0.0, 0.0), vec![c(-0.2, 0.0), c(0.15, 0.1), c(0.2, 0.0), c(0.0, 0.0)])
                .unwrap(),
            Jet::new(c(0.0, 0.0), vec![c(0.05, -0.1), c(0.0, 0.0), c(-0.3, 0.2), c(0.0, 0.0)])
                .unwrap(),
        ];
        let lambda = c(0.4, -0.3);
        let h = 1e-5;
        for k in 1..=2 {
            let exact = chi_derivative_jet(&fjets, lambda, k).unwrap();
            let plus = chi_derivative_jet(&fjets, lambda + c(h, 0.0), k - 1).unwrap();
            let minus = chi_derivative_jet(&fjets, lambda - c(h, 0.0), k - 1).unwrap();
            for i in 0..exact.order() {
                let fd = (plus.coeffs()[i] - minus.coeffs()[i]) / c(2.0 * h, 0.0);
                assert!(
                    (fd - exact.coeffs()[i]).norm() < 1e-7 * (1.0 + exact.coeffs()[i].norm()),
                    "k={k} i={i}"
                );
            }
        }
    }

    #[test]
    fn consistency_examples() {
        let zero2 = ComplexMatrix::zeros(2);
        let ok = LocalProblem::new(
            c(0.0, 0.0),
            zero2.clone(),
            vec![monomial_jet(1, 6), monomial_jet(2, 6)],
        )
        .unwrap();
        assert!(check_consistency(&ok, &cfg()).0);

        let bad = LocalProblem::new(
            c(0.0, 0.0),
            zero2,
            vec![
                Jet::new(c(0.0, 0.0), vec![c(0.1, 0.0), c(0.0, 0.0)]).unwrap(),
                Jet::new(c(0.0, 0.0), vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap(),
            ],
        )
        .unwrap();
        assert!(!check_consistency(&bad, &cfg()).0);

        let y = sigma(&[c(0.2, 0.1), c(-0.3, 0.0)]);
        let m = companion(&y);
        let jets: Vec<Jet> = y
            .components()
            .iter()
            .map(|&v| Jet::constant(v, c(0.0, 0.0), 6))
            .collect();
        let p = LocalProblem::new(c(0.0, 0.0), m, jets).unwrap();
        assert!(check_consistency(&p, &cfg()).0);
    }

    #[test]
    fn zero_matrix_witness_passes() {
        // f = (t, t^2) lifts through the 2x2 zero matrix.
        let problem = LocalProblem::new(
            c(0.0, 0.0),
            ComplexMatrix::zeros(2),
            vec![monomial_jet(1, 6), monomial_jet(2, 6)],
        )
        .unwrap();
        let report = check_local(&problem, BlockReading::Grouped, &cfg()).unwrap();
        assert!(report.pass);
        let checks = &report.clusters[0].checks;
        assert_eq!(checks[0].required, 2);
        assert_eq!(checks[0].observed, VanishingOrder::Order(2));
        assert_eq!(checks[1].required, 1);
        assert_eq!(checks[1].observed, VanishingOrder::Order(1));
    }

    #[test]
    fn zero_matrix_obstruction_fails() {
        // f = (t, t): the determinant of any lifting vanishes to order >= 2.
        let problem = LocalProblem::new(
            c(0.0, 0.0),
            ComplexMatrix::zeros(2),
            vec![monomial_jet(1, 6), monomial_jet(1, 6)],
        )
        .unwrap();
        let report = check_local(&problem, BlockReading::Grouped, &cfg()).unwrap();
        assert!(!report.pass);
        let failures = report.failures();
        assert_eq!(failures.len(), 1);
        let (lambda, k, required, observed) = failures[0];
        assert!(lambda.norm() < 1e-12);
        assert_eq!(k, 0);
        assert_eq!(required, 2);
        assert_eq!(observed, VanishingOrder::Order(1));
    }

    #[test]
    fn cyclic_target_passes_with_any_higher_terms() {
        let y = sigma(&[c(0.3, 0.0), c(-0.2, 0.1)]);
        let m = companion(&y);
        let jets: Vec<Jet> = y
            .components()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut coeffs = vec![c(0.0, 0.0); 6];
                coeffs[0] = v;
                coeffs[1] = c(0.3 + i as f64, -0.7);
                coeffs[3] = c(-0.2, 0.4);
                Jet::new(c(0.0, 0.0), coeffs).unwrap()
            })
            .collect();
        let problem = LocalProblem::new(c(0.0, 0.0), m, jets).unwrap();
        let report = check_local(&problem, BlockReading::Grouped, &cfg()).unwrap();
        assert!(report.pass);
        for cr in &report.clusters {
            for chk in &cr.checks {
                assert_eq!(chk.required, 1);
            }
        }
    }

    #[test]
    fn constant_map_on_cyclic_target_passes() {
        // Constant f with a cyclic target: all constants cancel to noise,
        // which must not read as order zero.
        let y = sigma(&[c(0.3, 0.2), c(-0.4, 0.0), c(0.1, -0.5)]);
        let m = companion(&y);
        let jets: Vec<Jet> = y
            .components()
            .iter()
            .map(|&v| Jet::constant(v, c(0.2, 0.0), 8))
            .collect();
        let problem = LocalProblem::new(c(0.2, 0.0), m, jets).unwrap();
        let report = check_local(&problem, BlockReading::Grouped, &cfg()).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn grouped_is_stricter_than_per_block() {
        let structure_cases: Vec<ComplexMatrix> = vec![
            ComplexMatrix::zeros(2),
            ComplexMatrix::zeros(3),
            crate::jordan::JordanStructure::from_parts(&[(c(0.0, 0.0), vec![2, 1])])
                .unwrap()
                .model_matrix(),
        ];
        for m in structure_cases {
            let n = m.dim();
            let jets: Vec<Jet> = (1..=n).map(|j| monomial_jet(j, 2 * n + 2)).collect();
            let problem = LocalProblem::new(c(0.0, 0.0), m, jets).unwrap();
            let grouped = check_local(&problem, BlockReading::Grouped, &cfg()).unwrap();
            let per_block = check_local(&problem, BlockReading::PerBlock, &cfg()).unwrap();
            for (cg, cp) in grouped.clusters.iter().zip(&per_block.clusters) {
                for (a, b) in cg.checks.iter().zip(&cp.checks) {
                    assert!(a.required >= b.required);
                }
            }
        }
    }

    #[test]
    fn monotone_in_extra_vanishing() {
        // Multiplying non-constant parts by extra powers of t never flips a
        // pass to fail.
        let m = ComplexMatrix::zeros(2);
        for (e1, e2) in [(1usize, 2usize), (2, 2), (1, 3)] {
            let base = LocalProblem::new(
                c(0.0, 0.0),
                m.clone(),
                vec![monomial_jet(e1, 8), monomial_jet(e2, 8)],
            )
            .unwrap();
            let bumped = LocalProblem::new(
                c(0.0, 0.0),
                m.clone(),
                vec![monomial_jet(e1 + 1, 8), monomial_jet(e2 + 1, 8)],
            )
            .unwrap();
            let r0 = check_local(&base, BlockReading::Grouped, &cfg()).unwrap();
            let r1 = check_local(&bumped, BlockReading::Grouped, &cfg()).unwrap();
            if r0.pass {
                assert!(r1.pass);
            }
        }
    }

    #[test]
    fn zero_matrix_pattern_dimension_four() {
        // check_local(M = 0) passes exactly when ord(f_j) >= j, swept over
        // monomial jets.
        let n = 4;
        let order = 2 * n + 2;
        let zero = ComplexMatrix::zeros(n);
        let mut exponents = vec![0usize; n];
        loop {
            let fjets: Vec<Jet> = exponents.iter().map(|&e| monomial_jet(e, order)).collect();
            let problem = LocalProblem::new(c(0.0, 0.0), zero.clone(), fjets).unwrap();
            let report = check_local(&problem, BlockReading::Grouped, &cfg()).unwrap();
            let expected = exponents.iter().enumerate().all(|(idx, &e)| e > idx);
            assert_eq!(report.pass, expected, "exponents {exponents:?}");
            let mut carry = true;
            for e in exponents.iter_mut() {
                if carry {
                    *e += 1;
                    if *e == 6 {
                        *e = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                break;
            }
        }
    }

    #[test]
    fn global_verdicts() {
        // Constant map with a cyclic target: solvable.
        let y = sigma(&[c(0.25, 0.0), c(-0.4, 0.1)]);
        let a1 = companion(&y);
        let inst = LiftInstance::new(
            vec![c(0.0, 0.0)],
            vec![a1],
            y.components().iter().map(|&v| vec![v]).collect(),
        )
        .unwrap();
        let verdict = check_global(&inst, BlockReading::Grouped, &cfg()).unwrap();
        assert!(verdict.solvable);
        assert!(verdict.domain_warnings.is_empty());

        // (v, v) through the 2x2 zero matrix: not solvable.
        let inst = LiftInstance::new(
            vec![c(0.0, 0.0)],
            vec![ComplexMatrix::zeros(2)],
            vec![
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
            ],
        )
        .unwrap();
        let verdict = check_global(&inst, BlockReading::Grouped, &cfg()).unwrap();
        assert!(!verdict.solvable);
        let triples = verdict.failing_triples();
        assert!(!triples.is_empty());
        assert_eq!(triples[0].0, 0);
        assert_eq!(triples[0].2, 0);
        assert_eq!(triples[0].3, 2);
    }

    #[test]
    fn global_rejects_duplicate_nodes_at_construction() {
        let m = ComplexMatrix::zeros(2);
        let err = LiftInstance::new(
            vec![c(0.1, 0.0), c(0.1, 0.0)],
            vec![m.clone(), m],
            vec![vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NodeCollision { .. }));
    }

    #[test]
    fn domain_warning_raised_for_escaping_map() {
        // f_1(v) = 3v escapes the symmetrized bidisc well inside the disc,
        // while staying consistent at the node with the zero matrix.
        let inst = LiftInstance::new(
            vec![c(0.0, 0.0)],
            vec![ComplexMatrix::zeros(2)],
            vec![vec![c(0.0, 0.0), c(3.0, 0.0)], vec![c(0.0, 0.0)]],
        )
        .unwrap();
        let verdict = check_global(&inst, BlockReading::Grouped, &cfg()).unwrap();
        assert!(!verdict.domain_warnings.is_empty());
    }
}
