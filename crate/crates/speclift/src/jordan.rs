//! Numerical Jordan data: eigenvalue clustering, Weyr characteristics,
//! block-size partitions, cyclicity, and the minimal-generator counts d_l
//! together with a randomized Krylov oracle for them.
//!
//! Jordan structure is discontinuous in the entries, so every decision here
//! is made against explicit thresholds that the caller can audit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::matrix::{rank_of_columns, ComplexMatrix};
use crate::poly::char_poly;

/// One eigenvalue cluster: centroid and algebraic multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Cluster together with its Jordan block partition (descending) and the
/// Weyr characteristic the partition was conjugated from.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStructure {
    pub cluster: EigenCluster,
    /// Block sizes at this eigenvalue, descending.
    pub partition: Vec<usize>,
    /// Nullity increments of powers of `A - lambda I`.
    pub weyr: Vec<usize>,
}

/// Full Jordan structure of a matrix at fixed thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanStructure {
    pub clusters: Vec<ClusterStructure>,
}

impl JordanStructure {
    /// Builds a structure from explicit (eigenvalue, partition) data.
    /// Partitions are sorted descending; the Weyr rows are derived.
    pub fn from_parts(parts: &[(Complex64, Vec<usize>)]) -> Result<Self> {
        let mut clusters = Vec::new();
        for (value, partition) in parts {
            if partition.is_empty() || partition.contains(&0) {
                return Err(Error::InvalidArgument(
                    "partition parts must be positive".into(),
                ));
            }
            let mut partition = partition.clone();
            partition.sort_unstable_by(|a, b| b.cmp(a));
            let weyr = conjugate_partition(&partition);
            clusters.push(ClusterStructure {
                cluster: EigenCluster {
                    value: *value,
                    multiplicity: partition.iter().sum(),
                },
                partition,
                weyr,
            });
        }
        clusters.sort_by(|a, b| {
            (a.cluster.value.re, a.cluster.value.im)
                .partial_cmp(&(b.cluster.value.re, b.cluster.value.im))
                .unwrap()
        });
        Ok(JordanStructure { clusters })
    }

    pub fn total_dim(&self) -> usize {
        self.clusters.iter().map(|c| c.cluster.multiplicity).sum()
    }

    /// One Jordan block per eigenvalue.
    pub fn is_cyclic(&self) -> bool {
        self.clusters.iter().all(|c| c.partition.len() == 1)
    }

    /// The structure restricted to a single cluster.
    pub fn restrict(&self, idx: usize) -> JordanStructure {
        JordanStructure {
            clusters: vec![self.clusters[idx].clone()],
        }
    }

    /// Direct sum of Jordan blocks realizing this structure.
    pub fn model_matrix(&self) -> ComplexMatrix {
        let n = self.total_dim();
        let mut m = ComplexMatrix::zeros(n);
        let mut offset = 0;
        for c in &self.clusters {
            for &size in &c.partition {
                for i in 0..size {
                    m[(offset + i, offset + i)] = c.cluster.value;
                    if i + 1 < size {
                        m[(offset + i, offset + i + 1)] = Complex64::new(1.0, 0.0);
                    }
                }
                offset += size;
            }
        }
        m
    }

    /// Same eigenvalues (paired within `tol`), same partitions. Pairing is
    /// by nearest centroid rather than sort order, which sorting ties would
    /// make fragile.
    pub fn matches(&self, other: &JordanStructure, tol: f64) -> bool {
        if self.clusters.len() != other.clusters.len() {
            return false;
        }
        let mut used = vec![false; other.clusters.len()];
        for a in &self.clusters {
            let hit = other.clusters.iter().enumerate().position(|(i, b)| {
                !used[i]
                    && (a.cluster.value - b.cluster.value).norm() <= tol
                    && a.cluster.multiplicity == b.cluster.multiplicity
                    && a.partition == b.partition
            });
            match hit {
                Some(i) => used[i] = true,
                None => return false,
            }
        }
        true
    }
}

/// Minimal numbers of generators: `values[l-1]` is the least number of
/// vectors whose combined Krylov spans reach dimension `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DSequence {
    values: Vec<usize>,
}

impl DSequence {
    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `d_l`, 1-based; `d_0 = 0` by convention.
    pub fn at(&self, l: usize) -> usize {
        if l == 0 {
            0
        } else {
            self.values[l - 1]
        }
    }
}

use crate::poly::linkage_components;

/// Single-linkage clustering at distance `delta` with multiplicity-weighted
/// centroids. Clusterings at `delta` and `2 delta` must agree, otherwise the
/// grouping is ambiguous and the caller must adjust `delta`.
pub fn cluster_eigenvalues(roots: &[Complex64], delta: f64) -> Result<Vec<EigenCluster>> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    if roots.is_empty() {
        return Ok(Vec::new());
    }
    let tight = linkage_components(roots, delta);
    let loose = linkage_components(roots, 2.0 * delta);
    if tight != loose {
        return Err(Error::AmbiguousClustering);
    }
    let mut clusters: Vec<EigenCluster> = tight
        .iter()
        .map(|group| {
            let sum: Complex64 = group.iter().map(|&i| roots[i]).sum();
            EigenCluster {
                value: sum / (group.len() as f64),
                multiplicity: group.len(),
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .unwrap()
    });
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            if (clusters[i].value - clusters[j].value).norm() <= delta {
                return Err(Error::AmbiguousClustering);
            }
        }
    }
    Ok(clusters)
}

/// Weyr characteristic at `lambda`: nullity increments of powers of
/// `A - lambda I`, stopping at the first zero increment.
pub fn weyr(a: &ComplexMatrix, lambda: Complex64, tau: f64) -> Result<Vec<usize>> {
    weyr_capped(a, lambda, tau, None)
}

/// Weyr chain with an optional cap on the total nullity.
///
/// The shifted matrix is normalized to unit largest singular value once and
/// its powers are ranked against the absolute threshold `tau`. Ranking each
/// power against its own largest singular value would misread powers that
/// have decayed to pure rounding noise (exactly the nilpotent directions the
/// chain is after) as full rank.
///
/// When the algebraic multiplicity is known, passing it as `cap` stops the
/// chain as soon as the nullity covers it: later powers may compress a
/// well-conditioned complementary eigenspace below `tau` and would overcount.
pub(crate) fn weyr_capped(
    a: &ComplexMatrix,
    lambda: Complex64,
    tau: f64,
    cap: Option<usize>,
) -> Result<Vec<usize>> {
    let n = a.dim();
    let shifted = a.shift(lambda);
    let smax = shifted.singular_values().first().copied().unwrap_or(0.0);
    // A shift at or below the noise floor of A itself is the zero matrix at
    // this tolerance: the eigenvalue is scalar on its whole block.
    let noise_floor = tau * a.norm_inf().max(lambda.norm()).max(f64::MIN_POSITIVE);
    if smax <= noise_floor {
        return Ok(vec![n]);
    }
    let unit = shifted.scale(Complex64::new(1.0 / smax, 0.0));
    let limit = cap.unwrap_or(n);
    let mut w = Vec::new();
    let mut power = ComplexMatrix::identity(n);
    let mut prev_nullity = 0usize;
    for _ in 1..=limit.min(n) {
        power = power.mul(&unit).expect("dims equal");
        let nullity = n - power.rank_abs(tau);
        if nullity < prev_nullity {
            return Err(Error::InconsistentRanks);
        }
        let inc = nullity - prev_nullity;
        if inc == 0 {
            break;
        }
        if let Some(&last) = w.last() {
            if inc > last {
                return Err(Error::InconsistentRanks);
            }
        }
        w.push(inc);
        prev_nullity = nullity;
        if prev_nullity >= limit {
            break;
        }
    }
    Ok(w)
}

/// Conjugate partition (transpose of the Young diagram).
pub fn conjugate_partition(p: &[usize]) -> Vec<usize> {
    let max = p.iter().copied().max().unwrap_or(0);
    (1..=max)
        .map(|i| p.iter().filter(|&&x| x >= i).count())
        .collect()
}

/// Jordan block sizes at `lambda`, descending: the conjugate of the Weyr
/// characteristic.
pub fn jordan_partition(a: &ComplexMatrix, lambda: Complex64, tau: f64) -> Result<Vec<usize>> {
    Ok(conjugate_partition(&weyr(a, lambda, tau)?))
}

/// Full Jordan structure at the configured thresholds.
pub fn jordan_structure(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<JordanStructure> {
    let refined = crate::poly::refined_roots(&char_poly(a))?;
    let clusters = cluster_eigenvalues(&refined, cfg.cluster_tol)?;
    let mut out = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let w = weyr_capped(a, cluster.value, cfg.rank_tol, Some(cluster.multiplicity))?;
        let covered: usize = w.iter().sum();
        if covered != cluster.multiplicity {
            return Err(Error::InconsistentRanks);
        }
        let partition = conjugate_partition(&w);
        out.push(ClusterStructure {
            cluster,
            partition,
            weyr: w,
        });
    }
    Ok(JordanStructure { clusters: out })
}

/// True when every eigenvalue carries a single Jordan block.
pub fn is_cyclic(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<bool> {
    Ok(jordan_structure(a, cfg)?.is_cyclic())
}

/// Minimal generator counts from the block data: with d vectors, the
/// reachable dimension is the sum over eigenvalues of their d largest block
/// sizes, so `d_l` is the least d whose reachable dimension covers `l`.
pub fn d_sequence(structure: &JordanStructure) -> DSequence {
    let n = structure.total_dim();
    let max_len = structure
        .clusters
        .iter()
        .map(|c| c.partition.len())
        .max()
        .unwrap_or(0);
    let mut reach = vec![0usize; max_len + 1];
    for (d, slot) in reach.iter_mut().enumerate().skip(1) {
        *slot = structure
            .clusters
            .iter()
            .map(|c| c.partition.iter().take(d).sum::<usize>())
            .sum();
    }
    let values = (1..=n)
        .map(|l| (1..=max_len).find(|&d| reach[d] >= l).expect("reach covers n"))
        .collect();
    DSequence { values }
}

/// Default number of randomized draws for [`d_oracle`].
pub const D_ORACLE_DEFAULT_TRIALS: usize = 32;

/// Randomized verification of `d_l`: the least d such that some draw of d
/// random vectors has combined Krylov span of dimension at least `l`.
/// Exponents cap at `n - 1`; higher powers are redundant.
pub fn d_oracle(b: &ComplexMatrix, l: usize, trials: usize, seed: u64) -> Result<usize> {
    let n = b.dim();
    if l == 0 || l > n {
        return Err(Error::InvalidArgument(format!(
            "l must lie in 1..={n}, got {l}"
        )));
    }
    let mut powers = vec![ComplexMatrix::identity(n)];
    for k in 1..n {
        powers.push(powers[k - 1].mul(b).expect("dims equal"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = trials.max(1);
    for d in 1..=n {
        for _ in 0..trials {
            let vectors: Vec<Vec<Complex64>> = (0..d)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                        })
                        .collect()
                })
                .collect();
            // Row-major n x (d*n) span matrix of all B^k x_i.
            let cols = d * n;
            let mut data = vec![Complex64::new(0.0, 0.0); n * cols];
            for (i, x) in vectors.iter().enumerate() {
                for (k, pw) in powers.iter().enumerate() {
                    let img = pw.mul_vec(x);
                    for row in 0..n {
                        data[row * cols + (i * n + k)] = img[row];
                    }
                }
            }
            if rank_of_columns(n, cols, &data, 1e-8) >= l {
                return Ok(d);
            }
        }
    }
    Ok(n)
}
