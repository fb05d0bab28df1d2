//! Constructive liftings: the conjugation spray and its derivative,
//! similarity transforms, companion-based local and global liftings in the
//! cyclic case, shear factorizations of conjugators, and the verification
//! report for a candidate lifting.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ToleranceConfig;
use crate::criterion::disc_samples;
use crate::error::{Error, Result};
use crate::instance::LiftInstance;
use crate::jet::Jet;
use crate::jordan::{is_cyclic, jordan_structure};
use crate::matfun::{mat_exp, mat_log};
use crate::matrix::{commutator, ComplexMatrix};
use crate::projection::{companion, in_spectral_ball, project, SymPoint};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Fiberwise dominating family over each projection fiber:
/// `(B, A) -> exp(B) A exp(-B)`.
pub fn spray(b: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if b.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let eb = mat_exp(b);
    let ebi = mat_exp(&b.scale(-one()));
    eb.mul(a)?.mul(&ebi)
}

/// Derivative of `t -> spray(tC, A)` at `t = 0`, which is the commutator
/// `[C, A] = CA - AC`. (Written with the slot order of the spray display,
/// the same tangent map reads `[A, C]`; this function fixes the
/// finite-difference convention and the tests pin it.)
pub fn spray_derivative(a: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    commutator(c, a)
}

fn vec_col_major(m: &ComplexMatrix) -> Vec<Complex64> {
    let n = m.dim();
    let mut v = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            v.push(m[(i, j)]);
        }
    }
    v
}

fn unvec_col_major(n: usize, v: &[Complex64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] = v[j * n + i];
        }
    }
    m
}

/// Relative smallest-singular-value floor below which an intertwiner
/// candidate does not count as invertible.
const INVERTIBLE_FLOOR: f64 = 1e-8;

/// Invertible `T` with `T B T^{-1} = C`, found from the nullspace of the
/// intertwining system `X B - C X = 0`.
///
/// The first candidate is the orthogonal projection of the identity onto the
/// solution space (so `B = C` yields the identity and nearby problems yield
/// well-conditioned transforms); random combinations follow, at most 64
/// draws, and the best-conditioned verified candidate wins.
pub fn similarity_transform(
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<ComplexMatrix> {
    let n = b.dim();
    if c.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.dim(),
        });
    }
    let sb = jordan_structure(b, cfg)?;
    let sc = jordan_structure(c, cfg)?;
    if !sb.matches(&sc, cfg.cluster_tol) {
        return Err(Error::NotSimilar);
    }

    // vec(XB) = (B^T kron I) vec(X), vec(CX) = (I kron C) vec(X),
    // column-major vec.
    let ident = ComplexMatrix::identity(n);
    let system = b.transpose().kron(&ident).sub(&ident.kron(c))?;
    let basis = system.nullspace(cfg.rank_tol);
    if basis.is_empty() {
        return Err(Error::NotSimilar);
    }

    let invertible = |x: &ComplexMatrix| {
        let sv = x.singular_values();
        let smax = sv.first().copied().unwrap_or(0.0);
        let smin = sv.last().copied().unwrap_or(0.0);
        smax > 0.0 && smin > INVERTIBLE_FLOOR * smax
    };

    let mut candidates: Vec<ComplexMatrix> = Vec::new();
    let e = vec_col_major(&ComplexMatrix::identity(n));
    let mut proj = vec![Complex64::new(0.0, 0.0); n * n];
    for bv in &basis {
        let inner: Complex64 = bv.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
        for (p, x) in proj.iter_mut().zip(bv) {
            *p += inner * x;
        }
    }
    let proj_m = unvec_col_major(n, &proj);
    if invertible(&proj_m) {
        candidates.push(proj_m);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        if candidates.len() >= 8 {
            break;
        }
        let mut combo = vec![Complex64::new(0.0, 0.0); n * n];
        for bv in &basis {
            let theta = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for (target, x) in combo.iter_mut().zip(bv) {
                *target += theta * x;
            }
        }
        let cand = unvec_col_major(n, &combo);
        if invertible(&cand) {
            candidates.push(cand);
        }
    }
    if candidates.is_empty() {
        return Err(Error::NoInvertibleSolution);
    }

    let scale = c.norm_inf().max(1.0);
    let mut best: Option<(f64, ComplexMatrix)> = None;
    for x in candidates {
        let xinv = match x.inverse() {
            Ok(v) => v,
            Err(_) => continue,
        };
        let residual = x.mul(b)?.mul(&xinv)?.sub(c)?.norm_inf();
        if residual > 1e-8 * scale {
            continue;
        }
        let cond = x.cond_2().unwrap_or(f64::MAX);
        if best.as_ref().is_none_or(|(bc, _)| cond < *bc) {
            best = Some((cond, x));
        }
    }
    best.map(|(_, x)| x).ok_or(Error::NoInvertibleSolution)
}

/// Entrywise barycentric Lagrange interpolant for matrix values.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixInterpolant {
    nodes: Vec<Complex64>,
    weights: Vec<Complex64>,
    values: Vec<ComplexMatrix>,
}

impl MatrixInterpolant {
    pub fn new(nodes: Vec<Complex64>, values: Vec<ComplexMatrix>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(Error::InvalidArgument(
                "interpolant needs matching nodes and values".into(),
            ));
        }
        let mut weights = Vec::with_capacity(nodes.len());
        for j in 0..nodes.len() {
            let mut denom = one();
            for k in 0..nodes.len() {
                if k != j {
                    let d = nodes[j] - nodes[k];
                    if d == Complex64::new(0.0, 0.0) {
                        return Err(Error::NodeCollision { first: k, second: j });
                    }
                    denom *= d;
                }
            }
            weights.push(one() / denom);
        }
        Ok(MatrixInterpolant {
            nodes,
            weights,
            values,
        })
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn values(&self) -> &[ComplexMatrix] {
        &self.values
    }

    pub fn eval(&self, v: Complex64) -> ComplexMatrix {
        let n = self.values[0].dim();
        for (j, &a) in self.nodes.iter().enumerate() {
            if (v - a).norm() <= 1e-14 * (1.0 + v.norm()) {
                return self.values[j].clone();
            }
        }
        let mut num = ComplexMatrix::zeros(n);
        let mut den = Complex64::new(0.0, 0.0);
        for j in 0..self.nodes.len() {
            let w = self.weights[j] / (v - self.nodes[j]);
            num = num.add(&self.values[j].scale(w)).expect("dims equal");
            den += w;
        }
        num.scale(one() / den)
    }
}

/// The conjugating family of a companion-based lifting.
#[derive(Debug, Clone, PartialEq)]
pub enum Conjugator {
    /// Constant invertible conjugation.
    Constant {
        s: ComplexMatrix,
        s_inv: ComplexMatrix,
    },
    /// `exp(G(v))` with `G` an entrywise interpolation polynomial.
    ExpInterpolant(MatrixInterpolant),
}

impl Conjugator {
    pub fn constant(s: ComplexMatrix) -> Result<Self> {
        let s_inv = s.inverse()?;
        Ok(Conjugator::Constant { s, s_inv })
    }

    fn pair_at(&self, v: Complex64) -> (ComplexMatrix, ComplexMatrix) {
        match self {
            Conjugator::Constant { s, s_inv } => (s.clone(), s_inv.clone()),
            Conjugator::ExpInterpolant(interp) => {
                let g = interp.eval(v);
                (mat_exp(&g), mat_exp(&g.scale(-one())))
            }
        }
    }
}

/// Structured holomorphic matrix map.
#[derive(Debug, Clone, PartialEq)]
pub enum HoloMatrixMap {
    /// Matrix of polynomial entries (row-major coefficient vectors,
    /// ascending powers).
    Polynomial {
        n: usize,
        entries: Vec<Vec<Complex64>>,
    },
    /// `v -> P(v) companion(f(v)) P(v)^{-1}`: the projection of the value is
    /// `f(v)` identically by construction.
    ConjugatedCompanion {
        f: Vec<Vec<Complex64>>,
        conjugator: Conjugator,
    },
}

impl HoloMatrixMap {
    pub fn dim(&self) -> usize {
        match self {
            HoloMatrixMap::Polynomial { n, .. } => *n,
            HoloMatrixMap::ConjugatedCompanion { f, .. } => f.len(),
        }
    }

    pub fn eval(&self, v: Complex64) -> ComplexMatrix {
        match self {
            HoloMatrixMap::Polynomial { n, entries } => {
                let mut m = ComplexMatrix::zeros(*n);
                for i in 0..*n {
                    for j in 0..*n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for &c in entries[i * n + j].iter().rev() {
                            acc = acc * v + c;
                        }
                        m[(i, j)] = acc;
                    }
                }
                m
            }
            HoloMatrixMap::ConjugatedCompanion { f, conjugator } => {
                let y: Vec<Complex64> = f
                    .iter()
                    .map(|comp| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for &c in comp.iter().rev() {
                            acc = acc * v + c;
                        }
                        acc
                    })
                    .collect();
                let cm = companion(&SymPoint::new(y).expect("n >= 1"));
                let (p, p_inv) = conjugator.pair_at(v);
                p.mul(&cm).expect("dims").mul(&p_inv).expect("dims")
            }
        }
    }
}

/// Local lifting through a cyclic target: conjugated companion with a
/// constant conjugator, no logarithm needed.
pub fn local_cyclic_lift(
    target: &ComplexMatrix,
    fjets: &[Jet],
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<HoloMatrixMap> {
    let n = target.dim();
    if fjets.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} jets, got {}",
            fjets.len()
        )));
    }
    let base = fjets[0].base();
    if fjets.iter().any(|j| j.base() != base) {
        return Err(Error::BaseMismatch);
    }
    if !is_cyclic(target, cfg)? {
        return Err(Error::NotCyclic { index: None });
    }
    let y = project(target);
    let residual = fjets
        .iter()
        .zip(y.components())
        .map(|(jet, &c)| (jet.constant_term() - c).norm())
        .fold(0.0, f64::max);
    if residual > cfg.verify_tol {
        return Err(Error::InvalidArgument(format!(
            "jet constants differ from the target projection by {residual:.3e}"
        )));
    }
    let cm = companion(&y);
    let s = similarity_transform(&cm, target, cfg, seed)?;
    let f = fjets.iter().map(|jet| jet.to_global_coeffs()).collect();
    Ok(HoloMatrixMap::ConjugatedCompanion {
        f,
        conjugator: Conjugator::constant(s)?,
    })
}

/// A constructed lifting plus conditioning warnings.
#[derive(Debug, Clone)]
pub struct LiftResult {
    pub map: HoloMatrixMap,
    pub warnings: Vec<String>,
}

fn nth_root(z: Complex64, n: usize) -> Complex64 {
    Complex64::from_polar(z.norm().powf(1.0 / n as f64), z.arg() / n as f64)
}

/// Global lifting when every target is cyclic: per node, a similarity from
/// the companion model, its determinant-normalized logarithm, and an
/// entrywise interpolated conjugator exponent.
///
/// Scalars act trivially by conjugation, so the determinant normalization
/// changes nothing downstream while keeping the logarithms small.
pub fn global_cyclic_lift(
    instance: &LiftInstance,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<LiftResult> {
    instance.validate_membership()?;
    instance.validate_consistency(cfg)?;
    let n = instance.dim();
    let mut warnings = Vec::new();
    let nodes = instance.nodes();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let sep = (nodes[i] - nodes[j]).norm();
            if sep < 1e-3 {
                warnings.push(format!(
                    "nodes {i} and {j} are separated by {sep:.3e}; interpolation may be ill-conditioned"
                ));
            }
        }
    }

    let mut logs = Vec::with_capacity(nodes.len());
    for (j, target) in instance.matrices().iter().enumerate() {
        if !is_cyclic(target, cfg)? {
            return Err(Error::NotCyclic { index: Some(j) });
        }
        let y = instance.eval_map(nodes[j]);
        let cm = companion(&y);
        let t = similarity_transform(&cm, target, cfg, seed.wrapping_add(j as u64))?;
        let mu = nth_root(t.det(), n);
        let normalized = t.scale(one() / mu);
        logs.push(mat_log(&normalized, cfg)?);
    }
    let interp = MatrixInterpolant::new(nodes.to_vec(), logs)?;
    Ok(LiftResult {
        map: HoloMatrixMap::ConjugatedCompanion {
            f: instance.map_coeffs().to_vec(),
            conjugator: Conjugator::ExpInterpolant(interp),
        },
        warnings,
    })
}

/// Finite conjugation path by exponentials of nilpotent shears, with a
/// scalar normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct LinePath {
    /// n-th root of the determinant of the factored transform.
    pub mu: Complex64,
    factors: Vec<ComplexMatrix>,
}

impl LinePath {
    pub fn empty() -> Self {
        LinePath {
            mu: one(),
            factors: Vec::new(),
        }
    }

    /// Shears `N_1..N_s`; the represented conjugator is
    /// `exp(N_s) ... exp(N_1)`.
    pub fn factors(&self) -> &[ComplexMatrix] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    fn product_at(&self, n: usize, ts: &[f64], sign: f64) -> ComplexMatrix {
        let mut p = ComplexMatrix::identity(n);
        for (i, factor) in self.factors.iter().enumerate() {
            let t = Complex64::new(sign * ts[i], 0.0);
            let e = mat_exp(&factor.scale(t));
            p = if sign > 0.0 {
                e.mul(&p).expect("dims")
            } else {
                p.mul(&e).expect("dims")
            };
        }
        p
    }

    /// `exp(N_s) ... exp(N_1)`.
    pub fn conjugator(&self, n: usize) -> ComplexMatrix {
        self.product_at(n, &vec![1.0; self.factors.len()], 1.0)
    }

    /// Conjugation of `b` at path parameters `ts` in `[0,1]^s`:
    /// `exp(t_s N_s) ... exp(t_1 N_1) b exp(-t_1 N_1) ... exp(-t_s N_s)`.
    pub fn conjugate_at(&self, b: &ComplexMatrix, ts: &[f64]) -> Result<ComplexMatrix> {
        if ts.len() != self.factors.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} path parameters, got {}",
                self.factors.len(),
                ts.len()
            )));
        }
        let n = b.dim();
        let p = self.product_at(n, ts, 1.0);
        let p_inv = self.product_at(n, ts, -1.0);
        p.mul(b)?.mul(&p_inv)
    }

    /// Endpoint of the path applied to `b`.
    pub fn endpoint(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.conjugate_at(b, &vec![1.0; self.factors.len()])
    }
}

/// Factors `T / mu` into exponentials of single-entry nilpotent shears via
/// Gaussian elimination by row additions, `mu` an n-th root of `det T`.
/// The shear count is bounded by `n^2 + n`.
pub fn transvection_factorization(t: &ComplexMatrix) -> Result<LinePath> {
    let n = t.dim();
    let det = t.det();
    if det.norm() == 0.0 {
        return Err(Error::Singular);
    }
    let mu = nth_root(det, n);
    let mut a = t.scale(one() / mu);
    let scale0 = a.norm_inf().max(1.0);

    // Row operations row_i += c * row_j, recorded in application order.
    let mut shears: Vec<(usize, usize, Complex64)> = Vec::new();
    let mut apply = |a: &mut ComplexMatrix, i: usize, j: usize, c: Complex64| {
        if c.norm() <= 1e-14 {
            return;
        }
        for col in 0..n {
            let add = c * a[(j, col)];
            a[(i, col)] += add;
        }
        shears.push((i, j, c));
    };

    for k in 0..n.saturating_sub(1) {
        let pivot = a[(k, k)];
        if (pivot - one()).norm() > 1e-14 {
            // Source row below k with the largest column entry.
            let mut r_best = k + 1;
            let mut best = a[(k + 1, k)].norm();
            for r in (k + 2)..n {
                let v = a[(r, k)].norm();
                if v > best {
                    best = v;
                    r_best = r;
                }
            }
            if best.max(pivot.norm()) <= 1e-12 * scale0 {
                return Err(Error::Singular);
            }
            if best < 0.3 * pivot.norm() {
                // Seed the column from row k itself so the fixing shear
                // stays moderate.
                apply(&mut a, k + 1, k, one());
                r_best = k + 1;
            }
            if a[(r_best, k)].norm() == 0.0 {
                return Err(Error::Singular);
            }
            // Make the pivot exactly one.
            let fix = (one() - pivot) / a[(r_best, k)];
            apply(&mut a, k, r_best, fix);
        }
        for r in (k + 1)..n {
            let c = a[(r, k)];
            apply(&mut a, r, k, -c);
        }
    }

    // Upper triangular with unit diagonal except possibly the last entry,
    // which carries only the determinant rounding residual. Clear above.
    for j in (1..n).rev() {
        let d = a[(j, j)];
        if d.norm() <= 1e-12 {
            return Err(Error::Singular);
        }
        for i in 0..j {
            let c = a[(i, j)] / d;
            apply(&mut a, i, j, -c);
        }
    }

    // T/mu = L_1^{-1} ... L_r^{-1}; the path wants exp(N_s)...exp(N_1), so
    // N_s is the first inverse shear.
    let factors = shears
        .iter()
        .rev()
        .map(|&(i, j, c)| {
            let mut m = ComplexMatrix::zeros(n);
            m[(i, j)] = -c;
            m
        })
        .collect();
    Ok(LinePath { mu, factors })
}

/// Connects two similar matrices by a finite path of shear conjugations;
/// the scalar normalizer of the underlying transform drops out of the
/// conjugation.
pub fn connect_similar(
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<LinePath> {
    if b.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            got: c.dim(),
        });
    }
    let scale = b.norm_inf().max(c.norm_inf()).max(1.0);
    if b.sub(c)?.norm_inf() <= 1e-12 * scale {
        return Ok(LinePath::empty());
    }
    let x = similarity_transform(b, c, cfg, seed)?;
    let path = transvection_factorization(&x)?;
    let endpoint = path.endpoint(b)?;
    if endpoint.sub(c)?.norm_inf() > 1e-8 * scale {
        return Err(Error::NonConvergence {
            what: "transvection path endpoint",
        });
    }
    Ok(path)
}

/// Verification report for a candidate lifting against an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftVerification {
    /// Max over nodes of the interpolation residual.
    pub node_residual: f64,
    /// Max over samples of the projection mismatch against the map.
    pub projection_residual: f64,
    /// Smallest spectral-ball margin seen over the samples.
    pub min_margin: f64,
    pub all_inside: bool,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Checks interpolation at the nodes, the projection identity at
/// quasi-uniform disc samples, and spectral-ball membership of every sample.
pub fn verify_lift(
    map: &HoloMatrixMap,
    instance: &LiftInstance,
    samples: usize,
    tol: f64,
) -> Result<LiftVerification> {
    let mut node_residual = 0.0f64;
    for (j, a) in instance.nodes().iter().enumerate() {
        let got = map.eval(*a);
        let res = got.sub(&instance.matrices()[j])?.norm_inf();
        node_residual = node_residual.max(res);
    }

    let mut projection_residual = 0.0f64;
    let mut min_margin = f64::MAX;
    let mut all_inside = true;
    for v in disc_samples(samples.max(1), 0.97) {
        let value = map.eval(v);
        let projected = project(&value);
        let wanted = instance.eval_map(v);
        projection_residual = projection_residual.max(projected.max_abs_diff(&wanted));
        let membership = in_spectral_ball(&value)?;
        min_margin = min_margin.min(membership.margin);
        all_inside &= membership.inside;
    }

    Ok(LiftVerification {
        node_residual,
        projection_residual,
        min_margin,
        all_inside,
        samples: samples.max(1),
        tol,
        pass: node_residual <= tol && projection_residual <= tol && all_inside,
    })
}
