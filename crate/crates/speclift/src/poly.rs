//! Monic polynomials, the characteristic polynomial, and a simultaneous
//! (Aberth-Ehrlich) root finder.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Coefficients of a monic polynomial, ascending powers, leading one stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    coeffs: Vec<Complex64>,
}

impl PolyCoeffs {
    /// Wraps ascending coefficients `c_0..c_n`; requires `c_n == 1` exactly.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument(
                "monic polynomial needs degree >= 1".into(),
            ));
        }
        let lead = coeffs.last().unwrap();
        if *lead != Complex64::new(1.0, 0.0) {
            return Err(Error::InvalidArgument(format!(
                "polynomial must be monic, leading coefficient {lead}"
            )));
        }
        if !coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PolyCoeffs { coeffs })
    }

    /// Expands the monic polynomial with the given root multiset.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &ci) in coeffs.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            coeffs = next;
        }
        PolyCoeffs { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Value and derivative via a fused Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Largest coefficient magnitude.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Characteristic polynomial `det(lambda I - A)` by the Faddeev-LeVerrier
/// trace recurrence; exact rational weights keep the backward error auditable
/// at small dimensions.
pub fn char_poly(a: &ComplexMatrix) -> PolyCoeffs {
    let n = a.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut m = ComplexMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut am = a.mul(&m).expect("dims equal");
        let shift = coeffs[n - k + 1];
        for i in 0..n {
            am[(i, i)] += shift;
        }
        m = am;
        let t = a.mul(&m).expect("dims equal").trace();
        coeffs[n - k] = -t / (k as f64);
    }
    PolyCoeffs { coeffs }
}

/// All roots with multiplicity via Aberth-Ehrlich simultaneous iteration.
///
/// Exact zero constant terms are deflated first, so zero roots come back
/// exact. The convergence contract is backward error: every returned root z
/// satisfies `|p(z)| <= 1e-10 * coeff_scale * max(1,|z|)^deg` on the deflated
/// polynomial.
pub fn poly_roots(p: &PolyCoeffs) -> Result<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut coeffs = p.coeffs.clone();
    let mut roots = Vec::with_capacity(p.degree());

    // Deflate exact zero roots.
    while coeffs.len() > 1 && coeffs[0] == zero {
        roots.push(zero);
        coeffs.remove(0);
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(roots);
    }
    let deflated = PolyCoeffs { coeffs };

    // Initial guesses on a circle at the Cauchy bound, angles offset so no
    // guess starts on a symmetry axis.
    let radius = 1.0
        + deflated.coeffs[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (deg as f64) + 0.45;
            Complex64::new(radius * theta.cos(), radius * theta.sin())
        })
        .collect();

    let scale = deflated.coeff_scale();
    let max_iter = 400;
    for _ in 0..max_iter {
        let mut max_step = 0.0f64;
        for k in 0..deg {
            let (pv, dv) = deflated.eval_with_derivative(z[k]);
            if pv == zero {
                continue;
            }
            let w = if dv == zero {
                // Nudge off a critical point.
                Complex64::new(1e-8 * (1.0 + z[k].norm()), 1e-8)
            } else {
                pv / dv
            };
            let mut sum = zero;
            for j in 0..deg {
                if j != k {
                    let d = z[k] - z[j];
                    if d == zero {
                        continue;
                    }
                    sum += Complex64::new(1.0, 0.0) / d;
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * sum;
            let step = if denom == zero { w } else { w / denom };
            z[k] -= step;
            let rel = step.norm() / (1.0 + z[k].norm());
            if rel > max_step {
                max_step = rel;
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }

    let backward_ok = z.iter().all(|&r| {
        let bound = 1e-10 * scale * (1.0f64.max(r.norm())).powi(deg as i32);
        deflated.eval(r).norm() <= bound
    });
    if !backward_ok {
        return Err(Error::NonConvergence {
            what: "polynomial root iteration",
        });
    }
    roots.extend(z);
    Ok(roots)
}

/// Modulus of the largest eigenvalue, measured on refined roots so that
/// multiple eigenvalues near the unit circle are located sharply.
pub fn spectral_radius(a: &ComplexMatrix) -> Result<f64> {
    let roots = refined_roots(&char_poly(a))?;
    Ok(roots.iter().map(|r| r.norm()).fold(0.0, f64::max))
}

/// Connected components of the distance-at-most-`delta` graph, i.e. single
/// linkage. Groups come back sorted by least member index.
pub(crate) fn linkage_components(points: &[Complex64], delta: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut seen = vec![false; n];
    let mut groups = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut group = Vec::new();
        seen[start] = true;
        while let Some(i) = stack.pop() {
            group.push(i);
            for j in 0..n {
                if !seen[j] && (points[i] - points[j]).norm() <= delta {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        group.sort_unstable();
        groups.push(group);
    }
    groups
}

fn coeff_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    (1..coeffs.len()).map(|i| coeffs[i] * (i as f64)).collect()
}

fn eval_coeffs(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn eval_coeffs_wd(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Value of the polynomial with coefficients replaced by their moduli.
fn abs_scale(coeffs: &[Complex64], r: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * r + c.norm();
    }
    acc.max(f64::MIN_POSITIVE)
}

/// Relative residual below which `z` counts as a numerical root of the
/// polynomial and of its first `m - 1` derivatives.
const MULTIPLE_ROOT_RESIDUAL: f64 = 1e-7;

/// Roots with numerically multiple roots collapsed onto machine-accurate
/// copies.
pub fn refined_roots(p: &PolyCoeffs) -> Result<Vec<Complex64>> {
    let raw = poly_roots(p)?;
    Ok(refine_roots(p, &raw))
}

/// Collapses numerically multiple roots onto machine-accurate copies.
///
/// A root of multiplicity m computed from expanded coefficients is only
/// accurate to about `eps^(1/m)`, far too blurred for clustering at the
/// default tolerance. A multiplicity-m root is however a simple root of the
/// (m-1)-st derivative, where Newton recovers it to near machine precision.
/// Groups are formed coarsely, each multiplicity hypothesis is validated
/// against the derivative magnitudes, and failed groups are split at their
/// largest internal gap and retried.
pub(crate) fn refine_roots(p: &PolyCoeffs, raw: &[Complex64]) -> Vec<Complex64> {
    let deg = p.degree();
    if deg <= 1 {
        return raw.to_vec();
    }
    let mut derivs: Vec<Vec<Complex64>> = vec![p.coeffs().to_vec()];
    for k in 1..deg {
        let next = coeff_derivative(&derivs[k - 1]);
        derivs.push(next);
    }
    let rmax = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let theta = 0.025 * rmax.max(1.0);
    let mut out = Vec::with_capacity(raw.len());
    for group in linkage_components(raw, theta) {
        let pts: Vec<Complex64> = group.iter().map(|&i| raw[i]).collect();
        refine_group(&derivs, &pts, &mut out);
    }
    out
}

fn refine_group(derivs: &[Vec<Complex64>], pts: &[Complex64], out: &mut Vec<Complex64>) {
    let m = pts.len();
    if m == 1 {
        out.push(pts[0]);
        return;
    }
    let centroid = pts.iter().sum::<Complex64>() / (m as f64);
    let diameter = pts
        .iter()
        .flat_map(|a| pts.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);

    if m <= derivs.len() {
        if let Some(z) = newton_refine(&derivs[m - 1], centroid) {
            let local = (z - centroid).norm() <= diameter + 0.01 * z.norm().max(1.0);
            let validated = local
                && (0..m).all(|k| {
                    let val = eval_coeffs(&derivs[k], z).norm();
                    val <= MULTIPLE_ROOT_RESIDUAL * abs_scale(&derivs[k], z.norm().max(1.0))
                });
            if validated {
                out.extend(std::iter::repeat_n(z, m));
                return;
            }
        }
    }

    // Hypothesis rejected: split at the largest single-linkage gap.
    match split_at_largest_gap(pts) {
        Some((a, b)) => {
            refine_group(derivs, &a, out);
            refine_group(derivs, &b, out);
        }
        None => out.extend_from_slice(pts),
    }
}

fn newton_refine(coeffs: &[Complex64], start: Complex64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..80 {
        let (v, d) = eval_coeffs_wd(coeffs, z);
        if d.norm() == 0.0 {
            return None;
        }
        let step = v / d;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    Some(z)
}

/// Splits points into the two sides of the largest minimum-spanning-tree
/// edge; `None` when all points coincide.
fn split_at_largest_gap(pts: &[Complex64]) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
    let n = pts.len();
    let mut in_tree = vec![false; n];
    let mut dist = vec![f64::MAX; n];
    let mut parent = vec![usize::MAX; n];
    in_tree[0] = true;
    for j in 1..n {
        dist[j] = (pts[j] - pts[0]).norm();
        parent[j] = 0;
    }
    let mut edges = Vec::new();
    for _ in 1..n {
        let next = (0..n)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| dist[a].partial_cmp(&dist[b]).unwrap())?;
        in_tree[next] = true;
        edges.push((parent[next], next, dist[next]));
        for j in 0..n {
            if !in_tree[j] {
                let d = (pts[j] - pts[next]).norm();
                if d < dist[j] {
                    dist[j] = d;
                    parent[j] = next;
                }
            }
        }
    }
    let (cut_a, cut_b, w) = *edges
        .iter()
        .max_by(|x, y| x.2.partial_cmp(&y.2).unwrap())?;
    if w == 0.0 {
        return None;
    }
    // Components of the MST with the heaviest edge removed.
    let mut adj = vec![Vec::new(); n];
    for &(a, b, _) in &edges {
        if (a, b) != (cut_a, cut_b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut side = vec![false; n];
    let mut stack = vec![cut_a];
    let mut seen = vec![false; n];
    seen[cut_a] = true;
    while let Some(i) = stack.pop() {
        side[i] = true;
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    let a: Vec<Complex64> = (0..n).filter(|&i| side[i]).map(|i| pts[i]).collect();
    let b: Vec<Complex64> = (0..n).filter(|&i| !side[i]).map(|i| pts[i]).collect();
    Some((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
        let d = |xs: &[Complex64], ys: &[Complex64]| {
            xs.iter()
                .map(|x| ys.iter().map(|y| (x - y).norm()).fold(f64::MAX, f64::min))
                .fold(0.0, f64::max)
        };
        d(a, b).max(d(b, a))
    }

    #[test]
    fn char_poly_diag() {
        let a = ComplexMatrix::diagonal(&[c(0.5, 0.0), c(0.25, 0.0)]);
        let p = char_poly(&a);
        // lambda^2 - 0.75 lambda + 0.125
        assert_relative_eq!(p.coeffs()[0].re, 0.125, max_relative = 1e-14);
        assert_relative_eq!(p.coeffs()[1].re, -0.75, max_relative = 1e-14);
        assert_relative_eq!(p.coeffs()[2].re, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn char_poly_nilpotent() {
        let a = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let p = char_poly(&a);
        assert!(p.coeffs()[0].norm() == 0.0);
        assert!(p.coeffs()[1].norm() == 0.0);
    }

    #[test]
    fn char_poly_matches_roots_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let data = (0..16)
                .map(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
                .collect();
            let a = ComplexMatrix::new(4, data).unwrap();
            let p = char_poly(&a);
            let roots = poly_roots(&p).unwrap();
            let rebuilt = PolyCoeffs::from_roots(&roots);
            for (x, y) in p.coeffs().iter().zip(rebuilt.coeffs()) {
                assert!((x - y).norm() <= 1e-9 * (1.0 + p.coeff_scale()));
            }
        }
    }

    #[test]
    fn roots_of_constructed_quadratic() {
        let p = PolyCoeffs::from_roots(&[c(0.5, 0.0), c(0.25, 0.0)]);
        let mut roots = poly_roots(&p).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - c(0.25, 0.0)).norm() < 1e-12);
        assert!((roots[1] - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_roots_deflated_exactly() {
        let p = PolyCoeffs::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.norm() == 0.0));
    }

    #[test]
    fn wilkinson_style_small_roots() {
        let wanted: Vec<Complex64> = (1..=5).map(|k| c(0.1 * k as f64, 0.0)).collect();
        let p = PolyCoeffs::from_roots(&wanted);
        let roots = poly_roots(&p).unwrap();
        assert!(hausdorff(&roots, &wanted) < 1e-8);
    }

    #[test]
    fn random_roots_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let deg = rng.gen_range(2..=8);
            // Separated roots in the disc of radius 2.
            let mut wanted: Vec<Complex64> = Vec::new();
            while wanted.len() < deg {
                let cand = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                if wanted.iter().all(|w| (w - cand).norm() > 1e-2) {
                    wanted.push(cand);
                }
            }
            let p = PolyCoeffs::from_roots(&wanted);
            let roots = poly_roots(&p).unwrap();
            assert!(
                hausdorff(&roots, &wanted) < 1e-8,
                "deg {deg}: hausdorff {}",
                hausdorff(&roots, &wanted)
            );
        }
    }

    #[test]
    fn spectral_radius_examples() {
        let nil = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(spectral_radius(&nil).unwrap() < 1e-12);
        let d = ComplexMatrix::diagonal(&[c(0.5, 0.0), c(-0.9, 0.0)]);
        assert_relative_eq!(spectral_radius(&d).unwrap(), 0.9, max_relative = 1e-12);
        let a = ComplexMatrix::from_real(2, &[0.0, 4.0, 0.01, 0.0]).unwrap();
        assert_relative_eq!(spectral_radius(&a).unwrap(), 0.2, max_relative = 1e-10);
    }

    #[test]
    fn rejects_non_monic() {
        assert!(PolyCoeffs::new(vec![c(1.0, 0.0), c(2.0, 0.0)]).is_err());
    }

    #[test]
    fn refine_collapses_multiple_roots() {
        // (x - 0.3)^4 (x + 0.5): the quadruple root blurs to ~1e-4 raw.
        let mut all = vec![c(0.3, 0.0); 4];
        all.push(c(-0.5, 0.0));
        let p = PolyCoeffs::from_roots(&all);
        let refined = refined_roots(&p).unwrap();
        let near: Vec<&Complex64> = refined
            .iter()
            .filter(|z| (*z - c(0.3, 0.0)).norm() < 1e-2)
            .collect();
        assert_eq!(near.len(), 4);
        for z in near {
            assert!((z - c(0.3, 0.0)).norm() < 1e-10, "z = {z}");
        }
    }

    #[test]
    fn refine_keeps_close_simple_roots_apart() {
        let wanted = [c(0.30, 0.0), c(0.36, 0.0), c(-0.5, 0.0)];
        let p = PolyCoeffs::from_roots(&wanted);
        let refined = refined_roots(&p).unwrap();
        let mut rs: Vec<f64> = refined.iter().map(|z| z.re).collect();
        rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((rs[1] - 0.30).abs() < 1e-8);
        assert!((rs[2] - 0.36).abs() < 1e-8);
    }

    #[test]
    fn refine_handles_exact_zero_cluster() {
        let p = PolyCoeffs::new(vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ])
        .unwrap();
        let refined = refined_roots(&p).unwrap();
        assert_eq!(refined.len(), 3);
        assert!(refined.iter().all(|z| z.norm() == 0.0));
    }
}
