//! The projection of the spectral ball onto the symmetrized polydisc, its
//! companion-matrix section, and membership tests for both domains.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::jordan;
use crate::matrix::ComplexMatrix;
use crate::poly::{char_poly, refined_roots, spectral_radius, PolyCoeffs};

/// Points with `1 - rho` at or below this are classified outside, with the
/// boundary flag raised; the domains are open and downstream constructions
/// need strict interiority.
pub const BOUNDARY_EPS: f64 = 1e-10;

/// Elementary symmetric functions of a spectrum; candidate member of the
/// symmetrized polydisc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymPoint {
    y: Vec<Complex64>,
}

impl SymPoint {
    pub fn new(y: Vec<Complex64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::InvalidArgument("empty symmetric point".into()));
        }
        if !y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SymPoint { y })
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.y
    }

    /// The monic polynomial `t^n + sum_j (-1)^j y_j t^(n-j)` whose root
    /// multiset the point encodes.
    pub fn associated_poly(&self) -> PolyCoeffs {
        let n = self.y.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        for j in 1..=n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[n - j] = self.y[j - 1] * sign;
        }
        PolyCoeffs::new(coeffs).expect("monic by construction")
    }

    pub fn max_abs_diff(&self, other: &SymPoint) -> f64 {
        self.y
            .iter()
            .zip(&other.y)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Membership verdict with the distance to the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub inside: bool,
    /// `1 - max |eigenvalue|`; negative outside.
    pub margin: f64,
    /// Raised when the margin is within `BOUNDARY_EPS` of zero.
    pub boundary: bool,
}

impl Membership {
    fn from_radius(rho: f64) -> Self {
        let margin = 1.0 - rho;
        Membership {
            inside: margin > BOUNDARY_EPS,
            margin,
            boundary: margin.abs() <= BOUNDARY_EPS,
        }
    }
}

/// Signed characteristic-polynomial coefficients: the elementary symmetric
/// functions of the eigenvalues.
pub fn project(a: &ComplexMatrix) -> SymPoint {
    let n = a.dim();
    let p = char_poly(a);
    let mut y = Vec::with_capacity(n);
    for j in 1..=n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        y.push(p.coeffs()[n - j] * sign);
    }
    SymPoint { y }
}

/// Elementary symmetric evaluations of the given values.
pub fn sigma(values: &[Complex64]) -> SymPoint {
    let n = values.len();
    let p = PolyCoeffs::from_roots(values);
    let mut y = Vec::with_capacity(n);
    for j in 1..=n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        y.push(p.coeffs()[n - j] * sign);
    }
    SymPoint { y }
}

/// Spectral-ball membership with margin.
pub fn in_spectral_ball(a: &ComplexMatrix) -> Result<Membership> {
    Ok(Membership::from_radius(spectral_radius(a)?))
}

/// Symmetrized-polydisc membership with margin, decided by the root moduli
/// of the associated polynomial.
pub fn in_symmetrized_polydisc(y: &SymPoint) -> Result<Membership> {
    let roots = refined_roots(&y.associated_poly())?;
    let rho = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    Ok(Membership::from_radius(rho))
}

/// Companion matrix of the associated polynomial: coefficients in the last
/// column, subdiagonal of ones. Cyclic for every input, and a section of
/// `project` up to rounding.
pub fn companion(y: &SymPoint) -> ComplexMatrix {
    let n = y.dim();
    let p = y.associated_poly();
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        m[(i, n - 1)] = -p.coeffs()[i];
    }
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Branching locus of the projection: exactly the non-cyclic matrices.
pub fn is_branch_point(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<bool> {
    Ok(!jordan::is_cyclic(a, cfg)?)
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

    #[test]
    fn project_diag() {
        let a = ComplexMatrix::diagonal(&[c(0.5, 0.0), c(0.25, 0.0)]);
        let y = project(&a);
        assert_relative_eq!(y.components()[0].re, 0.75, max_relative = 1e-14);
        assert_relative_eq!(y.components()[1].re, 0.125, max_relative = 1e-14);
    }

    #[test]
    fn project_nilpotent_is_zero() {
        let a = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let y = project(&a);
        assert!(y.components().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn sigma_pair() {
        let y = sigma(&[c(0.3, 0.1), c(-0.2, 0.4)]);
        let sum = c(0.1, 0.5);
        let prod = c(0.3, 0.1) * c(-0.2, 0.4);
        assert!((y.components()[0] - sum).norm() < 1e-15);
        assert!((y.components()[1] - prod).norm() < 1e-15);
    }

    #[test]
    fn sigma_matches_project_of_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let n = rng.gen_range(2..=6);
            let v: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)))
                .collect();
            let via_matrix = project(&ComplexMatrix::diagonal(&v));
            let direct = sigma(&v);
            assert!(via_matrix.max_abs_diff(&direct) < 1e-12);
        }
    }

    #[test]
    fn section_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            let v: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)))
                .collect();
            let y = sigma(&v);
            let back = project(&companion(&y));
            assert!(back.max_abs_diff(&y) < 1e-12);
        }
    }

    #[test]
    fn companion_convention() {
        let y = SymPoint::new(vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let m = companion(&y);
        assert!(m[(0, 0)].norm() == 0.0 && m[(0, 1)].norm() == 0.0);
        assert_eq!(m[(1, 0)], c(1.0, 0.0));
        assert!(m[(1, 1)].norm() == 0.0);
    }

    #[test]
    fn spectral_ball_examples() {
        let zero = ComplexMatrix::zeros(2);
        let m = in_spectral_ball(&zero).unwrap();
        assert!(m.inside);
        assert_relative_eq!(m.margin, 1.0, max_relative = 1e-15);

        let boundary = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(1.0, 0.0)]);
        let m = in_spectral_ball(&boundary).unwrap();
        assert!(!m.inside);
        assert!(m.boundary);

        let a = ComplexMatrix::from_real(2, &[0.0, 4.0, 0.01, 0.0]).unwrap();
        let m = in_spectral_ball(&a).unwrap();
        assert!(m.inside);
        assert_relative_eq!(m.margin, 0.8, max_relative = 1e-10);
    }

    #[test]
    fn polydisc_examples() {
        let origin = SymPoint::new(vec![c(0.0, 0.0); 3]).unwrap();
        assert!(in_symmetrized_polydisc(&origin).unwrap().inside);

        // Roots 1.1 and 0.9: outside.
        let y = SymPoint::new(vec![c(2.0, 0.0), c(0.99, 0.0)]).unwrap();
        let m = in_symmetrized_polydisc(&y).unwrap();
        assert!(!m.inside);
        assert_relative_eq!(m.margin, -0.1, max_relative = 1e-9);
    }

    #[test]
    fn sigma_of_polydisc_points_is_member() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..100 {
            let n = rng.gen_range(2..=6);
            let v: Vec<Complex64> = (0..n)
                .map(|_| {
                    let r: f64 = rng.gen_range(0.0..0.97);
                    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    c(r * th.cos(), r * th.sin())
                })
                .collect();
            assert!(in_symmetrized_polydisc(&sigma(&v)).unwrap().inside);
        }
    }

    #[test]
    fn membership_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n = rng.gen_range(2..=5);
            let scale = rng.gen_range(0.2..1.4);
            let data: Vec<Complex64> = (0..n * n)
                .map(|_| c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
                .collect();
            let a = ComplexMatrix::new(n, data).unwrap();
            let lhs = in_spectral_ball(&a).unwrap();
            let rhs = in_symmetrized_polydisc(&project(&a)).unwrap();
            assert_eq!(lhs.inside, rhs.inside);
            assert!((lhs.margin - rhs.margin).abs() <= 1e-9);
        }
    }

    #[test]
    fn branch_point_examples() {
        let cfg = ToleranceConfig::default();
        let y = sigma(&[c(0.3, 0.0), c(-0.2, 0.0)]);
        assert!(!is_branch_point(&companion(&y), &cfg).unwrap());
        assert!(is_branch_point(&ComplexMatrix::zeros(2), &cfg).unwrap());
        let d = ComplexMatrix::diagonal(&[c(0.1, 0.0), c(0.2, 0.0)]);
        assert!(!is_branch_point(&d, &cfg).unwrap());
    }
}
