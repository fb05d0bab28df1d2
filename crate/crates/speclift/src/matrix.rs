//! Dense complex matrices and the factorizations the rest of the library
//! builds on: LU with partial pivoting and a one-sided Jacobi SVD.
//!
//! Everything here targets small dimensions (n <= 8); clarity and backward
//! error win over asymptotic speed.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds an `n x n` matrix from row-major entries.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        let m = ComplexMatrix { n, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Convenience constructor from real row-major entries.
    pub fn from_real(n: usize, rows: &[f64]) -> Result<Self> {
        Self::new(n, rows.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ComplexMatrix { n: self.n, data })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMatrix { n: self.n, data })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                out[i] += self[(i, j)] * v[j];
            }
        }
        out
    }

    /// Shifted copy `self - z I`.
    pub fn shift(&self, z: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out[(i, i)] -= z;
        }
        out
    }

    /// Max-row-sum norm; the norm used for all scaling decisions.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Kronecker product `self (x) rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let n = self.n;
        let m = rhs.n;
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    fn check_dim(&self, rhs: &Self) -> Result<()> {
        if self.n != rhs.n {
            Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.n,
            })
        } else {
            Ok(())
        }
    }

    /// LU decomposition with partial pivoting. Returns the packed factors,
    /// pivot indices and the permutation sign.
    fn lu(&self) -> (Vec<Complex64>, Vec<usize>, f64) {
        let n = self.n;
        let mut a = self.data.clone();
        let mut piv = (0..n).collect::<Vec<_>>();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for r in (k + 1)..n {
                let v = a[r * n + k].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                sign = -sign;
            }
            let pivot = a[k * n + k];
            if pivot.norm() == 0.0 {
                continue;
            }
            for r in (k + 1)..n {
                let factor = a[r * n + k] / pivot;
                a[r * n + k] = factor;
                for j in (k + 1)..n {
                    let akj = a[k * n + j];
                    a[r * n + j] -= factor * akj;
                }
            }
        }
        (a, piv, sign)
    }

    pub fn det(&self) -> Complex64 {
        let (lu, _, sign) = self.lu();
        let mut d = Complex64::new(sign, 0.0);
        for i in 0..self.n {
            d *= lu[i * self.n + i];
        }
        d
    }

    /// Solves `self * x = b` for a single right-hand side.
    pub fn solve_vec(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let (lu, piv, _) = self.lu();
        let mut x: Vec<Complex64> = piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let lij = lu[i * n + j];
                let xj = x[j];
                x[i] -= lij * xj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let uij = lu[i * n + j];
                let xj = x[j];
                x[i] -= uij * xj;
            }
            let d = lu[i * n + i];
            if d.norm() == 0.0 {
                return Err(Error::Singular);
            }
            x[i] /= d;
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut out = Self::zeros(n);
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve_vec(&e)?;
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        if !out.is_finite() {
            return Err(Error::Singular);
        }
        Ok(out)
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let (sigma, _) = jacobi_svd(self.n, self.n, &self.data, false);
        sigma
    }

    /// Number of singular values exceeding `tau * sigma_max`.
    ///
    /// `tau` is relative; the count is invariant under rescaling of the
    /// matrix. A matrix with `sigma_max == 0` has rank 0.
    pub fn rank_tol(&self, tau: f64) -> usize {
        rank_of_columns(self.n, self.n, &self.data, tau)
    }

    /// Number of singular values exceeding the absolute threshold `tau`.
    /// Meaningful on matrices normalized to unit largest singular value,
    /// where powers may legitimately decay to pure rounding noise.
    pub(crate) fn rank_abs(&self, tau: f64) -> usize {
        self.singular_values().iter().filter(|&&s| s > tau).count()
    }

    /// Orthonormal basis of the numerical right nullspace at relative
    /// threshold `tau` (right singular vectors with small singular values).
    pub fn nullspace(&self, tau: f64) -> Vec<Vec<Complex64>> {
        let n = self.n;
        let (sigma, v) = jacobi_svd(n, n, &self.data, true);
        let v = v.expect("vectors requested");
        let smax = sigma.first().copied().unwrap_or(0.0);
        let mut basis = Vec::new();
        for (j, &s) in sigma.iter().enumerate() {
            if smax == 0.0 || s <= tau * smax {
                basis.push((0..n).map(|i| v[i * n + j]).collect());
            }
        }
        basis
    }

    /// 2-norm condition number; `None` when singular to working precision.
    pub fn cond_2(&self) -> Option<f64> {
        let sigma = self.singular_values();
        let smax = *sigma.first()?;
        let smin = *sigma.last()?;
        if smin == 0.0 {
            None
        } else {
            Some(smax / smin)
        }
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// `a*c - c*a`.
pub fn commutator(a: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.mul(c)?.sub(&c.mul(a)?)
}

/// Rank of an `rows x cols` row-major array at relative threshold `tau`.
///
/// Wide arrays are transposed first so the Jacobi sweep always orthogonalizes
/// the short list of vectors.
pub fn rank_of_columns(rows: usize, cols: usize, data: &[Complex64], tau: f64) -> usize {
    let (sigma, _) = if cols > rows {
        let mut t = vec![Complex64::new(0.0, 0.0); rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                t[j * rows + i] = data[i * cols + j].conj();
            }
        }
        jacobi_svd(cols, rows, &t, false)
    } else {
        jacobi_svd(rows, cols, data, false)
    };
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > tau * smax).count()
}

/// One-sided Jacobi SVD on the columns of an `rows x cols` row-major array
/// (`cols <= rows` assumed by callers that need full accuracy).
///
/// Returns the singular values (descending) and, when requested, the matrix
/// of right singular vectors as a `cols x cols` row-major array whose j-th
/// column pairs with the j-th singular value.
fn jacobi_svd(
    rows: usize,
    cols: usize,
    data: &[Complex64],
    want_vectors: bool,
) -> (Vec<f64>, Option<Vec<Complex64>>) {
    let zero = Complex64::new(0.0, 0.0);
    // Column-major working copy.
    let mut a = vec![zero; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            a[j * rows + i] = data[i * cols + j];
        }
    }
    let mut v = vec![zero; cols * cols];
    for j in 0..cols {
        v[j * cols + j] = Complex64::new(1.0, 0.0);
    }

    let tol = 1e-14;
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (alpha, beta, gamma) = {
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = zero;
                    for i in 0..rows {
                        let ap = a[p * rows + i];
                        let aq = a[q * rows + i];
                        alpha += ap.norm_sqr();
                        beta += aq.norm_sqr();
                        gamma += ap.conj() * aq;
                    }
                    (alpha, beta, gamma)
                };
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Column update [a_p, a_q] <- [a_p, a_q] * J with
                // J = [[c, s*phase], [-s*conj(phase), c]].
                for i in 0..rows {
                    let ap = a[p * rows + i];
                    let aq = a[q * rows + i];
                    a[p * rows + i] = ap * c - aq * (s * phase.conj());
                    a[q * rows + i] = ap * (s * phase) + aq * c;
                }
                for i in 0..cols {
                    let vp = v[p * cols + i];
                    let vq = v[q * cols + i];
                    v[p * cols + i] = vp * c - vq * (s * phase.conj());
                    v[q * cols + i] = vp * (s * phase) + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols)
        .map(|j| {
            (0..rows)
                .map(|i| a[j * rows + i].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();

    if want_vectors {
        // Row-major cols x cols matrix, columns permuted to match sigma.
        let mut vm = vec![zero; cols * cols];
        for (newj, &oldj) in order.iter().enumerate() {
            for i in 0..cols {
                vm[i * cols + newj] = v[oldj * cols + i];
            }
        }
        (sigma, Some(vm))
    } else {
        (sigma, None)
    }
}
