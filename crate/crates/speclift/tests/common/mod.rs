//! Shared generators for the integration suites.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use speclift::jordan::JordanStructure;
use speclift::matrix::ComplexMatrix;
use speclift::projection::{companion, SymPoint};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    c(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// Uniform point of the closed disc of radius `r`.
pub fn random_disc(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    loop {
        let z = random_complex(rng, r);
        if z.norm() <= r {
            return z;
        }
    }
}

pub fn random_matrix(n: usize, rng: &mut ChaCha8Rng, r: f64) -> ComplexMatrix {
    let data = (0..n * n).map(|_| random_complex(rng, r)).collect();
    ComplexMatrix::new(n, data).unwrap()
}

/// Random matrix resampled until its 2-norm condition number is at most
/// `max_cond`.
pub fn conditioned_matrix(n: usize, rng: &mut ChaCha8Rng, max_cond: f64) -> ComplexMatrix {
    loop {
        let t = random_matrix(n, rng, 1.0);
        if t.cond_2().is_some_and(|k| k <= max_cond) {
            return t;
        }
    }
}

pub fn conjugate(m: &ComplexMatrix, t: &ComplexMatrix) -> ComplexMatrix {
    t.mul(m).unwrap().mul(&t.inverse().unwrap()).unwrap()
}

/// All partitions of `n`, parts descending.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, cap: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(acc.clone());
            return;
        }
        for part in (1..=rest.min(cap)).rev() {
            acc.push(part);
            rec(rest - part, part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Every Jordan structure of total dimension `n`: a partition of `n` into
/// eigenvalue multiplicities, then a block partition per eigenvalue.
pub fn all_structures(n: usize, eigenvalues: &[Complex64]) -> Vec<JordanStructure> {
    let mut out = Vec::new();
    for mults in partitions(n) {
        assert!(mults.len() <= eigenvalues.len(), "need more eigenvalues");
        let per_ev: Vec<Vec<Vec<usize>>> = mults.iter().map(|&m| partitions(m)).collect();
        let mut idx = vec![0usize; mults.len()];
        loop {
            let parts: Vec<(Complex64, Vec<usize>)> = idx
                .iter()
                .enumerate()
                .map(|(i, &k)| (eigenvalues[i], per_ev[i][k].clone()))
                .collect();
            out.push(JordanStructure::from_parts(&parts).unwrap());
            // Odometer.
            let mut carry = true;
            for i in 0..idx.len() {
                if carry {
                    idx[i] += 1;
                    if idx[i] == per_ev[i].len() {
                        idx[i] = 0;
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
    out
}

// ---- polynomial coefficient arithmetic for eigenvalue curves ----

pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_eval(a: &[Complex64], v: Complex64) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for &x in a.iter().rev() {
        acc = acc * v + x;
    }
    acc
}

/// Elementary symmetric polynomials of polynomial-valued roots: coefficient
/// vectors of `e_1(r(v)), ..., e_n(r(v))`.
pub fn symmetric_of_curves(curves: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    // Expand prod_i (lambda - r_i(v)) over lambda with polynomial
    // coefficients: start with [1], multiply by (lambda - r_i).
    // coeffs[k] is the polynomial multiplying lambda^k.
    let mut coeffs: Vec<Vec<Complex64>> = vec![vec![c(1.0, 0.0)]];
    for r in curves {
        let neg_r: Vec<Complex64> = r.iter().map(|&x| -x).collect();
        let mut next: Vec<Vec<Complex64>> = vec![vec![c(0.0, 0.0)]; coeffs.len() + 1];
        for (k, poly) in coeffs.iter().enumerate() {
            // lambda * coeffs[k] contributes to next[k + 1].
            next[k + 1] = add_polys(&next[k + 1], poly);
            // (-r) * coeffs[k] contributes to next[k].
            next[k] = add_polys(&next[k], &poly_mul(poly, &neg_r));
        }
        coeffs = next;
    }
    let n = curves.len();
    // chi(lambda) = lambda^n + sum_j (-1)^j e_j lambda^(n-j), so
    // e_j = (-1)^j * coeffs[n - j].
    (1..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[n - j].iter().map(|&x| x * sign).collect()
        })
        .collect()
}

pub fn add_polys(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(c(0.0, 0.0));
            let y = b.get(i).copied().unwrap_or(c(0.0, 0.0));
            x + y
        })
        .collect()
}

/// Companion matrix of a symmetric point given by component values.
pub fn companion_of(values: &[Complex64]) -> ComplexMatrix {
    companion(&SymPoint::new(values.to_vec()).unwrap())
}
