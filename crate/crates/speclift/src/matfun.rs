//! Matrix exponential and logarithm.
//!
//! The exponential is Pade order 13 with scaling and squaring. The logarithm
//! is inverse scaling and squaring on top of Denman-Beavers square roots,
//! with the branch cut rotated onto the ray that stays farthest from the
//! spectrum; the construction needs some logarithm, not the principal one.

use num_complex::Complex64;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::poly::{char_poly, poly_roots};

const PADE13_THETA: f64 = 5.371920351148152;
const PADE13_B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Matrix exponential.
pub fn mat_exp(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let norm = a.norm_inf();
    let s = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    let b = a.scale(real(0.5f64.powi(s as i32)));

    let ident = ComplexMatrix::identity(n);
    let b2 = b.mul(&b).unwrap();
    let b4 = b2.mul(&b2).unwrap();
    let b6 = b2.mul(&b4).unwrap();

    let w1 = b6
        .scale(real(PADE13_B[13]))
        .add(&b4.scale(real(PADE13_B[11])))
        .unwrap()
        .add(&b2.scale(real(PADE13_B[9])))
        .unwrap();
    let w2 = b6
        .scale(real(PADE13_B[7]))
        .add(&b4.scale(real(PADE13_B[5])))
        .unwrap()
        .add(&b2.scale(real(PADE13_B[3])))
        .unwrap()
        .add(&ident.scale(real(PADE13_B[1])))
        .unwrap();
    let u = b.mul(&b6.mul(&w1).unwrap().add(&w2).unwrap()).unwrap();

    let z1 = b6
        .scale(real(PADE13_B[12]))
        .add(&b4.scale(real(PADE13_B[10])))
        .unwrap()
        .add(&b2.scale(real(PADE13_B[8])))
        .unwrap();
    let v = b6
        .mul(&z1)
        .unwrap()
        .add(&b6.scale(real(PADE13_B[6])))
        .unwrap()
        .add(&b4.scale(real(PADE13_B[4])))
        .unwrap()
        .add(&b2.scale(real(PADE13_B[2])))
        .unwrap()
        .add(&ident.scale(real(PADE13_B[0])))
        .unwrap();

    // Solve (V - U) X = (V + U).
    let vm = v.sub(&u).unwrap();
    let vp = v.add(&u).unwrap();
    let mut x = ComplexMatrix::zeros(n);
    for j in 0..n {
        let col: Vec<Complex64> = (0..n).map(|i| vp[(i, j)]).collect();
        let sol = vm.solve_vec(&col).expect("Pade denominator invertible");
        for i in 0..n {
            x[(i, j)] = sol[i];
        }
    }
    for _ in 0..s {
        x = x.mul(&x).unwrap();
    }
    x
}

/// Denman-Beavers square root; requires no eigenvalues on the closed
/// negative real axis.
fn sqrtm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut x = a.clone();
    let mut y = ComplexMatrix::identity(a.dim());
    for _ in 0..100 {
        let xi = x.inverse().map_err(|_| Error::NonConvergence {
            what: "matrix square root",
        })?;
        let yi = y.inverse().map_err(|_| Error::NonConvergence {
            what: "matrix square root",
        })?;
        let xn = x.add(&yi).unwrap().scale(real(0.5));
        let yn = y.add(&xi).unwrap().scale(real(0.5));
        let delta = xn.sub(&x).unwrap().norm_inf();
        x = xn;
        y = yn;
        if delta <= 1e-15 * (1.0 + x.norm_inf()) {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        what: "matrix square root",
    })
}

/// Principal logarithm for matrices with spectrum off the closed negative
/// real axis.
fn log_principal(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = t.dim();
    let ident = ComplexMatrix::identity(n);
    let mut x = t.clone();
    let mut k = 0u32;
    while x.sub(&ident).unwrap().norm_inf() > 0.25 {
        if k >= 60 {
            return Err(Error::NonConvergence {
                what: "inverse scaling for matrix logarithm",
            });
        }
        x = sqrtm(&x)?;
        k += 1;
    }
    // atanh series: log X = 2 * sum Y^(2j+1)/(2j+1), Y = (X-I)(X+I)^{-1}.
    let num = x.sub(&ident).unwrap();
    let den_inv = x.add(&ident).unwrap().inverse().map_err(|_| {
        Error::NonConvergence {
            what: "matrix logarithm series",
        }
    })?;
    let y = num.mul(&den_inv).unwrap();
    let y2 = y.mul(&y).unwrap();
    let mut term = y.clone();
    let mut acc = y.clone();
    for j in 1..=8 {
        term = term.mul(&y2).unwrap();
        acc = acc.add(&term.scale(real(1.0 / (2.0 * j as f64 + 1.0)))).unwrap();
    }
    Ok(acc.scale(real(2.0f64.powi(k as i32) * 2.0)))
}

/// Picks the cut-ray angle with the largest angular distance to every
/// eigenvalue argument.
fn branch_angle(args: &[f64]) -> Result<f64> {
    let mut sorted = args.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = sorted.len();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut best_gap = sorted[0] + two_pi - sorted[m - 1];
    let mut best_mid = sorted[m - 1] + best_gap / 2.0;
    for i in 0..m - 1 {
        let gap = sorted[i + 1] - sorted[i];
        if gap > best_gap {
            best_gap = gap;
            best_mid = sorted[i] + gap / 2.0;
        }
    }
    if best_gap < 1e-3 {
        return Err(Error::BranchFailure);
    }
    // Map to (-pi, pi].
    let mut alpha = best_mid;
    while alpha > std::f64::consts::PI {
        alpha -= two_pi;
    }
    while alpha <= -std::f64::consts::PI {
        alpha += two_pi;
    }
    Ok(alpha)
}

/// Matrix logarithm with automatic branch selection: returns `L` with
/// `mat_exp(L) = T`, the cut placed along the ray maximizing angular
/// distance to the spectrum of `T`.
pub fn mat_log(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    let sigma = t.singular_values();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let smin = sigma.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= cfg.rank_tol * smax {
        return Err(Error::Singular);
    }
    let roots = poly_roots(&char_poly(t))?;
    let args: Vec<f64> = roots
        .iter()
        .filter(|r| r.norm() > 0.0)
        .map(|r| r.arg())
        .collect();
    if args.len() != t.dim() {
        return Err(Error::Singular);
    }
    let alpha = branch_angle(&args)?;
    let delta = std::f64::consts::PI - alpha;
    let rot = Complex64::new(0.0, delta).exp();
    let rotated = t.scale(rot);
    let lp = log_principal(&rotated)?;
    let mut out = lp;
    for i in 0..t.dim() {
        out[(i, i)] -= Complex64::new(0.0, delta);
    }
    Ok(out)
}
