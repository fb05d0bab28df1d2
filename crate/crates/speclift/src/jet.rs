//! Truncated power series in `(v - p)`: the carrier of every vanishing-order
//! statement the lifting criterion makes.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Truncated power series `sum c_i (v - p)^i`, `i < K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    base: Complex64,
    coeffs: Vec<Complex64>,
}

/// Outcome of a vanishing-order measurement. Orders at or beyond the
/// truncation are indistinguishable and reported as `AtLeastK`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VanishingOrder {
    Order(usize),
    AtLeastK,
}

impl VanishingOrder {
    /// Whether the measured order meets a required one. `AtLeastK` counts as
    /// at least any requirement (required orders never exceed the dimension,
    /// and K is chosen above it).
    pub fn satisfies(&self, required: usize) -> bool {
        match self {
            VanishingOrder::Order(o) => *o >= required,
            VanishingOrder::AtLeastK => true,
        }
    }

    pub fn as_option(&self) -> Option<usize> {
        match self {
            VanishingOrder::Order(o) => Some(*o),
            VanishingOrder::AtLeastK => None,
        }
    }
}

impl Jet {
    pub fn new(base: Complex64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("jet order must be >= 1".into()));
        }
        if !coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Jet { base, coeffs })
    }

    pub fn constant(value: Complex64, base: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order.max(1)];
        coeffs[0] = value;
        Jet { base, coeffs }
    }

    pub fn zero(base: Complex64, order: usize) -> Self {
        Jet {
            base,
            coeffs: vec![Complex64::new(0.0, 0.0); order.max(1)],
        }
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_aligned(&self, other: &Jet) -> Result<()> {
        if self.base != other.base || self.coeffs.len() != other.coeffs.len() {
            Err(Error::BaseMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_aligned(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet {
            base: self.base,
            coeffs,
        })
    }

    /// Product truncated at the common order.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_aligned(other)?;
        let k = self.coeffs.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        for i in 0..k {
            if self.coeffs[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..(k - i) {
                coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        Ok(Jet {
            base: self.base,
            coeffs,
        })
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        Jet {
            base: self.base,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Polynomial evaluation at `base + h`.
    pub fn eval_offset(&self, h: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * h + c;
        }
        acc
    }

    /// Smallest index whose coefficient exceeds the threshold; `AtLeastK`
    /// when none does.
    pub fn order_above(&self, threshold: f64) -> VanishingOrder {
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm() > threshold {
                return VanishingOrder::Order(i);
            }
        }
        VanishingOrder::AtLeastK
    }

    /// Vanishing order with noise cutoff relative to the jet's own largest
    /// coefficient.
    pub fn vanishing_order(&self, eps: f64) -> VanishingOrder {
        let max = self.max_coeff();
        if max == 0.0 {
            return VanishingOrder::AtLeastK;
        }
        self.order_above(eps * max)
    }

    /// Expands the jet into global coefficients in `v` (base point zero).
    pub fn to_global_coeffs(&self) -> Vec<Complex64> {
        // sum c_i (v - p)^i rewritten in powers of v by repeated
        // multiplication, highest coefficient first.
        let k = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); k];
        for &c in self.coeffs.iter().rev() {
            // out <- out * (v - p) + c
            for idx in (1..k).rev() {
                let prev = out[idx - 1];
                out[idx] = out[idx] * (-self.base) + prev;
            }
            // Degree cannot actually grow past k - 1 here.
            out[0] = out[0] * (-self.base) + c;
        }
        out
    }
}

/// Taylor recentering of `sum a_i v^i` at `p`, truncated to `order`
/// coefficients, by repeated synthetic division.
pub fn from_polynomial(coeffs: &[Complex64], p: Complex64, order: usize) -> Jet {
    let order = order.max(1);
    let mut work: Vec<Complex64> = coeffs.to_vec();
    let mut out = Vec::with_capacity(order);
    for _ in 0..order {
        match work.len() {
            0 => out.push(Complex64::new(0.0, 0.0)),
            1 => {
                out.push(work[0]);
                work.clear();
            }
            _ => {
                let d = work.len() - 1;
                let mut q = vec![Complex64::new(0.0, 0.0); d];
                q[d - 1] = work[d];
                for i in (1..d).rev() {
                    q[i - 1] = work[i] + p * q[i];
                }
                let r = work[0] + p * q[0];
                out.push(r);
                work = q;
            }
        }
    }
    Jet { base: p, coeffs: out }
}
