use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{C64, ZERO};

/// Highest degree accepted for user-supplied potentials.
pub const MAX_DEGREE: usize = 64;

/// Complex polynomial `Σ a_m z^m`, coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HoloPoly {
    coeffs: Vec<C64>,
}

impl HoloPoly {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        let p = Self::raw(coeffs);
        if let Some(d) = p.degree() {
            if d > MAX_DEGREE {
                return Err(Error::InvalidInput(format!(
                    "polynomial degree {d} exceeds {MAX_DEGREE}"
                )));
            }
        }
        if p.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
        }
        Ok(p)
    }

    /// No degree cap; trailing zeros stripped.
    pub(crate) fn raw(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        HoloPoly { coeffs }
    }

    pub fn zero() -> Self {
        HoloPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::raw(vec![c])
    }

    /// `c·z`.
    pub fn linear(c: C64) -> Self {
        Self::raw(vec![ZERO, c])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::raw(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, &c)| c * m as f64)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(ZERO);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(m, &c)| c / (m + 1) as f64),
        );
        Self::raw(out)
    }

    /// `∫_a^b p(t) dt`.
    pub fn integrate(&self, a: C64, b: C64) -> C64 {
        let p = self.antiderivative();
        p.eval(b) - p.eval(a)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::raw(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::raw(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::raw(
            (0..n)
                .map(|m| {
                    self.coeffs.get(m).copied().unwrap_or(ZERO)
                        + other.coeffs.get(m).copied().unwrap_or(ZERO)
                })
                .collect(),
        )
    }

    /// The polynomial with conjugated coefficients, so that `p*(z̄) = conj(p(z))`.
    pub fn conj_coeffs(&self) -> Self {
        Self::raw(self.coeffs.iter().map(|c| c.conj()).collect())
    }
}

impl fmt::Display for HoloPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(m, c)| match m {
                0 => format!("({c})"),
                1 => format!("({c})z"),
                _ => format!("({c})z^{m}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(HoloPoly::zero().integrate(ZERO, c(3.0, 1.0)), ZERO);
        let k = c(0.5, -2.0);
        let z = c(1.5, 0.25);
        assert_eq!(HoloPoly::constant(k).integrate(ZERO, z), k * z);
        assert_eq!(HoloPoly::linear(c(1.0, 0.0)).integrate(ZERO, c(2.0, 0.0)), c(2.0, 0.0));
    }

    #[test]
    fn degree_cap() {
        assert!(HoloPoly::new(vec![c(1.0, 0.0); MAX_DEGREE + 2]).is_err());
        assert!(HoloPoly::new(vec![c(1.0, 0.0); MAX_DEGREE + 1]).is_ok());
        assert!(HoloPoly::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn conj_coeffs_conjugates_values() {
        let p = HoloPoly::new(vec![c(1.0, 2.0), c(-0.5, 0.25), c(0.0, 1.0)]).unwrap();
        let z = c(0.3, -0.7);
        assert!((p.conj_coeffs().eval(z.conj()) - p.eval(z).conj()).norm() < 1e-15);
    }

    #[test]
    fn product_and_derivative() {
        let p = HoloPoly::new(vec![c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let q = p.mul(&p);
        assert_eq!(q.coeffs(), &[c(1.0, 0.0), c(4.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(q.derivative().coeffs(), &[c(4.0, 0.0), c(8.0, 0.0)]);
    }
}
