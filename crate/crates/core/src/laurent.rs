//! Truncated Laurent series in the loop parameter λ.
//!
//! A [`LaurentLoop`] of band `N` stores the coefficients `c_j` for
//! `j = -N..=N` of `f(λ) = Σ c_j λ^j`. Every coefficient outside the band is
//! zero by convention. Operations that can push mass outside the requested
//! band return a [`Truncated`] value carrying the `ℓ¹` mass of everything that
//! was dropped.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Pipeline truncation half-width.
pub const DEFAULT_BAND: usize = 12;
/// Coefficient-mass threshold for the exponential series.
pub const EXP_TOL: f64 = 1e-14;
/// Hard cap on Taylor terms in [`LaurentLoop::exp_taylor`].
pub const EXP_MAX_TERMS: usize = 64;

/// Extra coefficients computed past the requested band when an exponential
/// has two-sided support, before giving up with `NonConvergent`.
const EXP_MAX_EXTENSION: usize = 1024;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A value together with the coefficient mass lost to truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated<T> {
    pub value: T,
    pub discarded: f64,
}

impl<T> Truncated<T> {
    pub fn exact(value: T) -> Self {
        Truncated {
            value,
            discarded: 0.0,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Truncated<U> {
        Truncated {
            value: f(self.value),
            discarded: self.discarded,
        }
    }
}

/// Serialized as the band and the coefficients of `λ^{−band} … λ^{band}` as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaurentLoop {
    band: usize,
    coeffs: Vec<C64>,
}

impl LaurentLoop {
    pub fn zero(band: usize) -> Self {
        LaurentLoop {
            band,
            coeffs: vec![ZERO; 2 * band + 1],
        }
    }

    pub fn constant(c: C64, band: usize) -> Self {
        let mut f = Self::zero(band);
        f.coeffs[band] = c;
        f
    }

    pub fn one(band: usize) -> Self {
        Self::constant(ONE, band)
    }

    /// `c λ^power`; the band grows to hold `power` if needed.
    pub fn monomial(c: C64, power: i64, band: usize) -> Self {
        let band = band.max(power.unsigned_abs() as usize);
        let mut f = Self::zero(band);
        f.set(power, c);
        f
    }

    /// Builds a loop from `2N + 1` coefficients ordered `c_{-N}, …, c_N`.
    pub fn from_coeffs(band: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != 2 * band + 1 {
            return Err(Error::InvalidLoop(format!(
                "band {band} needs {} coefficients, got {}",
                2 * band + 1,
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidLoop(format!("non-finite coefficient {c}")));
        }
        Ok(LaurentLoop { band, coeffs })
    }

    pub fn from_fn(band: usize, mut f: impl FnMut(i64) -> C64) -> Self {
        let b = band as i64;
        LaurentLoop {
            band,
            coeffs: (-b..=b).map(&mut f).collect(),
        }
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `λ^j`, zero outside the band.
    pub fn coeff(&self, j: i64) -> C64 {
        if j.unsigned_abs() as usize > self.band {
            ZERO
        } else {
            self.coeffs[(j + self.band as i64) as usize]
        }
    }

    /// Panics if `j` lies outside the band.
    pub fn set(&mut self, j: i64, c: C64) {
        assert!(
            j.unsigned_abs() as usize <= self.band,
            "index {j} outside band {}",
            self.band
        );
        self.coeffs[(j + self.band as i64) as usize] = c;
    }

    /// `(j, c_j)` pairs from `-N` to `N`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let b = self.band as i64;
        self.coeffs.iter().enumerate().map(move |(k, &c)| (k as i64 - b, c))
    }

    /// Re-bands the loop; coefficients that no longer fit are discarded.
    pub fn with_band(&self, band: usize) -> Truncated<Self> {
        let mut out = Self::zero(band);
        let mut discarded = 0.0;
        for (j, c) in self.iter() {
            if j.unsigned_abs() as usize <= band {
                out.set(j, c);
            } else {
                discarded += c.norm();
            }
        }
        Truncated {
            value: out,
            discarded,
        }
    }

    /// Grows the band to at least `band`; never drops anything.
    pub fn widened(&self, band: usize) -> Self {
        if band <= self.band {
            self.clone()
        } else {
            self.with_band(band).value
        }
    }

    /// `ℓ¹` norm of the coefficients.
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Max coefficient distance, over the union of both bands.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let b = self.band.max(other.band) as i64;
        (-b..=b)
            .map(|j| (self.coeff(j) - other.coeff(j)).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn scale(&self, s: C64) -> Self {
        LaurentLoop {
            band: self.band,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Truncated product: keeps `|j| <= out_band`.
    pub fn mul(&self, other: &Self, out_band: usize) -> Truncated<Self> {
        let mut out = Self::zero(out_band);
        let ob = out_band as i64;
        let (fb, gb) = (self.band as i64, other.band as i64);
        let full_band = (fb + gb) as usize;
        let mut full = vec![ZERO; 2 * full_band + 1];
        for (p, &fp) in self.coeffs.iter().enumerate() {
            if fp == ZERO {
                continue;
            }
            for (q, &gq) in other.coeffs.iter().enumerate() {
                full[p + q] += fp * gq;
            }
        }
        let mut discarded = 0.0;
        for (k, c) in full.into_iter().enumerate() {
            let j = k as i64 - full_band as i64;
            if j.abs() <= ob {
                out.set(j, c);
            } else {
                discarded += c.norm();
            }
        }
        Truncated {
            value: out,
            discarded,
        }
    }

    /// `exp(f)` on the band `[-out_band, out_band]`.
    ///
    /// Scalar loops commute, so `exp(f) = e^{c_0} exp(f_-) exp(f_+)` where
    /// `f_±` are the strictly positive/negative parts. Each one-sided factor is
    /// the power series `Σ f_±^m / m!`, generated with the recurrence
    /// `n g_n = Σ_k k a_k g_{n-k}` (exact on any band). With one-sided `f` the
    /// result is exact on the band; otherwise both factors are extended past
    /// the band until their coefficients drop below [`EXP_TOL`] and the product
    /// is truncated, the dropped mass going into `discarded`.
    pub fn exp(&self, out_band: usize) -> Result<Truncated<Self>> {
        let c0 = self.coeff(0).exp();
        if !c0.is_finite() {
            return Err(Error::NonConvergent {
                terms: 0,
                mass: f64::INFINITY,
            });
        }
        let neg: Vec<C64> = (1..=self.band as i64).map(|n| self.coeff(-n)).collect();
        let pos: Vec<C64> = (1..=self.band as i64).map(|n| self.coeff(n)).collect();
        let neg_zero = neg.iter().all(|c| *c == ZERO);
        let pos_zero = pos.iter().all(|c| *c == ZERO);

        if neg_zero && pos_zero {
            return Ok(Truncated::exact(Self::constant(c0, out_band)));
        }
        if neg_zero || pos_zero {
            let (side, sign) = if neg_zero { (&pos, 1) } else { (&neg, -1) };
            let series = one_sided_exp(side, out_band)?;
            let mut out = Self::zero(out_band);
            let mut discarded = 0.0;
            for (n, g) in series.iter().enumerate() {
                if n <= out_band {
                    out.set(sign * n as i64, g * c0);
                } else {
                    discarded += (g * c0).norm();
                }
            }
            return Ok(Truncated {
                value: out,
                discarded,
            });
        }

        let gm = one_sided_exp(&neg, out_band)?;
        let gp = one_sided_exp(&pos, out_band)?;
        let mut out = Self::zero(out_band);
        let mut discarded = 0.0;
        let (lm, lp) = (gm.len() as i64 - 1, gp.len() as i64 - 1);
        for j in -lm..=lp {
            let mut acc = ZERO;
            // λ^j = λ^{-p} λ^{q} with q - p = j
            let p_lo = 0.max(-j);
            let p_hi = lm.min(lp - j);
            for p in p_lo..=p_hi {
                acc += gm[p as usize] * gp[(p + j) as usize];
            }
            acc *= c0;
            if j.unsigned_abs() as usize <= out_band {
                out.set(j, acc);
            } else {
                discarded += acc.norm();
            }
        }
        Ok(Truncated {
            value: out,
            discarded,
        })
    }

    /// Plain Taylor sum `Σ_{m<M} f^m/m!`, every power truncated to `out_band`.
    /// `M` grows until the added term's mass drops below [`EXP_TOL`], at most
    /// [`EXP_MAX_TERMS`] terms.
    pub fn exp_taylor(&self, out_band: usize) -> Result<Truncated<Self>> {
        let mut sum = Self::one(out_band);
        let mut term = Self::one(out_band);
        let mut discarded = 0.0;
        for m in 1..=EXP_MAX_TERMS {
            let next = term.mul(self, out_band);
            discarded += next.discarded;
            term = next.value.scale(C64::new(1.0 / m as f64, 0.0));
            sum = &sum + &term;
            let mass = term.mass();
            if !mass.is_finite() {
                break;
            }
            if mass < EXP_TOL {
                return Ok(Truncated {
                    value: sum,
                    discarded,
                });
            }
        }
        Err(Error::NonConvergent {
            terms: EXP_MAX_TERMS,
            mass: term.mass(),
        })
    }

    /// `g_j = conj(f_{-j})`: pointwise complex conjugation on `|λ| = 1`.
    pub fn conj_reflect(&self) -> Self {
        LaurentLoop {
            band: self.band,
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        }
    }

    /// `g_j = f_{-j}` without conjugation, i.e. `g(λ) = f(1/λ)`.
    pub fn reflect(&self) -> Self {
        LaurentLoop {
            band: self.band,
            coeffs: self.coeffs.iter().rev().copied().collect(),
        }
    }

    /// `½ (f + conj_reflect(f))`.
    pub fn real_part(&self) -> Self {
        let r = self.conj_reflect();
        LaurentLoop {
            band: self.band,
            coeffs: self
                .coeffs
                .iter()
                .zip(&r.coeffs)
                .map(|(a, b)| (a + b) * 0.5)
                .collect(),
        }
    }

    /// `max_j |c_j - conj(c_{-j})|`; zero iff the loop is real on the circle.
    pub fn reality_defect(&self) -> f64 {
        let b = self.band as i64;
        (0..=b)
            .map(|j| (self.coeff(j) - self.coeff(-j).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Keeps `lo <= j <= hi`.
    pub fn project_band(&self, lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "project_band needs lo <= hi");
        let mut out = self.clone();
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            let j = k as i64 - self.band as i64;
            if j < lo || j > hi {
                *c = ZERO;
            }
        }
        out
    }

    /// Strictly negative powers.
    pub fn negative_part(&self) -> Self {
        self.project_band(i64::MIN, -1)
    }

    /// Non-negative powers.
    pub fn nonnegative_part(&self) -> Self {
        self.project_band(0, i64::MAX)
    }

    /// Horner evaluation in `λ` and `λ⁻¹`.
    pub fn eval(&self, lambda: C64) -> Result<C64> {
        if lambda == ZERO {
            return Err(Error::ZeroArgument);
        }
        let b = self.band as i64;
        let mut pos = ZERO;
        for j in (0..=b).rev() {
            pos = pos * lambda + self.coeff(j);
        }
        let inv = lambda.inv();
        let mut neg = ZERO;
        for j in (1..=b).rev() {
            neg = neg * inv + self.coeff(-j);
        }
        Ok(pos + neg * inv)
    }

    /// Smallest and largest index carrying a coefficient above `tol`.
    pub fn support(&self, tol: f64) -> Option<(i64, i64)> {
        let mut it = self.iter().filter(|(_, c)| c.norm() > tol).map(|(j, _)| j);
        let first = it.next()?;
        let last = it.last().unwrap_or(first);
        Some((first, last))
    }
}

/// Coefficients `g_0, g_1, …` of `exp(Σ_{k>=1} a_k t^k)`, computed at least
/// through `min_len` and then until `EXP_TOL`-sized terms persist over a
/// window as wide as the input's support.
fn one_sided_exp(a: &[C64], min_len: usize) -> Result<Vec<C64>> {
    let width = a.iter().rposition(|c| *c != ZERO).map_or(0, |k| k + 1);
    let mut g = Vec::with_capacity(min_len + 32);
    g.push(ONE);
    let mut n = 0usize;
    loop {
        n += 1;
        let mut acc = ZERO;
        for k in 1..=width.min(n) {
            acc += a[k - 1] * g[n - k] * k as f64;
        }
        let gn = acc / n as f64;
        if !gn.is_finite() {
            return Err(Error::NonConvergent {
                terms: n,
                mass: f64::INFINITY,
            });
        }
        g.push(gn);
        if n >= min_len && n >= width {
            let scale = g.iter().fold(1.0_f64, |m, c| m.max(c.norm()));
            let quiet = g[n + 1 - width.max(1)..]
                .iter()
                .all(|c| c.norm() < EXP_TOL * scale * 1e-2);
            if quiet {
                return Ok(g);
            }
        }
        if n >= min_len + EXP_MAX_EXTENSION {
            let tail = g[n + 1 - width.max(1)..].iter().map(|c| c.norm()).sum();
            return Err(Error::NonConvergent {
                terms: n,
                mass: tail,
            });
        }
    }
}

impl Add for &LaurentLoop {
    type Output = LaurentLoop;

    fn add(self, rhs: &LaurentLoop) -> LaurentLoop {
        let band = self.band.max(rhs.band);
        LaurentLoop::from_fn(band, |j| self.coeff(j) + rhs.coeff(j))
    }
}

impl Sub for &LaurentLoop {
    type Output = LaurentLoop;

    fn sub(self, rhs: &LaurentLoop) -> LaurentLoop {
        let band = self.band.max(rhs.band);
        LaurentLoop::from_fn(band, |j| self.coeff(j) - rhs.coeff(j))
    }
}

impl Neg for &LaurentLoop {
    type Output = LaurentLoop;

    fn neg(self) -> LaurentLoop {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<C64> for &LaurentLoop {
    type Output = LaurentLoop;

    fn mul(self, rhs: C64) -> LaurentLoop {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn lam(power: i64) -> LaurentLoop {
        LaurentLoop::monomial(ONE, power, 4)
    }

    #[test]
    fn add_examples() {
        let s = &lam(-1) + &lam(1);
        assert_eq!(s.coeff(-1), ONE);
        assert_eq!(s.coeff(1), ONE);
        assert_eq!(s.coeff(0), ZERO);

        let f = LaurentLoop::from_fn(3, |j| c(j as f64, 1.0));
        assert_eq!(&f + &LaurentLoop::zero(1), f);

        let a = &LaurentLoop::one(2) + &lam(1);
        let b = &LaurentLoop::one(2) - &lam(1);
        let sum = &a + &b;
        assert_eq!(sum.coeff(0), c(2.0, 0.0));
        assert!(sum.iter().all(|(j, v)| j == 0 || v == ZERO));
        assert_eq!(sum.band(), 4);
    }

    #[test]
    fn mul_examples() {
        let p = lam(-1).mul(&lam(1), 4);
        assert_eq!(p.value.coeff(0), ONE);
        assert_eq!(p.discarded, 0.0);

        let one_plus = &LaurentLoop::one(1) + &lam(1);
        let sq = one_plus.mul(&one_plus, 2);
        assert_eq!(sq.value.coeff(0), ONE);
        assert_eq!(sq.value.coeff(1), c(2.0, 0.0));
        assert_eq!(sq.value.coeff(2), ONE);
        assert_eq!(sq.discarded, 0.0);

        let w = &lam(-1) + &lam(1);
        let t = w.mul(&w, 1);
        assert_eq!(t.value.coeff(0), c(2.0, 0.0));
        assert_eq!(t.value.coeff(1), ZERO);
        assert_eq!(t.value.band(), 1);
        assert_eq!(t.discarded, 2.0);
    }

    #[test]
    fn exp_of_zero_is_one() {
        let e = LaurentLoop::zero(3).exp(3).unwrap();
        assert_eq!(e.value, LaurentLoop::one(3));
    }

    #[test]
    fn exp_one_sided_is_exact() {
        let a = c(0.7, -0.3);
        let f = LaurentLoop::monomial(a, -1, 1);
        let e = f.exp(3).unwrap().value;
        assert_eq!(e.coeff(0), ONE);
        assert!((e.coeff(-1) - a).norm() < 1e-16);
        assert!((e.coeff(-2) - a * a / 2.0).norm() < 1e-16);
        assert!((e.coeff(-3) - a * a * a / 6.0).norm() < 1e-16);
        assert!(e.iter().all(|(j, v)| j <= 0 || v == ZERO));
    }

    #[test]
    fn exp_taylor_agrees_with_factored_exp() {
        let f = LaurentLoop::from_fn(2, |j| c(0.1 * j as f64, 0.05 * (j * j) as f64));
        let a = f.exp(20).unwrap().value;
        let b = f.exp_taylor(20).unwrap().value;
        assert!(a.max_diff(&b) < 1e-13, "{}", a.max_diff(&b));
    }

    #[test]
    fn exp_taylor_reports_nonconvergence() {
        let f = LaurentLoop::constant(c(60.0, 0.0), 0);
        assert!(matches!(
            f.exp_taylor(0),
            Err(Error::NonConvergent { .. })
        ));
    }

    #[test]
    fn conj_reflect_examples() {
        assert_eq!(lam(-1).conj_reflect(), lam(1));
        let i = LaurentLoop::constant(c(0.0, 1.0), 0);
        assert_eq!(i.conj_reflect().coeff(0), c(0.0, -1.0));
    }

    #[test]
    fn real_part_examples() {
        let z = c(0.3, 0.8);
        let f = LaurentLoop::monomial(z, -1, 1);
        let r = f.real_part();
        assert_eq!(r.coeff(-1), z * 0.5);
        assert_eq!(r.coeff(1), z.conj() * 0.5);
        let at_minus_one = r.eval(c(-1.0, 0.0)).unwrap();
        assert!((at_minus_one - c(-z.re, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn project_band_examples() {
        let f = &(&lam(-1) + &LaurentLoop::one(1)) + &lam(1);
        let p = f.project_band(0, i64::MAX);
        assert_eq!(p.coeff(-1), ZERO);
        assert_eq!(p.coeff(0), ONE);
        assert_eq!(p.coeff(1), ONE);
        assert_eq!(f.project_band(-4, 4), f);
    }

    #[test]
    fn eval_examples() {
        let w = &lam(-1) + &lam(1);
        assert_eq!(w.eval(ONE).unwrap(), c(2.0, 0.0));
        assert_eq!(w.eval(c(-1.0, 0.0)).unwrap(), c(-2.0, 0.0));
        assert_eq!(w.eval(ZERO), Err(Error::ZeroArgument));
    }

    #[test]
    fn from_coeffs_rejects_bad_input() {
        assert!(LaurentLoop::from_coeffs(1, vec![ONE; 2]).is_err());
        assert!(LaurentLoop::from_coeffs(0, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(LaurentLoop::from_coeffs(1, vec![ONE; 3]).is_ok());
    }

    #[test]
    fn with_band_reports_dropped_mass() {
        let f = LaurentLoop::from_fn(3, |j| c(j as f64, 0.0));
        let t = f.with_band(1);
        assert_eq!(t.value.band(), 1);
        assert_eq!(t.discarded, 2.0 + 3.0 + 2.0 + 3.0);
    }
}
