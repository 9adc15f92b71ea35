//! Global Birkhoff and Iwasawa factorizations in `ΛG(μ₁, μ₂)^ℂ`.
//!
//! Both splittings act on Fourier coefficients. `x³` is split additively; each
//! `x^k` is first untwisted by `exp(−μ_k x³_-)`, split, and twisted back. The
//! factors are infinite series even for band-limited input, so they are
//! computed on a working band that doubles until the mass that falls off the
//! band is below the tolerance.

use crate::error::{Error, Result};
use crate::laurent::{LaurentLoop, Truncated, C64, DEFAULT_BAND};
use crate::liegroup::{SolvLoopElement, SolvParams};

pub const RECONSTRUCT_TOL: f64 = 1e-10;
pub const REALITY_TOL: f64 = 1e-10;
pub const MAX_WORKING_BAND: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitOptions {
    /// Bound on the coefficient mass allowed to fall off the working band.
    pub tol: f64,
    /// Smallest working band tried.
    pub min_band: usize,
    pub max_band: usize,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions {
            tol: RECONSTRUCT_TOL,
            min_band: 2 * DEFAULT_BAND,
            max_band: MAX_WORKING_BAND,
        }
    }
}

/// `g = left · right`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub left: SolvLoopElement,
    pub right: SolvLoopElement,
    /// Working band the factors were computed on.
    pub band: usize,
    /// Upper bound for the mass that fell off that band.
    pub discarded: f64,
}

impl Factorization {
    /// `max |left·right − g|` over coefficients.
    pub fn reconstruction_error(&self, g: &SolvLoopElement) -> Result<f64> {
        let band = self.band.max(g.band());
        let prod = self.left.mul_band(&self.right, band)?.value;
        Ok(prod.max_diff(g))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealityCheck {
    pub real: bool,
    pub residual: f64,
}

/// `exp(s·f)` on `band`; exact one when `s = 0`.
fn twist_exp(f: &LaurentLoop, s: f64, band: usize) -> Result<Truncated<LaurentLoop>> {
    if s == 0.0 || f.is_zero() {
        return Ok(Truncated::exact(LaurentLoop::one(band)));
    }
    (f * C64::new(s, 0.0)).exp(band)
}

/// Product truncated to `band`, with the error from a truncated first factor folded in.
fn mul_tracked(a: &Truncated<LaurentLoop>, b: &LaurentLoop, band: usize) -> Truncated<LaurentLoop> {
    let p = a.value.mul(b, band);
    Truncated {
        value: p.value,
        discarded: p.discarded + a.discarded * b.mass(),
    }
}

/// `Σ_{j<0} (y_j λ^j + conj(y_j) λ^{-j})`.
fn real_negative(y: &LaurentLoop) -> LaurentLoop {
    let n = y.negative_part();
    &n + &n.conj_reflect()
}

fn adaptive<F>(g: &SolvLoopElement, opts: SplitOptions, context: &'static str, mut attempt: F) -> Result<Factorization>
where
    F: FnMut(usize) -> Result<Factorization>,
{
    let mut band = opts.min_band.max(2 * g.band()).max(1);
    loop {
        let f = attempt(band)?;
        if f.discarded <= opts.tol {
            return Ok(f);
        }
        if band >= opts.max_band {
            return Err(Error::BandOverflow {
                context,
                mass: f.discarded,
                tol: opts.tol,
                band,
            });
        }
        band = (2 * band).min(opts.max_band);
    }
}

fn check_params(g: &SolvLoopElement) -> Result<SolvParams> {
    for l in g.entries() {
        if l.coeffs().iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidLoop("non-finite coefficient".into()));
        }
    }
    Ok(g.params)
}

/// `g = g₋ g₊` with `g₋(∞) = e` and `g₊` holomorphic inside the unit disk.
pub fn birkhoff_split(g: &SolvLoopElement) -> Result<Factorization> {
    birkhoff_split_with(g, SplitOptions::default())
}

pub fn birkhoff_split_with(g: &SolvLoopElement, opts: SplitOptions) -> Result<Factorization> {
    let params = check_params(g)?;
    let x3m = g.x3.negative_part();
    let x3p = g.x3.nonnegative_part();
    adaptive(g, opts, "birkhoff_split", |band| {
        let mut discarded = 0.0;
        let mut minus = [LaurentLoop::zero(band), LaurentLoop::zero(band)];
        let mut plus = [LaurentLoop::zero(band), LaurentLoop::zero(band)];
        for k in 0..2 {
            let mu = params.mu(k);
            let xk = g.entry(k);
            let untwist = twist_exp(&x3m, -mu, band + xk.band())?;
            let hat = mul_tracked(&untwist, xk, band);
            let retwist = twist_exp(&x3m, mu, band)?;
            let m = mul_tracked(&retwist, &hat.value.negative_part(), band);
            discarded += hat.discarded * (1.0 + retwist.value.mass()) + m.discarded;
            minus[k] = m.value;
            plus[k] = hat.value.nonnegative_part();
        }
        let [m1, m2] = minus;
        let [p1, p2] = plus;
        Ok(Factorization {
            left: SolvLoopElement::new(m1, m2, x3m.widened(band), params),
            right: SolvLoopElement::new(p1, p2, x3p.widened(band), params),
            band,
            discarded,
        })
    })
}

/// `g = g̃ g₊` with `g̃` real on the unit circle and `g₊` holomorphic inside it.
pub fn iwasawa_split(g: &SolvLoopElement) -> Result<Factorization> {
    iwasawa_split_with(g, SplitOptions::default())
}

pub fn iwasawa_split_with(g: &SolvLoopElement, opts: SplitOptions) -> Result<Factorization> {
    let params = check_params(g)?;
    let x3r = real_negative(&g.x3);
    let x3p = &g.x3 - &x3r;
    adaptive(g, opts, "iwasawa_split", |band| {
        let mut discarded = 0.0;
        let mut real = [LaurentLoop::zero(band), LaurentLoop::zero(band)];
        let mut plus = [LaurentLoop::zero(band), LaurentLoop::zero(band)];
        for k in 0..2 {
            let mu = params.mu(k);
            let xk = g.entry(k);
            let untwist = twist_exp(&x3r, -mu, band + xk.band())?;
            let hat = mul_tracked(&untwist, xk, band);
            let r = real_negative(&hat.value);
            let retwist = twist_exp(&x3r, mu, band)?;
            let t = mul_tracked(&retwist, &r, band);
            discarded += hat.discarded * (2.0 + 2.0 * retwist.value.mass()) + t.discarded;
            real[k] = t.value;
            plus[k] = &hat.value - &r;
        }
        let [r1, r2] = real;
        let [p1, p2] = plus;
        Ok(Factorization {
            left: SolvLoopElement::new(r1, r2, x3r.widened(band), params),
            right: SolvLoopElement::new(p1, p2, x3p.widened(band), params),
            band,
            discarded,
        })
    })
}

pub fn check_reality(g: &SolvLoopElement) -> RealityCheck {
    check_reality_tol(g, REALITY_TOL)
}

pub fn check_reality_tol(g: &SolvLoopElement, tol: f64) -> RealityCheck {
    let residual = g.reality_defect();
    RealityCheck {
        real: residual <= tol,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::ZERO;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_splits_trivially() {
        let e = SolvLoopElement::identity(SolvParams::SOL3, 6);
        for f in [birkhoff_split(&e).unwrap(), iwasawa_split(&e).unwrap()] {
            assert_eq!(f.left.max_abs_entry(), 0.0);
            assert_eq!(f.right.max_abs_entry(), 0.0);
        }
    }

    #[test]
    fn plus_element_is_its_own_plus_factor() {
        let p = SolvParams::new(1.0, -2.0);
        let l = |a: f64| LaurentLoop::from_fn(4, |j| if j >= 0 { c(a / (1 + j) as f64, 0.3) } else { ZERO });
        let g = SolvLoopElement::new(l(0.5), l(-0.7), l(0.2), p);
        let f = birkhoff_split(&g).unwrap();
        assert_eq!(f.left.max_abs_entry(), 0.0);
        assert!(f.right.max_diff(&g) == 0.0);
    }

    #[test]
    fn scalar_iwasawa_instance() {
        let a = c(0.3, -0.4);
        let g = SolvLoopElement::new(
            LaurentLoop::zero(2),
            LaurentLoop::zero(2),
            LaurentLoop::monomial(a, -1, 2),
            SolvParams::H3,
        );
        let f = iwasawa_split(&g).unwrap();
        assert_eq!(f.left.x3.coeff(-1), a);
        assert_eq!(f.left.x3.coeff(1), a.conj());
        assert_eq!(f.right.x3.coeff(1), -a.conj());
        assert_eq!(f.right.x3.coeff(-1), ZERO);
    }

    #[test]
    fn reality_of_one_sided_loop() {
        let g = SolvLoopElement::new(
            LaurentLoop::monomial(c(1.0, 0.0), -1, 3),
            LaurentLoop::zero(3),
            LaurentLoop::zero(3),
            SolvParams::SOL3,
        );
        let r = check_reality(&g);
        assert!(!r.real);
        assert_eq!(r.residual, 1.0);
    }

    #[test]
    fn worked_birkhoff_example() {
        let (a, b, cc) = (c(0.6, 0.2), c(-0.3, 0.5), c(0.8, -0.1));
        let x3 = &LaurentLoop::monomial(a, -1, 4) + &LaurentLoop::constant(b, 4);
        let g = SolvLoopElement::new(
            LaurentLoop::monomial(cc, -1, 4),
            LaurentLoop::zero(4),
            x3,
            SolvParams::new(1.0, 0.0),
        );
        let f = birkhoff_split(&g).unwrap();
        assert!(f.reconstruction_error(&g).unwrap() < 1e-12);
        assert_eq!(f.left.x3.coeff(0), ZERO);
        assert_eq!(f.right.x3.coeff(0), b);
    }

    #[test]
    fn overflow_is_reported() {
        let g = SolvLoopElement::new(
            LaurentLoop::monomial(c(1.0, 0.0), 1, 2),
            LaurentLoop::zero(2),
            LaurentLoop::monomial(c(300.0, 0.0), -1, 2),
            SolvParams::H3,
        );
        let opts = SplitOptions {
            max_band: 64,
            ..SplitOptions::default()
        };
        assert!(matches!(
            birkhoff_split_with(&g, opts),
            Err(Error::BandOverflow { .. }) | Err(Error::NonConvergent { .. })
        ));
    }
}
