//! Explicit representation of the harmonic maps generated by a normalized
//! potential, and recovery of the potential from a map.
//!
//! With `Ξ = ∫_{z_*}^z ξ³` and
//! `g^k(λ) = λ⁻¹ e^{−μ_k(λ⁻¹Ξ + λΞ̄)} ∫_{z_*}^z ξ^k(t) e^{λ⁻¹μ_kΞ(t)} dt`,
//! the map is `φ³ = −4 Re Ξ`, `φ^k = e^{−2μ_k Re Ξ}(f̃^k(−1) − f̃^k(1))` where
//! `f̃^k = 2 Re(g^k_-)` is the real part of the negative half of `g^k`.
//!
//! The integrals are evaluated by Gauss-Legendre quadrature along the segment,
//! independently of the exact antiderivatives used by the frame route.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::pipeline::Domain;
use super::poly::HoloPoly;
use super::quad::gauss_legendre;
use super::step1::PotentialSpec;
use crate::error::{Error, Result};
use crate::laurent::{LaurentLoop, C64, ONE, ZERO};
use crate::liegroup::{SolvParams, SolvPoint};

const PANELS: usize = 4;
const NODES: usize = 24;
/// Bound on the neglected tail of the `λ`-expansion of the integral.
const SERIES_TOL: f64 = 1e-17;
const MAX_TERMS: usize = 400;

/// A map given on complexified arguments: `value(z, z̄)` is the map at `z`, and the
/// value is holomorphic in each argument separately.
pub trait PolarizedMap: Sync {
    fn value(&self, z: C64, w: C64) -> Result<[C64; 3]>;
}

impl<F> PolarizedMap for F
where
    F: Fn(C64, C64) -> [C64; 3] + Sync,
{
    fn value(&self, z: C64, w: C64) -> Result<[C64; 3]> {
        Ok(self(z, w))
    }
}

/// One side of the closed form: the data `(ξ^k, Ξ)` evaluated in one argument
/// and `Ξ̄` in the other.
#[derive(Debug, Clone)]
struct Side {
    xi: [HoloPoly; 2],
    big_xi: HoloPoly,
    base: C64,
}

/// Closed-form harmonic map of a normalized potential.
#[derive(Debug, Clone)]
pub struct ClosedFormMap {
    params: SolvParams,
    holo: Side,
    anti: Side,
    nodes: (Vec<f64>, Vec<f64>),
}

impl ClosedFormMap {
    pub fn new(pot: &PotentialSpec) -> Self {
        let anti_xi = pot.xi[2].antiderivative();
        let big_xi = anti_xi.add(&HoloPoly::constant(-anti_xi.eval(pot.base_point)));
        let holo = Side {
            xi: [pot.xi[0].clone(), pot.xi[1].clone()],
            big_xi: big_xi.clone(),
            base: pot.base_point,
        };
        let anti = Side {
            xi: [pot.xi[0].conj_coeffs(), pot.xi[1].conj_coeffs()],
            big_xi: big_xi.conj_coeffs(),
            base: pot.base_point.conj(),
        };
        ClosedFormMap {
            params: pot.params,
            holo,
            anti,
            nodes: gauss_legendre(NODES),
        }
    }

    pub fn params(&self) -> SolvParams {
        self.params
    }

    /// `h_m = ∫_{base}^{a} ξ(t) (μΞ(t))^m / m! dt` by composite Gauss-Legendre.
    fn series(&self, side: &Side, k: usize, mu: f64, a: C64) -> Result<Vec<C64>> {
        let xi = &side.xi[k];
        if xi.is_zero() {
            return Ok(Vec::new());
        }
        let dz = a - side.base;
        let (x, w) = &self.nodes;
        let mut samples = Vec::with_capacity(PANELS * NODES);
        for p in 0..PANELS {
            for (xi_n, wi) in x.iter().zip(w) {
                let s = (p as f64 + 0.5 * (xi_n + 1.0)) / PANELS as f64;
                let t = side.base + dz * s;
                let weight = dz * (wi * 0.5 / PANELS as f64);
                samples.push((xi.eval(t) * weight, side.big_xi.eval(t) * mu));
            }
        }
        // |Σ_m≥M| ≤ Σ|ξ w| · r^M/M! with r = max |μΞ| along the segment
        let r = samples.iter().fold(0.0_f64, |m, s| m.max(s.1.norm()));
        let scale: f64 = samples.iter().map(|s| s.0.norm()).sum();
        let mut terms = Vec::new();
        let mut bound = scale;
        let mut powers: Vec<C64> = samples.iter().map(|s| s.0).collect();
        for m in 0..MAX_TERMS {
            if m > 0 {
                for (p, s) in powers.iter_mut().zip(&samples) {
                    *p = *p * s.1 / m as f64;
                }
                bound *= r / m as f64;
            }
            terms.push(powers.iter().sum());
            if bound < SERIES_TOL && m as f64 > r {
                return Ok(terms);
            }
        }
        Err(Error::BandOverflow {
            context: "closed_form_map",
            mass: bound,
            tol: SERIES_TOL,
            band: MAX_TERMS,
        })
    }

    /// Negative part of `g^k` with `ξ^k, Ξ` taken at `a` and `Ξ̄` at `b`.
    fn negative_part(&self, side: &Side, other: &Side, k: usize, a: C64, b: C64) -> Result<LaurentLoop> {
        let mu = self.params.mu(k);
        let h = self.series(side, k, mu, a)?;
        if h.is_empty() {
            return Ok(LaurentLoop::zero(1));
        }
        let band = 2 * h.len() + 32;
        let mut hl = LaurentLoop::zero(band);
        for (m, c) in h.iter().enumerate() {
            hl.set(-(m as i64) - 1, *c);
        }
        let mut expo = LaurentLoop::zero(1);
        expo.set(-1, -side.big_xi.eval(a) * mu);
        expo.set(1, -other.big_xi.eval(b) * mu);
        let e = expo.exp(band)?;
        Ok(e.value.mul(&hl, band).value.negative_part())
    }

    /// The real map at `z`, via the real part of the scalar splitting.
    pub fn point(&self, z: C64) -> Result<SolvPoint> {
        let xi = self.holo.big_xi.eval(z);
        let mut out = [0.0; 3];
        out[2] = -4.0 * xi.re;
        for k in 0..2 {
            let n = self.negative_part(&self.holo, &self.anti, k, z, z.conj())?;
            let f = &n.real_part() * C64::new(2.0, 0.0);
            let diff = f.eval(-ONE)? - f.eval(ONE)?;
            out[k] = (-2.0 * self.params.mu(k) * xi.re).exp() * diff.re;
        }
        Ok(SolvPoint::from_array(out))
    }
}

impl PolarizedMap for ClosedFormMap {
    fn value(&self, z: C64, w: C64) -> Result<[C64; 3]> {
        let s = self.holo.big_xi.eval(z) + self.anti.big_xi.eval(w);
        let mut out = [ZERO; 3];
        out[2] = s * -2.0;
        for (k, o) in out.iter_mut().take(2).enumerate() {
            let n = self.negative_part(&self.holo, &self.anti, k, z, w)?;
            let nc = self.negative_part(&self.anti, &self.holo, k, w, z)?;
            // Σ_{j<0} ((−1)^j − 1)(n_j + n*_j)
            let mut acc = ZERO;
            for j in (1..=n.band().max(nc.band()) as i64).step_by(2) {
                acc += n.coeff(-j) + nc.coeff(-j);
            }
            *o = (s * -self.params.mu(k)).exp() * acc * -2.0;
        }
        Ok(out)
    }
}

/// The closed-form map of `pot` at `z`.
pub fn closed_form_map(pot: &PotentialSpec, z: C64) -> Result<SolvPoint> {
    ClosedFormMap::new(pot).point(z)
}

const CAUCHY_POINTS: usize = 16;

/// `∂f/∂z` of a holomorphic function by the trapezoid rule on a circle of radius `r`.
fn cauchy_derivative(f: impl Fn(C64) -> Result<[C64; 3]>, z: C64, r: f64, n: usize) -> Result<[C64; 3]> {
    let mut acc = [ZERO; 3];
    for j in 0..n {
        let w = C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
        let v = f(z + w * r)?;
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b / w;
        }
    }
    Ok(acc.map(|a| a / (r * n as f64)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionOptions {
    /// Integration region for the Cauchy-transform term.
    pub domain: Domain,
    pub nx: usize,
    pub ny: usize,
    /// Radius of the circles used to differentiate the polarized map.
    pub radius: f64,
}

impl ExtractionOptions {
    pub fn new(domain: Domain, nx: usize, ny: usize) -> Self {
        ExtractionOptions {
            domain,
            nx,
            ny,
            radius: 0.05,
        }
    }

    fn cell(&self) -> (f64, f64) {
        (
            (self.domain.x_max - self.domain.x_min) / self.nx as f64,
            (self.domain.y_max - self.domain.y_min) / self.ny as f64,
        )
    }
}

/// Recovers the normalized potential `(ξ¹, ξ², ξ³)(z)` from a polarized map with
/// `φ(z_*) = e`:
///
/// `ξ³ = −½ φ³_z(z, 0)`,
/// `ξ^k = −½ e^{−½μ_kφ³(z,0)} φ^k_z(z, 0) + μ_k φ³_z(z,0)/(8πi) ∫ e^{−½μ_kφ³} ∂_ξ̄φ^k /(ξ − z) dξ∧dξ̄`.
///
/// The area integral is a midpoint sum over the cells of `opts.domain`, skipping
/// cells whose centre is within one cell size of `z`.
pub fn extract_normalized_potential(
    map: &dyn PolarizedMap,
    params: SolvParams,
    opts: &ExtractionOptions,
    z: C64,
) -> Result<[C64; 3]> {
    opts.domain.validate()?;
    if opts.nx < 5 || opts.ny < 5 {
        return Err(Error::GridTooSmall {
            nx: opts.nx,
            ny: opts.ny,
        });
    }
    let (hx, hy) = opts.cell();
    let h = hx.max(hy);
    let dist = opts.domain.distance_to_edge(z);
    if dist < 2.0 * h {
        return Err(Error::SingularityTooClose {
            distance: dist,
            limit: 2.0 * h,
        });
    }
    let at_zero = map.value(z, ZERO)?;
    let dz = cauchy_derivative(|t| map.value(t, ZERO), z, opts.radius, CAUCHY_POINTS)?;
    let mut xi = [ZERO; 3];
    xi[2] = dz[2] * -0.5;
    for k in 0..2 {
        let mu = params.mu(k);
        let local = (at_zero[2] * (-0.5 * mu)).exp() * dz[k] * -0.5;
        let prefactor = dz[2] * mu / (C64::new(0.0, 8.0 * PI));
        let integral = if prefactor == ZERO {
            ZERO
        } else {
            cauchy_transform(map, opts, k, mu, z, hx, hy)?
        };
        xi[k] = local + prefactor * integral;
    }
    Ok(xi)
}

fn cauchy_transform(
    map: &dyn PolarizedMap,
    opts: &ExtractionOptions,
    k: usize,
    mu: f64,
    z: C64,
    hx: f64,
    hy: f64,
) -> Result<C64> {
    let h = hx.max(hy);
    // dξ∧dξ̄ = −2i dx dy
    let area = C64::new(0.0, -2.0 * hx * hy);
    let r = opts.radius.min(0.25 * h.max(1e-3));
    let rows: Vec<Result<C64>> = (0..opts.ny)
        .into_par_iter()
        .map(|iy| {
            let mut acc = ZERO;
            for ix in 0..opts.nx {
                let p = C64::new(
                    opts.domain.x_min + (ix as f64 + 0.5) * hx,
                    opts.domain.y_min + (iy as f64 + 0.5) * hy,
                );
                if (p - z).norm() < h {
                    continue;
                }
                let v = map.value(p, p.conj())?;
                let dw = cauchy_derivative(|w| map.value(p, w), p.conj(), r, 8)?;
                acc += (v[2] * (-0.5 * mu)).exp() * dw[k] / (p - z);
            }
            Ok(acc)
        })
        .collect();
    let mut total = ZERO;
    for r in rows {
        total += r?;
    }
    Ok(total * area)
}
