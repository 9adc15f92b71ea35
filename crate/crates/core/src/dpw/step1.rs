//! The holomorphic frame `C(z, λ)` solving `dC = C λ⁻¹ξ dz`, `C(z_*) = e`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::poly::HoloPoly;
use crate::error::{Error, Result};
use crate::laurent::{LaurentLoop, C64, DEFAULT_BAND, ZERO};
use crate::liegroup::{SolvLoopElement, SolvParams};

/// Required magnitude of the last retained Step-1 coefficient.
pub const TAIL_TOL: f64 = 1e-12;
/// Largest band the adaptive Step-1 solve escalates to.
pub const STEP1_MAX_BAND: usize = 96;

/// Normalized potential `ξ = (ξ¹, ξ², ξ³)` on `G(μ₁, μ₂)` with base point `z_*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub xi: [HoloPoly; 3],
    pub params: SolvParams,
    pub base_point: C64,
    pub band: usize,
}

impl PotentialSpec {
    pub fn new(xi: [HoloPoly; 3], params: SolvParams, base_point: C64, band: usize) -> Result<Self> {
        if band < 2 {
            return Err(Error::InvalidInput(format!("band {band} is below 2")));
        }
        if !base_point.is_finite() {
            return Err(Error::InvalidInput("non-finite base point".into()));
        }
        Ok(PotentialSpec {
            xi,
            params,
            base_point,
            band,
        })
    }

    /// Constant potential at `z_* = 0` and the default band.
    pub fn constant(xi: [C64; 3], params: SolvParams) -> Self {
        PotentialSpec {
            xi: xi.map(HoloPoly::constant),
            params,
            base_point: ZERO,
            band: DEFAULT_BAND,
        }
    }

    /// `ξ = (−1/4, i/4, 0)`, which generates the plane `(x, y, 0)`.
    pub fn plane(params: SolvParams) -> Self {
        Self::constant([C64::new(-0.25, 0.0), C64::new(0.0, 0.25), ZERO], params)
    }

    pub fn with_band(mut self, band: usize) -> Self {
        self.band = band;
        self
    }

    /// The matrix `ξ(z)` of the potential.
    pub fn matrix(&self, z: C64) -> Matrix3<C64> {
        let [a, b, c] = [0, 1, 2].map(|k| self.xi[k].eval(z));
        Matrix3::new(
            c * self.params.mu1,
            ZERO,
            a,
            ZERO,
            c * self.params.mu2,
            b,
            ZERO,
            ZERO,
            ZERO,
        )
    }

    /// `Ξ(z) = ∫_{z_*}^z ξ³`.
    pub fn big_xi(&self, z: C64) -> C64 {
        integrate_xi(&self.xi[2], self.base_point, z)
    }
}

/// `∫_{z_*}^z ξ³(t) dt`.
pub fn integrate_xi(xi3: &HoloPoly, base: C64, z: C64) -> C64 {
    xi3.integrate(base, z)
}

/// Antiderivatives of `ξ^k (μ_k Ξ)^m / m!`, prepared once per potential.
#[derive(Debug, Clone)]
pub struct Step1Kernel {
    pot: PotentialSpec,
    xi_anti: HoloPoly,
    /// `series[k][m]`, normalized to vanish at `z_*`.
    series: [Vec<HoloPoly>; 2],
    max_band: usize,
}

impl Step1Kernel {
    pub fn new(pot: &PotentialSpec, max_band: usize) -> Self {
        let max_band = max_band.max(pot.band);
        let xi_anti = pot.xi[2].antiderivative();
        let big_xi = xi_anti.add(&HoloPoly::constant(-xi_anti.eval(pot.base_point)));
        let series = [0, 1].map(|k| {
            let mu = pot.params.mu(k);
            let xk = &pot.xi[k];
            let mut out = Vec::new();
            if xk.is_zero() {
                return out;
            }
            let step = big_xi.scale(C64::new(mu, 0.0));
            let mut integrand = xk.clone();
            for m in 0..max_band {
                if m > 0 {
                    integrand = integrand.mul(&step).scale(C64::new(1.0 / m as f64, 0.0));
                }
                if integrand.is_zero() {
                    break;
                }
                let anti = integrand.antiderivative();
                let shift = anti.eval(pot.base_point);
                out.push(anti.add(&HoloPoly::constant(-shift)));
            }
            out
        });
        Step1Kernel {
            pot: pot.clone(),
            xi_anti,
            series,
            max_band,
        }
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.pot
    }

    pub fn max_band(&self) -> usize {
        self.max_band
    }

    pub fn big_xi(&self, z: C64) -> C64 {
        self.xi_anti.eval(z) - self.xi_anti.eval(self.pot.base_point)
    }

    /// `∫_{z_*}^z ξ^k (μ_k Ξ)^m / m!`.
    pub fn coefficient(&self, k: usize, m: usize, z: C64) -> C64 {
        self.series[k].get(m).map_or(ZERO, |p| p.eval(z))
    }

    /// `C(z, ·)` on the potential's own band; fails if the tail is not yet below [`TAIL_TOL`].
    pub fn solve_strict(&self, z: C64) -> Result<SolvLoopElement> {
        self.solve_up_to(z, self.pot.band, self.pot.band)
    }

    /// `C(z, ·)` on the smallest band `N·2^j ≤ max_band` whose tail is below [`TAIL_TOL`].
    pub fn solve(&self, z: C64) -> Result<SolvLoopElement> {
        self.solve_up_to(z, self.pot.band, self.max_band)
    }

    fn solve_up_to(&self, z: C64, start: usize, cap: usize) -> Result<SolvLoopElement> {
        let cap = cap.min(self.max_band).max(start);
        let mut band = start;
        let mut cols: [Vec<C64>; 2] = [Vec::new(), Vec::new()];
        loop {
            for (k, col) in cols.iter_mut().enumerate() {
                while col.len() < band {
                    let m = col.len();
                    col.push(self.coefficient(k, m, z));
                }
            }
            let tail = cols
                .iter()
                .flat_map(|c| c[band.saturating_sub(2)..band].iter())
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            if !tail.is_finite() {
                return Err(Error::NonConvergent {
                    terms: band,
                    mass: tail,
                });
            }
            if tail <= TAIL_TOL {
                break;
            }
            if band >= cap {
                return Err(Error::BandOverflow {
                    context: "solve_step1",
                    mass: tail,
                    tol: TAIL_TOL,
                    band,
                });
            }
            band = (2 * band).min(cap);
        }
        let entry = |col: &[C64]| {
            let mut l = LaurentLoop::zero(band);
            for (m, &c) in col.iter().take(band).enumerate() {
                l.set(-(m as i64) - 1, c);
            }
            l
        };
        Ok(SolvLoopElement::new(
            entry(&cols[0]),
            entry(&cols[1]),
            LaurentLoop::monomial(self.big_xi(z), -1, band),
            self.pot.params,
        ))
    }
}

/// Step 1 on the potential's band, rejecting an insufficient band.
pub fn solve_step1(pot: &PotentialSpec, z: C64) -> Result<SolvLoopElement> {
    Step1Kernel::new(pot, pot.band).solve_strict(z)
}

/// Step 1, doubling the band up to `max_band` until the tail is small enough.
pub fn solve_step1_adaptive(pot: &PotentialSpec, z: C64, max_band: usize) -> Result<SolvLoopElement> {
    Step1Kernel::new(pot, max_band).solve(z)
}

/// Classical RK4 for `dC/ds = C λ⁻¹ξ(z(s)) (z − z_*)` along `z(s) = z_* + s(z − z_*)`.
pub fn ode_oracle(pot: &PotentialSpec, z: C64, lambda: C64, n_steps: usize) -> Result<Matrix3<C64>> {
    if lambda == ZERO {
        return Err(Error::ZeroArgument);
    }
    if n_steps < 16 {
        return Err(Error::InvalidInput(format!("{n_steps} RK4 steps; need at least 16")));
    }
    let dz = z - pot.base_point;
    let scale = dz / lambda;
    let rhs = |s: f64, c: &Matrix3<C64>| -> Matrix3<C64> {
        c * pot.matrix(pot.base_point + dz * s) * scale
    };
    let h = 1.0 / n_steps as f64;
    let mut c = Matrix3::<C64>::identity();
    for i in 0..n_steps {
        let s = i as f64 * h;
        let k1 = rhs(s, &c);
        let k2 = rhs(s + 0.5 * h, &(c + k1 * C64::new(0.5 * h, 0.0)));
        let k3 = rhs(s + 0.5 * h, &(c + k2 * C64::new(0.5 * h, 0.0)));
        let k4 = rhs(s + h, &(c + k3 * C64::new(h, 0.0)));
        let two = C64::new(2.0, 0.0);
        c += (k1 + k2 * two + k3 * two + k4) * C64::new(h / 6.0, 0.0);
    }
    Ok(c)
}
