//! The solvable groups `G(μ₁, μ₂)` in the coordinates `(x¹, x², x³)` of
//!
//! ```text
//! ⎡ e^{μ₁x³}    0       x¹ ⎤
//! ⎢    0     e^{μ₂x³}   x² ⎥
//! ⎣    0        0       1  ⎦
//! ```
//!
//! together with their complexified loop groups.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{LaurentLoop, Truncated, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolvParams {
    pub mu1: f64,
    pub mu2: f64,
}

impl SolvParams {
    /// `Sol₃ = G(1, −1)`.
    pub const SOL3: SolvParams = SolvParams { mu1: 1.0, mu2: -1.0 };
    /// Hyperbolic space `H³ = G(1, 1)`.
    pub const H3: SolvParams = SolvParams { mu1: 1.0, mu2: 1.0 };

    pub const fn new(mu1: f64, mu2: f64) -> Self {
        SolvParams { mu1, mu2 }
    }

    /// `μ_k` for `k = 0, 1`.
    pub fn mu(&self, k: usize) -> f64 {
        match k {
            0 => self.mu1,
            1 => self.mu2,
            _ => panic!("SolvParams::mu index {k} out of range"),
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.mu1 == 0.0 && self.mu2 == 0.0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ParamMismatch {
                a1: self.mu1,
                a2: self.mu2,
                b1: other.mu1,
                b2: other.mu2,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolvPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl SolvPoint {
    pub const IDENTITY: SolvPoint = SolvPoint {
        x1: 0.0,
        x2: 0.0,
        x3: 0.0,
    };

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        SolvPoint { x1, x2, x3 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        SolvPoint::new(a[0], a[1], a[2])
    }

    pub fn matrix(&self, params: SolvParams) -> Matrix3<f64> {
        Matrix3::new(
            (params.mu1 * self.x3).exp(),
            0.0,
            self.x1,
            0.0,
            (params.mu2 * self.x3).exp(),
            self.x2,
            0.0,
            0.0,
            1.0,
        )
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        (self.x1 - other.x1)
            .abs()
            .max((self.x2 - other.x2).abs())
            .max((self.x3 - other.x3).abs())
    }
}

pub fn solv_mul(params: SolvParams, a: &SolvPoint, b: &SolvPoint) -> SolvPoint {
    SolvPoint {
        x1: a.x1 + (params.mu1 * a.x3).exp() * b.x1,
        x2: a.x2 + (params.mu2 * a.x3).exp() * b.x2,
        x3: a.x3 + b.x3,
    }
}

pub fn solv_inv(params: SolvParams, a: &SolvPoint) -> SolvPoint {
    SolvPoint {
        x1: -(-params.mu1 * a.x3).exp() * a.x1,
        x2: -(-params.mu2 * a.x3).exp() * a.x2,
        x3: -a.x3,
    }
}

/// Group law on complexified coordinates.
pub fn solv_mul_c(params: SolvParams, a: &[C64; 3], b: &[C64; 3]) -> [C64; 3] {
    [
        a[0] + (a[2] * params.mu1).exp() * b[0],
        a[1] + (a[2] * params.mu2).exp() * b[1],
        a[2] + b[2],
    ]
}

pub fn solv_inv_c(params: SolvParams, a: &[C64; 3]) -> [C64; 3] {
    [
        -(a[2] * -params.mu1).exp() * a[0],
        -(a[2] * -params.mu2).exp() * a[1],
        -a[2],
    ]
}

/// An element of `ΛG(μ₁, μ₂)^ℂ`, each coordinate a band-limited Laurent loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvLoopElement {
    pub x1: LaurentLoop,
    pub x2: LaurentLoop,
    pub x3: LaurentLoop,
    pub params: SolvParams,
}

impl SolvLoopElement {
    pub fn new(x1: LaurentLoop, x2: LaurentLoop, x3: LaurentLoop, params: SolvParams) -> Self {
        SolvLoopElement { x1, x2, x3, params }
    }

    pub fn identity(params: SolvParams, band: usize) -> Self {
        let z = LaurentLoop::zero(band);
        SolvLoopElement::new(z.clone(), z.clone(), z, params)
    }

    /// The constant loop at a (possibly complex) point.
    pub fn constant(params: SolvParams, point: [C64; 3], band: usize) -> Self {
        SolvLoopElement::new(
            LaurentLoop::constant(point[0], band),
            LaurentLoop::constant(point[1], band),
            LaurentLoop::constant(point[2], band),
            params,
        )
    }

    /// Largest band among the three entries.
    pub fn band(&self) -> usize {
        self.x1.band().max(self.x2.band()).max(self.x3.band())
    }

    /// Entry `k` in `0..3`.
    pub fn entry(&self, k: usize) -> &LaurentLoop {
        match k {
            0 => &self.x1,
            1 => &self.x2,
            2 => &self.x3,
            _ => panic!("SolvLoopElement entry {k} out of range"),
        }
    }

    pub fn entries(&self) -> [&LaurentLoop; 3] {
        [&self.x1, &self.x2, &self.x3]
    }

    pub fn with_band(&self, band: usize) -> Truncated<Self> {
        let [a, b, c] = self.entries().map(|l| l.with_band(band));
        Truncated {
            discarded: a.discarded + b.discarded + c.discarded,
            value: SolvLoopElement::new(a.value, b.value, c.value, self.params),
        }
    }

    /// `e^{s·x³} · y` computed with enough band that every retained coefficient is exact
    /// up to the exponential's own truncation.
    fn twist(x3: &LaurentLoop, s: f64, y: &LaurentLoop, out_band: usize) -> Result<Truncated<LaurentLoop>> {
        if s == 0.0 || x3.is_zero() {
            return Ok(y.with_band(out_band));
        }
        let e = (x3 * C64::new(s, 0.0)).exp(out_band + y.band())?;
        let prod = e.value.mul(y, out_band);
        Ok(Truncated {
            value: prod.value,
            discarded: prod.discarded + e.discarded * y.mass(),
        })
    }

    /// Group product truncated to `out_band`.
    pub fn mul_band(&self, other: &Self, out_band: usize) -> Result<Truncated<Self>> {
        self.params.check(&other.params)?;
        let t1 = Self::twist(&self.x3, self.params.mu1, &other.x1, out_band)?;
        let t2 = Self::twist(&self.x3, self.params.mu2, &other.x2, out_band)?;
        let x1 = (&self.x1 + &t1.value).with_band(out_band);
        let x2 = (&self.x2 + &t2.value).with_band(out_band);
        let x3 = (&self.x3 + &other.x3).with_band(out_band);
        Ok(Truncated {
            discarded: t1.discarded + t2.discarded + x1.discarded + x2.discarded + x3.discarded,
            value: SolvLoopElement::new(x1.value, x2.value, x3.value, self.params),
        })
    }

    /// Group product at the larger of the two bands.
    pub fn mul(&self, other: &Self) -> Result<Truncated<Self>> {
        self.mul_band(other, self.band().max(other.band()))
    }

    pub fn inv_band(&self, out_band: usize) -> Result<Truncated<Self>> {
        let t1 = Self::twist(&self.x3, -self.params.mu1, &self.x1, out_band)?;
        let t2 = Self::twist(&self.x3, -self.params.mu2, &self.x2, out_band)?;
        let x3 = (-&self.x3).with_band(out_band);
        Ok(Truncated {
            discarded: t1.discarded + t2.discarded + x3.discarded,
            value: SolvLoopElement::new(-&t1.value, -&t2.value, x3.value, self.params),
        })
    }

    pub fn inv(&self) -> Result<Truncated<Self>> {
        self.inv_band(self.band())
    }

    /// Complex coordinates at `λ`.
    pub fn eval(&self, lambda: C64) -> Result<[C64; 3]> {
        Ok([
            self.x1.eval(lambda)?,
            self.x2.eval(lambda)?,
            self.x3.eval(lambda)?,
        ])
    }

    /// The 3×3 matrix at `λ`.
    pub fn eval_matrix(&self, lambda: C64) -> Result<Matrix3<C64>> {
        let [a, b, c] = self.eval(lambda)?;
        Ok(Matrix3::new(
            (c * self.params.mu1).exp(),
            ZERO,
            a,
            ZERO,
            (c * self.params.mu2).exp(),
            b,
            ZERO,
            ZERO,
            ONE,
        ))
    }

    /// Max coefficient difference over the three entries.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.x1
            .max_diff(&other.x1)
            .max(self.x2.max_diff(&other.x2))
            .max(self.x3.max_diff(&other.x3))
    }

    /// Largest coefficient modulus over all entries.
    pub fn max_abs_entry(&self) -> f64 {
        self.entries().iter().map(|l| l.max_abs()).fold(0.0, f64::max)
    }

    /// Max of `|x_j − conj(x_{−j})|` over all entries.
    pub fn reality_defect(&self) -> f64 {
        self.entries()
            .iter()
            .map(|l| l.reality_defect())
            .fold(0.0, f64::max)
    }
}
