//! Steps 2 and 3 and the grid driver.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::step1::{PotentialSpec, Step1Kernel, STEP1_MAX_BAND};
use crate::error::{Error, Result};
use crate::laurent::{LaurentLoop, Truncated, C64, ONE};
use crate::liegroup::{solv_inv_c, solv_mul_c, SolvLoopElement, SolvPoint};
use crate::loopfactor::{iwasawa_split_with, Factorization, SplitOptions};

/// Coefficient mass below which frame tails are trimmed before storage.
const TRIM_TOL: f64 = 1e-15;

/// `C = F · W₊` with `F` real on the unit circle.
pub fn step2_iwasawa(c: &SolvLoopElement) -> Result<Factorization> {
    iwasawa_split_with(c, SplitOptions::default())
}

/// `F̂(λ) = F(λ) F(1)⁻¹`.
pub fn step3_extended(f: &SolvLoopElement) -> Result<Truncated<SolvLoopElement>> {
    let at_one = f.eval(ONE)?;
    let inv = solv_inv_c(f.params, &at_one);
    let lifted = SolvLoopElement::new(
        LaurentLoop::constant(inv[0], 0),
        LaurentLoop::constant(inv[1], 0),
        LaurentLoop::constant(inv[2], 0),
        f.params,
    );
    f.mul_band(&lifted, f.band())
}

/// Drops outer coefficients while their total stays below `tol`.
pub fn trimmed(g: &SolvLoopElement, tol: f64) -> SolvLoopElement {
    let mut band = g.band();
    while band > 1 {
        let t = g.with_band(band - 1);
        if t.discarded > tol {
            break;
        }
        band -= 1;
    }
    g.with_band(band).value
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Domain {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Domain {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    /// `[−r, r]²`.
    pub const fn square(r: f64) -> Self {
        Domain::new(-r, r, -r, r)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("degenerate domain {self:?}")))
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        (self.x_min..=self.x_max).contains(&z.re) && (self.y_min..=self.y_max).contains(&z.im)
    }

    /// Distance from `z` to the boundary of the rectangle.
    pub fn distance_to_edge(&self, z: C64) -> f64 {
        let dx = (z.re - self.x_min).abs().min((z.re - self.x_max).abs());
        let dy = (z.im - self.y_min).abs().min((z.im - self.y_max).abs());
        if self.contains(z) {
            dx.min(dy)
        } else {
            let ox = (self.x_min - z.re).max(z.re - self.x_max).max(0.0);
            let oy = (self.y_min - z.im).max(z.im - self.y_max).max(0.0);
            ox.hypot(oy)
        }
    }
}

/// Uniform sample lattice over a rectangle, row-major with `x` fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub domain: Domain,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(domain: Domain, nx: usize, ny: usize) -> Result<Self> {
        domain.validate()?;
        if nx < 5 || ny < 5 {
            return Err(Error::GridTooSmall { nx, ny });
        }
        Ok(GridSpec { domain, nx, ny })
    }

    pub fn hx(&self) -> f64 {
        (self.domain.x_max - self.domain.x_min) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.domain.y_max - self.domain.y_min) / (self.ny - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn point(&self, ix: usize, iy: usize) -> C64 {
        C64::new(
            self.domain.x_min + ix as f64 * self.hx(),
            self.domain.y_min + iy as f64 * self.hy(),
        )
    }

    pub fn point_at(&self, idx: usize) -> C64 {
        self.point(idx % self.nx, idx / self.nx)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSlice {
    pub lambda: C64,
    pub points: Vec<Option<SolvPoint>>,
}

/// Samples of the harmonic map; `None` marks cells where the pipeline failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapGrid {
    pub grid: GridSpec,
    pub points: Vec<Option<SolvPoint>>,
    pub lambda_slices: Vec<LambdaSlice>,
}

impl MapGrid {
    pub fn from_fn(grid: GridSpec, f: impl Fn(C64) -> SolvPoint + Sync) -> Self {
        let points = (0..grid.len())
            .into_par_iter()
            .map(|i| Some(f(grid.point_at(i))))
            .collect();
        MapGrid {
            grid,
            points,
            lambda_slices: Vec::new(),
        }
    }

    pub fn masked_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_none()).count()
    }

    pub fn masked_fraction(&self) -> f64 {
        self.masked_count() as f64 / self.points.len().max(1) as f64
    }

    pub fn get(&self, ix: usize, iy: usize) -> Option<SolvPoint> {
        self.points[self.grid.index(ix, iy)]
    }

    /// Coordinate `k` as a dense field; masked cells become NaN.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| p.map_or(f64::NAN, |p| p.to_array()[k]))
            .collect()
    }

    /// The same grid carrying the slice at `index` as its base map.
    pub fn slice_grid(&self, index: usize) -> MapGrid {
        MapGrid {
            grid: self.grid,
            points: self.lambda_slices[index].points.clone(),
            lambda_slices: Vec::new(),
        }
    }
}

/// Extended solutions `F̂(z, ·)` per grid point, normalized by `F̂(·, 1) = e`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedFrame {
    pub grid: GridSpec,
    pub frames: Vec<Option<SolvLoopElement>>,
}

impl ExtendedFrame {
    /// Largest deviation of `F̂(1)` from the identity.
    pub fn normalization_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for f in self.frames.iter().flatten() {
            let v = f.eval(ONE)?;
            worst = worst.max(v.iter().map(|c| c.norm()).fold(0.0, f64::max));
        }
        Ok(worst)
    }
}

/// `e^{2πik/8}`, `k = 0..8`.
pub fn default_lambdas() -> Vec<C64> {
    (0..8).map(|k| C64::from_polar(1.0, PI * k as f64 / 4.0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisOptions {
    /// Spectral values `λ` for the associated family `φ̂(·, λ)`.
    pub lambdas: Vec<C64>,
    /// Cap for the adaptive Step-1 band.
    pub max_band: usize,
    pub split: SplitOptions,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            lambdas: default_lambdas(),
            max_band: STEP1_MAX_BAND,
            split: SplitOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub masked: usize,
    /// Largest Step-1 band used.
    pub step1_band: usize,
    /// Largest working band of the Iwasawa factors.
    pub frame_band: usize,
    /// Largest mass dropped off a band anywhere in the pipeline.
    pub discarded: f64,
    /// Largest `|Im|` of a map coordinate before taking real parts.
    pub imaginary_defect: f64,
    /// A few distinct failure messages for masked cells.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub map: MapGrid,
    pub frames: ExtendedFrame,
    pub report: SynthesisReport,
}

struct PointResult {
    frame: SolvLoopElement,
    base: SolvPoint,
    slices: Vec<SolvPoint>,
    step1_band: usize,
    frame_band: usize,
    discarded: f64,
    imaginary: f64,
}

fn real_point(c: [C64; 3]) -> (SolvPoint, f64) {
    let im = c.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    (SolvPoint::new(c[0].re, c[1].re, c[2].re), im)
}

/// `φ̂(λ) = F̂(−λ) F̂(λ)⁻¹`.
pub fn associated_point(frame: &SolvLoopElement, lambda: C64) -> Result<[C64; 3]> {
    let a = frame.eval(-lambda)?;
    let b = frame.eval(lambda)?;
    Ok(solv_mul_c(frame.params, &a, &solv_inv_c(frame.params, &b)))
}

fn run_point(kernel: &Step1Kernel, z: C64, opts: &SynthesisOptions) -> Result<PointResult> {
    let c = kernel.solve(z)?;
    let step1_band = c.band();
    let split = iwasawa_split_with(&c, opts.split)?;
    let ext = step3_extended(&split.left)?;
    let frame = trimmed(&ext.value, TRIM_TOL);
    let (base, mut imaginary) = real_point(frame.eval(-ONE)?);
    let mut slices = Vec::with_capacity(opts.lambdas.len());
    for &l in &opts.lambdas {
        let (p, im) = real_point(associated_point(&frame, l)?);
        imaginary = imaginary.max(im);
        slices.push(p);
    }
    Ok(PointResult {
        frame,
        base,
        slices,
        step1_band,
        frame_band: split.band,
        discarded: split.discarded.max(ext.discarded),
        imaginary,
    })
}

/// Runs Steps 1-3 at every grid point. Per-point failures are masked and recorded.
pub fn synthesize(pot: &PotentialSpec, grid: GridSpec, opts: &SynthesisOptions) -> Result<Synthesis> {
    let kernel = Step1Kernel::new(pot, opts.max_band);
    let results: Vec<Result<PointResult>> = (0..grid.len())
        .into_par_iter()
        .map(|i| run_point(&kernel, grid.point_at(i), opts))
        .collect();

    let mut report = SynthesisReport::default();
    let mut points = Vec::with_capacity(grid.len());
    let mut frames = Vec::with_capacity(grid.len());
    let mut slices: Vec<LambdaSlice> = opts
        .lambdas
        .iter()
        .map(|&lambda| LambdaSlice {
            lambda,
            points: Vec::with_capacity(grid.len()),
        })
        .collect();
    for r in results {
        match r {
            Ok(p) => {
                report.step1_band = report.step1_band.max(p.step1_band);
                report.frame_band = report.frame_band.max(p.frame_band);
                report.discarded = report.discarded.max(p.discarded);
                report.imaginary_defect = report.imaginary_defect.max(p.imaginary);
                points.push(Some(p.base));
                for (s, v) in slices.iter_mut().zip(p.slices) {
                    s.points.push(Some(v));
                }
                frames.push(Some(p.frame));
            }
            Err(e) => {
                report.masked += 1;
                let msg = e.to_string();
                if report.failures.len() < 8 && !report.failures.contains(&msg) {
                    report.failures.push(msg);
                }
                points.push(None);
                for s in slices.iter_mut() {
                    s.points.push(None);
                }
                frames.push(None);
            }
        }
    }
    Ok(Synthesis {
        map: MapGrid {
            grid,
            points,
            lambda_slices: slices,
        },
        frames: ExtendedFrame { grid, frames },
        report,
    })
}
