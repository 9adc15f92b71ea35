#![allow(dead_code)]

use harmloop::dpw::{Domain, GridSpec, HoloPoly, PotentialSpec};
use harmloop::laurent::{LaurentLoop, C64};
use harmloop::liegroup::{SolvLoopElement, SolvParams};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MUS: [SolvParams; 4] = [
    SolvParams::new(1.0, 1.0),
    SolvParams::new(1.0, -1.0),
    SolvParams::new(0.0, 1.0),
    SolvParams::new(0.0, 0.0),
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the disk of radius `r`.
pub fn disk(rng: &mut impl Rng, r: f64) -> C64 {
    let rho = r * rng.gen::<f64>().sqrt();
    C64::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn poly(rng: &mut impl Rng, degree: usize, r: f64) -> HoloPoly {
    HoloPoly::new((0..=degree).map(|_| disk(rng, r)).collect()).unwrap()
}

pub fn potential(rng: &mut impl Rng, max_degree: usize, r: f64, params: SolvParams) -> PotentialSpec {
    let mut p = || {
        let d = rng.gen_range(0..=max_degree);
        poly(rng, d, r)
    };
    let xi = [p(), p(), p()];
    PotentialSpec::new(xi, params, C64::new(0.0, 0.0), 12).unwrap()
}

/// Random loop supported in `|j| <= support`, stored at `band`.
pub fn loop_element(rng: &mut impl Rng, support: i64, band: usize, params: SolvParams) -> SolvLoopElement {
    let mut entry = || {
        LaurentLoop::from_fn(band, |j| if j.abs() <= support { disk(rng, 1.0) } else { C64::new(0.0, 0.0) })
    };
    SolvLoopElement::new(entry(), entry(), entry(), params)
}

pub fn square_grid(half: f64, n: usize) -> GridSpec {
    GridSpec::new(Domain::square(half), n, n).unwrap()
}

/// Least-squares slope of `log v` against `log h`.
pub fn slope(h: &[f64], v: &[f64]) -> f64 {
    let x: Vec<f64> = h.iter().map(|h| h.ln()).collect();
    let y: Vec<f64> = v.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Grid sizes on `[−0.5, 0.5]²` for `h = 1/16, 1/32, 1/64`.
pub const REFINEMENT: [usize; 3] = [17, 33, 65];

/// Points of `[−0.5, 0.5]²` where the coarsest refinement grid has central differences.
pub const COMMON_HALF: f64 = 0.5 - 1.0 / 16.0;

/// The same for residuals that differentiate a numerical Maurer-Cartan form.
pub const FORM_HALF: f64 = 0.5 - 2.0 / 16.0;

/// Largest pointwise Euclidean residual norm on `|x|, |y| <= half`, so that every
/// refinement level is measured on the same point set.
pub fn max_on(field: &harmloop::verify::ResidualField, half: f64) -> f64 {
    field
        .values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            let z = field.grid.point_at(i);
            let inside = z.re.abs() <= half + 1e-12 && z.im.abs() <= half + 1e-12;
            let v = v.as_ref().filter(|_| inside)?;
            Some(v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        })
        .fold(0.0, f64::max)
}
