//! Closed-form harmonic maps used as fixtures and demos.

use serde::Serialize;

use crate::dpw::{torsion_free_map, GridSpec, HoloPoly, MapGrid};
use crate::error::{Error, Result};
use crate::laurent::{C64, ZERO};
use crate::liegroup::{Group, SolvParams, SolvPoint};
use crate::verify::{
    numeric_mc_form_general, se2_transformed_field, FormGrid, ResidualField, ResidualReport,
};

/// A sampled map into one of the coordinate groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub group: Group,
    pub grid: GridSpec,
    pub points: Vec<Option<Vec<f64>>>,
}

impl Fixture {
    fn sample(name: &str, group: Group, grid: GridSpec, f: impl Fn(C64) -> Vec<f64>) -> Self {
        Fixture {
            name: name.to_string(),
            group,
            grid,
            points: (0..grid.len()).map(|i| Some(f(grid.point_at(i)))).collect(),
        }
    }

    /// The fixture as a [`MapGrid`], for three-dimensional targets.
    pub fn map_grid(&self) -> Option<MapGrid> {
        if self.group.dim() != 3 {
            return None;
        }
        Some(MapGrid {
            grid: self.grid,
            points: self
                .points
                .iter()
                .map(|p| p.as_ref().map(|p| SolvPoint::new(p[0], p[1], p[2])))
                .collect(),
            lambda_slices: Vec::new(),
        })
    }

    pub fn mc_form(&self) -> Result<FormGrid> {
        numeric_mc_form_general(self.grid, &self.points, &self.group)
    }

    pub fn neutral_residual(&self) -> Result<ResidualReport> {
        Ok(
            crate::verify::neutral_harmonicity_field_general(self.grid, &self.points, &self.group)?
                .report("neutral_harmonicity"),
        )
    }
}

/// `φ(x, y) = exp(xX) exp(yY)`.
pub fn vacuum_map(x: &[f64], y: &[f64], group: &Group, grid: GridSpec) -> Result<Fixture> {
    let n = group.dim();
    for v in [x, y] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    Ok(Fixture::sample("vacuum", *group, grid, |z| {
        let a: Vec<f64> = x.iter().map(|v| v * z.re).collect();
        let b: Vec<f64> = y.iter().map(|v| v * z.im).collect();
        group.mul(&group.exp(&a), &group.exp(&b))
    }))
}

/// `φ = (2 Re f¹, …, 2 Re f^{2n+1})` in `Nil_{2n+1}`.
pub fn nil_from_holomorphic(f: &[HoloPoly], grid: GridSpec) -> Result<Fixture> {
    if f.len() < 3 || f.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "Nil_(2n+1) needs an odd number >= 3 of functions, got {}",
            f.len()
        )));
    }
    let group = Group::Heisenberg { n: (f.len() - 1) / 2 };
    Ok(Fixture::sample("nil", group, grid, |z| {
        f.iter().map(|p| 2.0 * p.eval(z).re).collect()
    }))
}

/// `(x, y, xy/2)` from `f = (z/2, −iz/2, −iz²/8)`.
pub fn hyperbolic_paraboloid(grid: GridSpec) -> Fixture {
    let f = [
        HoloPoly::linear(C64::new(0.5, 0.0)),
        HoloPoly::linear(C64::new(0.0, -0.5)),
        HoloPoly::new(vec![ZERO, ZERO, C64::new(0.0, -0.125)]).expect("quadratic"),
    ];
    let mut fx = nil_from_holomorphic(&f, grid).expect("three functions");
    fx.name = "hyperbolic-paraboloid".into();
    fx
}

/// `Φ = ½(E₁₂ − iE₁₃)` in `nil₃`, commuting with its conjugate.
pub fn vertical_plane_potential() -> Vec<HoloPoly> {
    vec![
        HoloPoly::constant(C64::new(0.5, 0.0)),
        HoloPoly::zero(),
        HoloPoly::constant(C64::new(0.0, -0.5)),
    ]
}

/// The vertical plane `x² = 0` of `Nil₃`, as the exponential solution of
/// [`vertical_plane_potential`] at `λ = 1`.
pub fn vertical_plane(grid: GridSpec) -> Result<Fixture> {
    let group = Group::NIL3;
    let alg = group.algebra();
    let phi = vertical_plane_potential();
    let mut points = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let m = torsion_free_map(&phi, &alg, ZERO, grid.point_at(i), C64::new(1.0, 0.0))?;
        points.push(group.from_matrix(&m.map(|v| v.re)));
    }
    Ok(Fixture {
        name: "vertical-plane".into(),
        group,
        grid,
        points,
    })
}

/// `φ³ = c`, `φ¹ = Re w`, `φ² = −e^{−2c} Im w` in `Sol₃`, so that
/// `φ¹ − i e^{2c} φ² = w` is holomorphic.
pub fn sol3_primitive(w: &HoloPoly, c: f64, grid: GridSpec) -> MapGrid {
    let s = (-2.0 * c).exp();
    MapGrid::from_fn(grid, |z| {
        let v = w.eval(z);
        SolvPoint::new(v.re, -s * v.im, c)
    })
}

/// The horosphere `x³ = 0` of `G(1, 1) = H³`, as the vacuum solution of `(e₁, e₂)`.
pub fn horosphere(grid: GridSpec) -> Fixture {
    let mut fx = vacuum_map(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &Group::Solv(SolvParams::H3), grid)
        .expect("three-dimensional");
    fx.name = "horosphere".into();
    fx
}

/// The same horosphere in the conformal but non-affine parametrization
/// `(Re w, Im w, 0)`, `w = z + z⁴/8`, whose finite differences do not vanish.
pub fn horosphere_curved(grid: GridSpec) -> MapGrid {
    MapGrid::from_fn(grid, |z| {
        let w = z + z * z * z * z / 8.0;
        SolvPoint::new(w.re, w.im, 0.0)
    })
}

/// Component of `φ⁻¹φ_z` off the `𝔤^ℂ_{−1} = ℂ(1, i, 0)` eigenline of the order-4
/// automorphism of `Sol₃`: `(A₂ − iA₁, A₃)`.
pub fn sol3_primitivity_field(form: &FormGrid) -> ResidualField {
    form.pointwise(|a, _| vec![a[1] - C64::new(0.0, 1.0) * a[0], a[2]])
}

/// Direct and transformed `SE₂` residuals on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Se2Check {
    pub direct: ResidualReport,
    pub transformed: ResidualReport,
    /// Largest pointwise difference of the residual norms.
    pub discrepancy: f64,
}

/// Evaluates the `SE₂` neutral system directly and through the substitution into
/// the `G(1, −1)` system, and compares the pointwise residual norms.
pub fn se2_check_pair(map: &MapGrid) -> Result<Se2Check> {
    let direct = crate::verify::neutral_harmonicity_field(map, &Group::EuclideanMotions)?;
    let transformed = se2_transformed_field(map)?;
    let norm = |v: &Option<Vec<C64>>| {
        v.as_ref()
            .map(|v| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
    };
    let discrepancy = direct
        .values
        .iter()
        .zip(&transformed.values)
        .filter_map(|(a, b)| Some((norm(a)?, norm(b)?)))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Se2Check {
        direct: direct.report("se2_direct"),
        transformed: transformed.report("se2_transformed"),
        discrepancy,
    })
}

/// Named fixtures available from the command line.
pub const NAMES: [&str; 5] = [
    "plane",
    "horosphere",
    "hyperbolic-paraboloid",
    "vertical-plane",
    "sol3-primitive",
];

/// Builds a named fixture.
pub fn by_name(name: &str, grid: GridSpec) -> Result<Fixture> {
    let to_fixture = |name: &str, group: Group, m: MapGrid| Fixture {
        name: name.to_string(),
        group,
        grid,
        points: m.points.iter().map(|p| p.map(|p| p.to_array().to_vec())).collect(),
    };
    match name {
        "plane" => {
            let mut f = vacuum_map(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &Group::Solv(SolvParams::SOL3), grid)?;
            f.name = "plane".into();
            Ok(f)
        }
        "horosphere" => Ok(horosphere(grid)),
        "hyperbolic-paraboloid" => Ok(hyperbolic_paraboloid(grid)),
        "vertical-plane" => vertical_plane(grid),
        "sol3-primitive" => {
            let w = HoloPoly::new(vec![ZERO, C64::new(1.0, 0.0), C64::new(0.0, 0.5)]).expect("quadratic");
            Ok(to_fixture(name, Group::Solv(SolvParams::SOL3), sol3_primitive(&w, 0.25, grid)))
        }
        other => Err(Error::InvalidInput(format!(
            "unknown fixture {other:?}; expected one of {}",
            NAMES.join(", ")
        ))),
    }
}
