//! Finite-difference checks of the differential identities along sampled maps.
//!
//! Derivatives use 3-point central differences and the 5-point Laplacian, with
//! `∂_z = ½(∂_x − i∂_y)`, `∂_z̄ = ½(∂_x + i∂_y)` and `φ_zz̄ = ¼Δφ`. All 2-form
//! residuals are coefficients of `dz∧dz̄` for `α = A dz + B dz̄`, using
//! `[α∧β](X,Y) = μ(α(X),β(Y)) − μ(α(Y),β(X))`:
//!
//! * `dα + ½[α∧α]` gives `−A_z̄ + B_z + [A, B]`,
//! * `∂̄α′ − ∂α″ + 2(sym μ)(α″∧α′)` gives `−A_z̄ − B_z − 2 sym μ(B, A)`; the
//!   harmonicity residual is reported with the opposite sign,
//!   `A_z̄ + B_z + 2 sym μ(B, A)`,
//! * `2∂̄α′ + [α′∧α″] + 2(sym μ)(α″∧α′)` gives `−2A_z̄ + [A, B] − 2 sym μ(B, A)`,
//!   which is the Maurer-Cartan coefficient minus the harmonicity residual,
//! * `(sym μ)(α′∧α″)` gives `sym μ(A, B)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dpw::{GridSpec, MapGrid};
use crate::error::{Error, Result};
use crate::laurent::C64;
use crate::liegroup::{ConnectionTensor, Group, LieAlgebraData, SolvParams};

/// Relative tolerance for `B = conj(A)` on real maps.
pub const FD_TOL: f64 = 1e-10;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Values of a vector field on the grid; `None` off the stencil's support or on masked cells.
pub type Field = Vec<Option<Vec<C64>>>;

/// First derivatives and `∂_z∂_z̄` of a sampled vector field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDerivs {
    pub value: Vec<C64>,
    pub z: Vec<C64>,
    pub zb: Vec<C64>,
    pub zzb: Vec<C64>,
}

fn check_grid(grid: &GridSpec) -> Result<()> {
    if grid.nx < 5 || grid.ny < 5 {
        return Err(Error::GridTooSmall {
            nx: grid.nx,
            ny: grid.ny,
        });
    }
    Ok(())
}

/// Central-difference derivatives at every point whose 4 neighbours are present.
pub fn field_derivatives(grid: &GridSpec, values: &Field) -> Vec<Option<PointDerivs>> {
    let (hx, hy) = (grid.hx(), grid.hy());
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx % grid.nx, idx / grid.nx);
            if ix == 0 || iy == 0 || ix + 1 == grid.nx || iy + 1 == grid.ny {
                return None;
            }
            let c = values[idx].as_ref()?;
            let e = values[grid.index(ix + 1, iy)].as_ref()?;
            let w = values[grid.index(ix - 1, iy)].as_ref()?;
            let n = values[grid.index(ix, iy + 1)].as_ref()?;
            let s = values[grid.index(ix, iy - 1)].as_ref()?;
            let dim = c.len();
            let mut d = PointDerivs {
                value: c.clone(),
                z: Vec::with_capacity(dim),
                zb: Vec::with_capacity(dim),
                zzb: Vec::with_capacity(dim),
            };
            for k in 0..dim {
                let fx = (e[k] - w[k]) / (2.0 * hx);
                let fy = (n[k] - s[k]) / (2.0 * hy);
                let lap = (e[k] - c[k] * 2.0 + w[k]) / (hx * hx) + (n[k] - c[k] * 2.0 + s[k]) / (hy * hy);
                d.z.push((fx - I * fy) * 0.5);
                d.zb.push((fx + I * fy) * 0.5);
                d.zzb.push(lap * 0.25);
            }
            Some(d)
        })
        .collect()
}

/// The sampled map as a complex field.
pub fn map_field(map: &MapGrid) -> Field {
    map.points
        .iter()
        .map(|p| p.map(|p| p.to_array().iter().map(|&v| C64::new(v, 0.0)).collect()))
        .collect()
}

fn field_from_points(map_points: &[Option<Vec<f64>>]) -> Field {
    map_points
        .iter()
        .map(|p| p.as_ref().map(|p| p.iter().map(|&v| C64::new(v, 0.0)).collect()))
        .collect()
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaResidual {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub max_norm: f64,
    pub l2_norm: f64,
}

/// Summary of a residual field. Pointwise size is the Euclidean norm of the
/// residual vector; `l2_norm` is the discrete `L²` norm over the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub max_norm: f64,
    pub l2_norm: f64,
    pub grid_h: f64,
    /// Sup norm of each residual component.
    pub components: Vec<f64>,
    /// Number of points the norms were taken over.
    pub points: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_lambda: Vec<LambdaResidual>,
}

/// A residual on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub grid: GridSpec,
    pub values: Field,
}

impl ResidualField {
    pub fn report(&self, name: &str) -> ResidualReport {
        let norms: Vec<f64> = self
            .values
            .iter()
            .flatten()
            .map(|v| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        let dim = self.values.iter().flatten().map(|v| v.len()).max().unwrap_or(0);
        let mut components = vec![0.0_f64; dim];
        for v in self.values.iter().flatten() {
            for (m, c) in components.iter_mut().zip(v) {
                *m = m.max(c.norm());
            }
        }
        let cell = self.grid.hx() * self.grid.hy();
        ResidualReport {
            name: name.to_string(),
            max_norm: norms.iter().fold(0.0, |a, &b| a.max(b)),
            l2_norm: (compensated_sum(norms.iter().map(|n| n * n)) * cell).sqrt(),
            grid_h: self.grid.hx().max(self.grid.hy()),
            components,
            points: norms.len(),
            per_lambda: Vec::new(),
        }
    }

    /// Largest pointwise difference from another residual on the same grid.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .filter_map(|(a, b)| Some((a.as_ref()?, b.as_ref()?)))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

/// `(A, B, A_z̄, B_z)` at one point.
type FormDerivs = (Vec<C64>, Vec<C64>, Vec<C64>, Vec<C64>);

/// `α = A dz + B dz̄` at the interior grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct FormGrid {
    pub grid: GridSpec,
    pub dim: usize,
    pub a: Field,
    pub b: Field,
}

impl FormGrid {
    /// Largest `|B − conj(A)| / max(1, |A|)`.
    pub fn reality_defect(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .filter_map(|(a, b)| Some((a.as_ref()?, b.as_ref()?)))
            .map(|(a, b)| {
                let scale = a.iter().map(|c| c.norm()).fold(1.0, f64::max);
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (y - x.conj()).norm())
                    .fold(0.0, f64::max)
                    / scale
            })
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.reality_defect() <= FD_TOL
    }

    /// `(∂_z̄ A, ∂_z B)` wherever both are defined.
    fn derivatives(&self) -> Vec<Option<FormDerivs>> {
        let da = field_derivatives(&self.grid, &self.a);
        let db = field_derivatives(&self.grid, &self.b);
        da.into_iter()
            .zip(db)
            .map(|(a, b)| {
                let (a, b) = (a?, b?);
                Some((a.value, b.value, a.zb, b.z))
            })
            .collect()
    }

    /// Pointwise residual built from `(A, B, A_z̄, B_z)`.
    pub fn residual(&self, f: impl Fn(&[C64], &[C64], &[C64], &[C64]) -> Vec<C64> + Sync) -> ResidualField {
        let values = self
            .derivatives()
            .into_par_iter()
            .map(|d| d.map(|(a, b, azb, bz)| f(&a, &b, &azb, &bz)))
            .collect();
        ResidualField {
            grid: self.grid,
            values,
        }
    }

    /// Pointwise algebraic expression in `(A, B)` on the form's own support.
    pub fn pointwise(&self, f: impl Fn(&[C64], &[C64]) -> Vec<C64> + Sync) -> ResidualField {
        let values = self
            .a
            .par_iter()
            .zip(self.b.par_iter())
            .map(|(a, b)| Some(f(a.as_ref()?, b.as_ref()?)))
            .collect();
        ResidualField {
            grid: self.grid,
            values,
        }
    }
}

/// `A`, `B` are the components of `φ⁻¹φ_z` and `φ⁻¹φ_z̄` in the algebra basis.
pub fn numeric_mc_form(map: &MapGrid, group: &Group) -> Result<FormGrid> {
    check_grid(&map.grid)?;
    let pts: Vec<Option<Vec<f64>>> = map.points.iter().map(|p| p.map(|p| p.to_array().to_vec())).collect();
    numeric_mc_form_general(map.grid, &pts, group)
}

/// As [`numeric_mc_form`], for maps into groups of any dimension.
pub fn numeric_mc_form_general(grid: GridSpec, points: &[Option<Vec<f64>>], group: &Group) -> Result<FormGrid> {
    check_grid(&grid)?;
    let dim = group.dim();
    if let Some(p) = points.iter().flatten().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.len(),
        });
    }
    let derivs = field_derivatives(&grid, &field_from_points(points));
    let (a, b): (Field, Field) = derivs
        .into_par_iter()
        .zip(points.par_iter())
        .map(|(d, p)| match (d, p) {
            (Some(d), Some(p)) => (
                Some(group.maurer_cartan(p, &d.z)),
                Some(group.maurer_cartan(p, &d.zb)),
            ),
            _ => (None, None),
        })
        .unzip();
    Ok(FormGrid { grid, dim, a, b })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `α_λ = ½(1 − λ⁻¹)α′ + ½(1 − λ)α″`.
    Neutral,
    /// `α_λ = λ⁻¹α′ + λα″`.
    TorsionFree,
}

/// `∂_z B_λ − ∂_z̄ A_λ + [A_λ, B_λ]`.
pub fn flatness_field(form: &FormGrid, alg: &LieAlgebraData, lambda: C64, family: Family) -> ResidualField {
    let (ca, cb) = match family {
        Family::Neutral => ((C64::new(1.0, 0.0) - lambda.inv()) * 0.5, (C64::new(1.0, 0.0) - lambda) * 0.5),
        Family::TorsionFree => (lambda.inv(), lambda),
    };
    form.residual(|a, b, azb, bz| {
        let al: Vec<C64> = a.iter().map(|v| v * ca).collect();
        let bl: Vec<C64> = b.iter().map(|v| v * cb).collect();
        let br = alg.bracket(&al, &bl);
        (0..a.len()).map(|k| bz[k] * cb - azb[k] * ca + br[k]).collect()
    })
}

pub fn flatness_residual(form: &FormGrid, alg: &LieAlgebraData, lambda: C64, family: Family) -> ResidualReport {
    let mut r = flatness_field(form, alg, lambda, family).report("flatness");
    r.per_lambda.push(LambdaResidual {
        lambda_re: lambda.re,
        lambda_im: lambda.im,
        max_norm: r.max_norm,
        l2_norm: r.l2_norm,
    });
    r
}

/// Flatness at several `λ`; the top-level norms are the worst over all of them.
pub fn flatness_sweep(form: &FormGrid, alg: &LieAlgebraData, lambdas: &[C64], family: Family) -> ResidualReport {
    let mut out = ResidualReport {
        name: "flatness".into(),
        max_norm: 0.0,
        l2_norm: 0.0,
        grid_h: form.grid.hx().max(form.grid.hy()),
        components: vec![0.0; form.dim],
        points: 0,
        per_lambda: Vec::new(),
    };
    for &l in lambdas {
        let r = flatness_residual(form, alg, l, family);
        out.max_norm = out.max_norm.max(r.max_norm);
        out.l2_norm = out.l2_norm.max(r.l2_norm);
        out.points = r.points;
        for (m, c) in out.components.iter_mut().zip(&r.components) {
            *m = m.max(*c);
        }
        out.per_lambda.extend(r.per_lambda);
    }
    out
}

/// `−A_z̄ + B_z + [A, B]`.
pub fn maurer_cartan_field(form: &FormGrid, alg: &LieAlgebraData) -> ResidualField {
    form.residual(|a, b, azb, bz| {
        let br = alg.bracket(a, b);
        (0..a.len()).map(|k| bz[k] - azb[k] + br[k]).collect()
    })
}

/// `A_z̄ + B_z + 2 sym μ(B, A)`.
pub fn general_harmonicity_field(form: &FormGrid, conn: &ConnectionTensor) -> ResidualField {
    let (sym, _) = conn.sym_skew_parts();
    form.residual(move |a, b, azb, bz| {
        let s = sym.apply(b, a);
        (0..a.len()).map(|k| azb[k] + bz[k] + s[k] * 2.0).collect()
    })
}

pub fn general_harmonicity_residual(form: &FormGrid, conn: &ConnectionTensor) -> ResidualReport {
    general_harmonicity_field(form, conn).report("harmonicity")
}

/// `−2A_z̄ + [A, B] − 2 sym μ(B, A)`.
pub fn pluriharmonicity_field(form: &FormGrid, conn: &ConnectionTensor) -> ResidualField {
    let (sym, _) = conn.sym_skew_parts();
    let alg = conn.algebra().clone();
    form.residual(move |a, b, azb, _| {
        let s = sym.apply(b, a);
        let br = alg.bracket(a, b);
        (0..a.len()).map(|k| br[k] - azb[k] * 2.0 - s[k] * 2.0).collect()
    })
}

/// `sym μ(A, B)`, the `dz∧dz̄` coefficient of `(sym μ)(α′∧α″)`.
pub fn admissibility_field(form: &FormGrid, conn: &ConnectionTensor) -> ResidualField {
    let (sym, _) = conn.sym_skew_parts();
    form.pointwise(move |a, b| sym.apply(a, b))
}

pub fn admissibility_residual(form: &FormGrid, conn: &ConnectionTensor) -> ResidualReport {
    admissibility_field(form, conn).report("admissibility")
}

/// `2[A, B]`.
pub fn torsion_free_field(form: &FormGrid, alg: &LieAlgebraData) -> ResidualField {
    form.pointwise(|a, b| alg.bracket(a, b).into_iter().map(|c| c * 2.0).collect())
}

pub fn torsion_free_residual(form: &FormGrid, alg: &LieAlgebraData) -> ResidualReport {
    torsion_free_field(form, alg).report("torsion_free")
}

fn derivative_residual(
    grid: GridSpec,
    values: &Field,
    f: impl Fn(&PointDerivs) -> Vec<C64> + Sync,
) -> ResidualField {
    let values = field_derivatives(&grid, values)
        .into_par_iter()
        .map(|d| d.map(|d| f(&d)))
        .collect();
    ResidualField { grid, values }
}

/// Neutral harmonicity residual of a map with `n` coordinates:
///
/// * `G(μ₁, μ₂)`: `φ^k_zz̄ − ½μ_k(φ^k_zφ³_z̄ + φ^k_z̄φ³_z)`, `φ³_zz̄`;
/// * `Nil_{2n+1}`: `φ^j_zz̄` for `j ≤ 2n` and
///   `{φ^{2n+1} + ½Σφ^iφ^{n+i}}_zz̄ − ½Σ(φ^i_zφ^{n+i}_z̄ + φ^i_z̄φ^{n+i}_z)`;
/// * `SE₂`: `φ¹_zz̄ + ½(φ²_zφ³_z̄ + φ²_z̄φ³_z)`, `φ²_zz̄ − ½(φ¹_zφ³_z̄ + φ¹_z̄φ³_z)`, `φ³_zz̄`;
/// * `ℝⁿ`: `φ^j_zz̄`.
pub fn neutral_harmonicity_field_general(grid: GridSpec, points: &[Option<Vec<f64>>], group: &Group) -> Result<ResidualField> {
    check_grid(&grid)?;
    let mut values = field_from_points(points);
    match *group {
        Group::Solv(p) => Ok(derivative_residual(grid, &values, |d| {
            let mut r: Vec<C64> = (0..2)
                .map(|k| d.zzb[k] - (d.z[k] * d.zb[2] + d.zb[k] * d.z[2]) * (0.5 * p.mu(k)))
                .collect();
            r.push(d.zzb[2]);
            r
        })),
        Group::Heisenberg { n } => {
            // append ψ = φ^{2n+1} + ½Σφ^iφ^{n+i}
            for v in values.iter_mut().flatten() {
                let psi = v[2 * n] + (0..n).map(|i| v[i] * v[n + i]).sum::<C64>() * 0.5;
                v.push(psi);
            }
            Ok(derivative_residual(grid, &values, |d| {
                let mut r: Vec<C64> = d.zzb[..2 * n].to_vec();
                let cross: C64 = (0..n)
                    .map(|i| d.z[i] * d.zb[n + i] + d.zb[i] * d.z[n + i])
                    .sum();
                r.push(d.zzb[2 * n + 1] - cross * 0.5);
                r
            }))
        }
        Group::EuclideanMotions => Ok(derivative_residual(grid, &values, |d| {
            vec![
                d.zzb[0] + (d.z[1] * d.zb[2] + d.zb[1] * d.z[2]) * 0.5,
                d.zzb[1] - (d.z[0] * d.zb[2] + d.zb[0] * d.z[2]) * 0.5,
                d.zzb[2],
            ]
        })),
        Group::Abelian { .. } => Ok(derivative_residual(grid, &values, |d| d.zzb.clone())),
    }
}

pub fn neutral_harmonicity_field(map: &MapGrid, group: &Group) -> Result<ResidualField> {
    let pts: Vec<Option<Vec<f64>>> = map.points.iter().map(|p| p.map(|p| p.to_array().to_vec())).collect();
    neutral_harmonicity_field_general(map.grid, &pts, group)
}

pub fn neutral_harmonicity_residual(map: &MapGrid, group: &Group) -> Result<ResidualReport> {
    Ok(neutral_harmonicity_field(map, group)?.report("neutral_harmonicity"))
}

/// The harmonic map system of the standard left-invariant metric on `G(μ₁, μ₂)`:
/// `φ^k_zz̄ − μ_k(φ^k_zφ³_z̄ + φ^k_z̄φ³_z)`, `φ³_zz̄ + Σ μ_k e^{−2μ_kφ³} φ^k_z φ^k_z̄`.
pub fn metric_harmonicity_field(map: &MapGrid, params: SolvParams) -> Result<ResidualField> {
    check_grid(&map.grid)?;
    Ok(derivative_residual(map.grid, &map_field(map), |d| {
        let mut r: Vec<C64> = (0..2)
            .map(|k| d.zzb[k] - (d.z[k] * d.zb[2] + d.zb[k] * d.z[2]) * params.mu(k))
            .collect();
        let phi3 = d.value[2].re;
        let coupling: C64 = (0..2)
            .map(|k| d.z[k] * d.zb[k] * (params.mu(k) * (-2.0 * params.mu(k) * phi3).exp()))
            .sum();
        r.push(d.zzb[2] + coupling);
        r
    }))
}

pub fn metric_harmonicity_residual(map: &MapGrid, params: SolvParams) -> Result<ResidualReport> {
    Ok(metric_harmonicity_field(map, params)?.report("metric_harmonicity"))
}

/// The `SE₂` system written on `φ̃¹ = (φ¹ + iφ²)/√2`, `φ̃² = (φ¹ − iφ²)/√2`,
/// `φ̃³ = iφ³` as the neutral system of `G(1, −1)` on complex data.
pub fn se2_transformed_field(map: &MapGrid) -> Result<ResidualField> {
    check_grid(&map.grid)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let values: Field = map
        .points
        .iter()
        .map(|p| {
            p.map(|p| {
                let (a, b) = (C64::new(p.x1, 0.0), C64::new(p.x2, 0.0));
                vec![(a + I * b) * s, (a - I * b) * s, I * p.x3]
            })
        })
        .collect();
    let mu = [1.0, -1.0];
    Ok(derivative_residual(map.grid, &values, |d| {
        let mut r: Vec<C64> = (0..2)
            .map(|k| d.zzb[k] - (d.z[k] * d.zb[2] + d.zb[k] * d.z[2]) * (0.5 * mu[k]))
            .collect();
        r.push(d.zzb[2]);
        r
    }))
}
