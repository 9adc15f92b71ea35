//! Concrete groups in global coordinates, with their algebras and Maurer-Cartan forms.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::algebra::LieAlgebraData;
use super::expm::matrix_exp3;
use super::solv::SolvParams;
use crate::laurent::C64;

/// A simply connected three-dimensional (or Heisenberg) group in coordinates.
///
/// * `Solv`: `G(μ₁, μ₂)`.
/// * `Heisenberg { n }`: `Nil_{2n+1}` with law
///   `x_{2n+1} + x̃_{2n+1} + ½Σ(xⁱx̃ⁿ⁺ⁱ − x̃ⁱxⁿ⁺ⁱ)`; these are exponential coordinates.
/// * `EuclideanMotions`: the universal cover of `SE₂`, coordinates `(p¹, p², θ)`.
/// * `Abelian { dim }`: `ℝⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Group {
    Solv(SolvParams),
    Heisenberg { n: usize },
    EuclideanMotions,
    Abelian { dim: usize },
}

impl Group {
    pub const NIL3: Group = Group::Heisenberg { n: 1 };

    pub fn dim(&self) -> usize {
        match *self {
            Group::Solv(_) | Group::EuclideanMotions => 3,
            Group::Heisenberg { n } => 2 * n + 1,
            Group::Abelian { dim } => dim,
        }
    }

    pub fn algebra(&self) -> LieAlgebraData {
        match *self {
            Group::Solv(p) => LieAlgebraData::solvable(p),
            Group::Heisenberg { n } => LieAlgebraData::heisenberg(n),
            Group::EuclideanMotions => LieAlgebraData::euclidean_motions(),
            Group::Abelian { dim } => LieAlgebraData::abelian(dim),
        }
    }

    pub fn identity(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    pub fn mul(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        match *self {
            Group::Solv(p) => vec![
                a[0] + (p.mu1 * a[2]).exp() * b[0],
                a[1] + (p.mu2 * a[2]).exp() * b[1],
                a[2] + b[2],
            ],
            Group::Heisenberg { n } => {
                let mut out: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let twist: f64 = (0..n).map(|i| a[i] * b[n + i] - b[i] * a[n + i]).sum();
                out[2 * n] += 0.5 * twist;
                out
            }
            Group::EuclideanMotions => {
                let (s, c) = a[2].sin_cos();
                vec![
                    a[0] + c * b[0] - s * b[1],
                    a[1] + s * b[0] + c * b[1],
                    a[2] + b[2],
                ]
            }
            Group::Abelian { .. } => a.iter().zip(b).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn inv(&self, a: &[f64]) -> Vec<f64> {
        match *self {
            Group::Solv(p) => vec![
                -(-p.mu1 * a[2]).exp() * a[0],
                -(-p.mu2 * a[2]).exp() * a[1],
                -a[2],
            ],
            Group::EuclideanMotions => {
                let (s, c) = a[2].sin_cos();
                vec![-(c * a[0] + s * a[1]), -(-s * a[0] + c * a[1]), -a[2]]
            }
            Group::Heisenberg { .. } | Group::Abelian { .. } => a.iter().map(|x| -x).collect(),
        }
    }

    /// The group exponential of an algebra element given in the basis of [`Group::algebra`].
    pub fn exp(&self, x: &[f64]) -> Vec<f64> {
        match *self {
            Group::Solv(_) | Group::EuclideanMotions => {
                let alg = self.algebra();
                let xc: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
                let m = matrix_exp3(&alg.to_matrix(&xc).expect("3x3 basis"));
                // x³ of exp(X) equals the e₃ component of X in both families
                vec![m[(0, 2)].re, m[(1, 2)].re, x[2]]
            }
            Group::Heisenberg { .. } | Group::Abelian { .. } => x.to_vec(),
        }
    }

    /// Components of `φ⁻¹ ∂φ` in the algebra basis, given a point and a (complex)
    /// coordinate derivative at it.
    pub fn maurer_cartan(&self, point: &[f64], d: &[C64]) -> Vec<C64> {
        match *self {
            Group::Solv(p) => vec![
                d[0] * (-p.mu1 * point[2]).exp(),
                d[1] * (-p.mu2 * point[2]).exp(),
                d[2],
            ],
            Group::Heisenberg { n } => {
                let mut out = d.to_vec();
                let twist: C64 = (0..n)
                    .map(|i| d[i] * point[n + i] - d[n + i] * point[i])
                    .sum();
                out[2 * n] += twist * 0.5;
                out
            }
            Group::EuclideanMotions => {
                let (s, c) = point[2].sin_cos();
                vec![d[0] * c + d[1] * s, -d[0] * s + d[1] * c, d[2]]
            }
            Group::Abelian { .. } => d.to_vec(),
        }
    }

    /// Matrix realization, when the group has a 3×3 one.
    pub fn to_matrix(&self, point: &[f64]) -> Option<Matrix3<f64>> {
        match *self {
            Group::Solv(p) if !p.is_abelian() => Some(Matrix3::new(
                (p.mu1 * point[2]).exp(),
                0.0,
                point[0],
                0.0,
                (p.mu2 * point[2]).exp(),
                point[1],
                0.0,
                0.0,
                1.0,
            )),
            Group::Heisenberg { n: 1 } => Some(Matrix3::new(
                1.0,
                point[0],
                point[2] + 0.5 * point[0] * point[1],
                0.0,
                1.0,
                point[1],
                0.0,
                0.0,
                1.0,
            )),
            Group::EuclideanMotions => {
                let (s, c) = point[2].sin_cos();
                Some(Matrix3::new(c, -s, point[0], s, c, point[1], 0.0, 0.0, 1.0))
            }
            Group::Abelian { dim: 3 } => Some(Matrix3::from_diagonal(&nalgebra::Vector3::new(
                point[0].exp(),
                point[1].exp(),
                point[2].exp(),
            ))),
            _ => None,
        }
    }

    /// Inverse of [`Group::to_matrix`]. The `SE₂` angle is taken in `(−π, π]`.
    pub fn from_matrix(&self, m: &Matrix3<f64>) -> Option<Vec<f64>> {
        match *self {
            Group::Solv(p) if !p.is_abelian() => {
                let x3 = if p.mu1.abs() >= p.mu2.abs() {
                    m[(0, 0)].ln() / p.mu1
                } else {
                    m[(1, 1)].ln() / p.mu2
                };
                Some(vec![m[(0, 2)], m[(1, 2)], x3])
            }
            Group::Heisenberg { n: 1 } => {
                let (a, b) = (m[(0, 1)], m[(1, 2)]);
                Some(vec![a, b, m[(0, 2)] - 0.5 * a * b])
            }
            Group::EuclideanMotions => {
                Some(vec![m[(0, 2)], m[(1, 2)], m[(1, 0)].atan2(m[(0, 0)])])
            }
            Group::Abelian { dim: 3 } => Some((0..3).map(|i| m[(i, i)].ln()).collect()),
            _ => None,
        }
    }
}
