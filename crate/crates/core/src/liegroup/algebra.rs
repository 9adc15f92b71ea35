//! Lie algebras by structure constants and left-invariant connections on them.
//!
//! Tensors are stored flat as `t[k][i][j]`, meaning the `e_k` component of the
//! bilinear map evaluated on `(e_i, e_j)`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use super::solv::SolvParams;
use crate::error::{Error, Result};

/// Validation tolerance for antisymmetry and the Jacobi identity.
pub const JACOBI_TOL: f64 = 1e-12;

/// Real or complex coefficients for algebra vectors.
pub trait Scalar:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// `out_k = Σ_{i,j} t[k][i][j] x_i y_j`.
fn contract<T: Scalar>(t: &[f64], n: usize, x: &[T], y: &[T]) -> Vec<T> {
    let mut out = vec![T::default(); n];
    for (k, o) in out.iter_mut().enumerate() {
        let block = &t[k * n * n..(k + 1) * n * n];
        let mut acc = T::default();
        for i in 0..n {
            for j in 0..n {
                let c = block[i * n + j];
                if c != 0.0 {
                    acc = acc + (x[i] * y[j]) * c;
                }
            }
        }
        *o = acc;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraData {
    dim: usize,
    structure: Vec<f64>,
    basis: Option<Vec<Matrix3<f64>>>,
}

impl LieAlgebraData {
    /// Validates antisymmetry and the Jacobi identity.
    pub fn new(dim: usize, structure: Vec<f64>) -> Result<Self> {
        if structure.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: structure.len(),
            });
        }
        if structure.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite structure constant".into()));
        }
        let alg = LieAlgebraData {
            dim,
            structure,
            basis: None,
        };
        let skew = alg.antisymmetry_defect();
        if skew > JACOBI_TOL {
            return Err(Error::NotALieAlgebra {
                which: "antisymmetry",
                residual: skew,
            });
        }
        let jacobi = alg.jacobi_defect();
        if jacobi > JACOBI_TOL {
            return Err(Error::NotALieAlgebra {
                which: "the Jacobi identity",
                residual: jacobi,
            });
        }
        Ok(alg)
    }

    /// Builds the algebra from brackets `[e_i, e_j] = Σ c e_k` listed for `i < j`.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, Vec<f64>)]) -> Result<Self> {
        let mut t = vec![0.0; dim * dim * dim];
        for (i, j, v) in brackets {
            for (k, &c) in v.iter().enumerate() {
                t[k * dim * dim + i * dim + j] = c;
                t[k * dim * dim + j * dim + i] = -c;
            }
        }
        Self::new(dim, t)
    }

    /// Attaches a 3×3 matrix basis; checks `[E_i, E_j] = Σ c^k_{ij} E_k`.
    pub fn with_matrix_basis(mut self, basis: Vec<Matrix3<f64>>) -> Result<Self> {
        if basis.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: basis.len(),
            });
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let comm = basis[i] * basis[j] - basis[j] * basis[i];
                let mut expect = Matrix3::zeros();
                for (k, b) in basis.iter().enumerate() {
                    expect += b * self.structure_constant(k, i, j);
                }
                let err = (comm - expect).abs().max();
                if err > JACOBI_TOL {
                    return Err(Error::InvalidInput(format!(
                        "matrix basis does not reproduce [e{i}, e{j}] (error {err:.3e})"
                    )));
                }
            }
        }
        self.basis = Some(basis);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure(&self) -> &[f64] {
        &self.structure
    }

    /// `c^k_{ij}`.
    pub fn structure_constant(&self, k: usize, i: usize, j: usize) -> f64 {
        let n = self.dim;
        self.structure[k * n * n + i * n + j]
    }

    pub fn matrix_basis(&self) -> Option<&[Matrix3<f64>]> {
        self.basis.as_deref()
    }

    pub fn bracket<T: Scalar>(&self, x: &[T], y: &[T]) -> Vec<T> {
        contract(&self.structure, self.dim, x, y)
    }

    /// `Σ x_i E_i` in the attached matrix basis.
    pub fn to_matrix(&self, x: &[Complex64]) -> Option<Matrix3<Complex64>> {
        let basis = self.basis.as_ref()?;
        let mut m = Matrix3::zeros();
        for (b, &c) in basis.iter().zip(x) {
            m += b.map(|v| Complex64::new(v, 0.0)) * c;
        }
        Some(m)
    }

    fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max(
                        (self.structure_constant(k, i, j) + self.structure_constant(k, j, i)).abs(),
                    );
                }
            }
        }
        worst
    }

    fn jacobi_defect(&self) -> f64 {
        let n = self.dim;
        let e = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (x, y, z) = (e(a), e(b), e(c));
                    let t1 = self.bracket(&x, &self.bracket(&y, &z));
                    let t2 = self.bracket(&y, &self.bracket(&z, &x));
                    let t3 = self.bracket(&z, &self.bracket(&x, &y));
                    for k in 0..n {
                        worst = worst.max((t1[k] + t2[k] + t3[k]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Lie algebra of `G(μ₁, μ₂)` in the basis `(E₁₃, E₂₃, μ₁E₁₁ + μ₂E₂₂)`:
    /// `[e₃, e₁] = μ₁ e₁`, `[e₃, e₂] = μ₂ e₂`, `[e₁, e₂] = 0`.
    pub fn solvable(params: SolvParams) -> Self {
        let SolvParams { mu1, mu2 } = params;
        let basis = vec![
            Matrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0),
            Matrix3::new(mu1, 0.0, 0.0, 0.0, mu2, 0.0, 0.0, 0.0, 0.0),
        ];
        Self::from_brackets(
            3,
            &[
                (0, 2, vec![-mu1, 0.0, 0.0]),
                (1, 2, vec![0.0, -mu2, 0.0]),
            ],
        )
        .and_then(|a| a.with_matrix_basis(basis))
        .expect("solvable algebra is valid")
    }

    /// Heisenberg algebra of dimension `2n + 1`: `[e_i, e_{n+i}] = e_{2n+1}`.
    /// For `n = 1` the basis is `(E₁₂, E₂₃, E₁₃)`.
    pub fn heisenberg(n: usize) -> Self {
        assert!(n >= 1, "Heisenberg algebra needs n >= 1");
        let dim = 2 * n + 1;
        let brackets: Vec<_> = (0..n)
            .map(|i| {
                let mut v = vec![0.0; dim];
                v[2 * n] = 1.0;
                (i, n + i, v)
            })
            .collect();
        let alg = Self::from_brackets(dim, &brackets).expect("Heisenberg algebra is valid");
        if n == 1 {
            let basis = vec![
                Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
                Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0),
                Matrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            ];
            alg.with_matrix_basis(basis).expect("nil3 basis")
        } else {
            alg
        }
    }

    /// Euclidean motions of the plane, basis `(E₁₃, E₂₃, E₂₁ − E₁₂)`:
    /// `[e₃, e₁] = e₂`, `[e₃, e₂] = −e₁`.
    pub fn euclidean_motions() -> Self {
        let basis = vec![
            Matrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0),
            Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        ];
        Self::from_brackets(
            3,
            &[(0, 2, vec![0.0, -1.0, 0.0]), (1, 2, vec![1.0, 0.0, 0.0])],
        )
        .and_then(|a| a.with_matrix_basis(basis))
        .expect("se2 algebra is valid")
    }

    /// `ℝⁿ` with zero bracket; for `n = 3` realized as diagonal matrices.
    pub fn abelian(dim: usize) -> Self {
        let alg = Self::new(dim, vec![0.0; dim * dim * dim]).expect("abelian algebra");
        if dim == 3 {
            let basis = (0..3)
                .map(|i| {
                    let mut m = Matrix3::zeros();
                    m[(i, i)] = 1.0;
                    m
                })
                .collect();
            alg.with_matrix_basis(basis).expect("diagonal basis")
        } else {
            alg
        }
    }
}

/// A bilinear map `μ: 𝔤 × 𝔤 → 𝔤`, i.e. the left-invariant connection `∇_X Y = μ(X, Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionTensor {
    algebra: LieAlgebraData,
    m: Vec<f64>,
}

impl ConnectionTensor {
    pub fn new(algebra: &LieAlgebraData, m: Vec<f64>) -> Result<Self> {
        let n = algebra.dim();
        if m.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                got: m.len(),
            });
        }
        if m.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite connection tensor".into()));
        }
        Ok(ConnectionTensor {
            algebra: algebra.clone(),
            m,
        })
    }

    pub fn zero(algebra: &LieAlgebraData) -> Self {
        let n = algebra.dim();
        ConnectionTensor {
            algebra: algebra.clone(),
            m: vec![0.0; n * n * n],
        }
    }

    pub fn algebra(&self) -> &LieAlgebraData {
        &self.algebra
    }

    pub fn components(&self) -> &[f64] {
        &self.m
    }

    /// `m^k_{ij}`.
    pub fn component(&self, k: usize, i: usize, j: usize) -> f64 {
        let n = self.algebra.dim();
        self.m[k * n * n + i * n + j]
    }

    pub fn apply<T: Scalar>(&self, x: &[T], y: &[T]) -> Vec<T> {
        contract(&self.m, self.algebra.dim(), x, y)
    }

    /// Largest entry of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(&other.m)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    fn map_with_transpose(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.algebra.dim();
        let mut out = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[k * n * n + i * n + j] =
                        f(self.component(k, i, j), self.component(k, j, i));
                }
            }
        }
        ConnectionTensor {
            algebra: self.algebra.clone(),
            m: out,
        }
    }

    /// `(sym μ, skew μ)` with `sym μ(X,Y) = ½(μ(X,Y) + μ(Y,X))` and
    /// `skew μ(X,Y) = ½(μ(X,Y) − μ(Y,X))`.
    pub fn sym_skew_parts(&self) -> (Self, Self) {
        (
            self.map_with_transpose(|a, b| 0.5 * (a + b)),
            self.map_with_transpose(|a, b| 0.5 * (a - b)),
        )
    }

    /// `T(X, Y) = −[X, Y] + μ(X, Y) − μ(Y, X)`.
    pub fn torsion<T: Scalar>(&self, x: &[T], y: &[T]) -> Vec<T> {
        let br = self.algebra.bracket(x, y);
        let xy = self.apply(x, y);
        let yx = self.apply(y, x);
        br.into_iter()
            .zip(xy.into_iter().zip(yx))
            .map(|(b, (p, q))| (p - q) - b)
            .collect()
    }

    /// The torsion-free connection `μ − ½ T^μ` sharing geodesics with `μ`.
    pub fn torsion_free_part(&self) -> Self {
        let n = self.algebra.dim();
        let mut out = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let t = -self.algebra.structure_constant(k, i, j) + self.component(k, i, j)
                        - self.component(k, j, i);
                    out[k * n * n + i * n + j] = self.component(k, i, j) - 0.5 * t;
                }
            }
        }
        ConnectionTensor {
            algebra: self.algebra.clone(),
            m: out,
        }
    }
}

/// `μ(X, Y) = ½(1 + t)[X, Y]`: canonical at `t = −1`, neutral at `t = 0`,
/// anti-canonical at `t = 1`.
pub fn family_mu(algebra: &LieAlgebraData, t: f64) -> ConnectionTensor {
    let s = 0.5 * (1.0 + t);
    ConnectionTensor {
        algebra: algebra.clone(),
        m: algebra.structure().iter().map(|c| s * c).collect(),
    }
}

/// The neutral connection `∇_X Y = ½[X, Y]`.
pub fn neutral(algebra: &LieAlgebraData) -> ConnectionTensor {
    family_mu(algebra, 0.0)
}

/// Non-degenerate symmetric bilinear form `⟨e_i, e_j⟩` on the algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    dim: usize,
    g: Vec<f64>,
}

impl MetricTensor {
    pub fn new(dim: usize, g: Vec<f64>) -> Result<Self> {
        if g.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: g.len(),
            });
        }
        for i in 0..dim {
            for j in 0..dim {
                if (g[i * dim + j] - g[j * dim + i]).abs() > JACOBI_TOL {
                    return Err(Error::InvalidInput("metric is not symmetric".into()));
                }
            }
        }
        let det = DMatrix::from_row_slice(dim, dim, &g).determinant();
        if det.is_nan() || det.abs() <= JACOBI_TOL {
            return Err(Error::SingularMetric { det });
        }
        Ok(MetricTensor { dim, g })
    }

    pub fn identity(dim: usize) -> Self {
        let mut g = vec![0.0; dim * dim];
        for i in 0..dim {
            g[i * dim + i] = 1.0;
        }
        MetricTensor { dim, g }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.dim + j]
    }

    pub fn inner<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
        let mut acc = T::default();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + (x[i] * y[j]) * self.entry(i, j);
            }
        }
        acc
    }
}

/// Levi-Civita connection of the left-invariant metric, from the Koszul formula
/// `⟨∇_X Y, Z⟩ = ½(⟨[X,Y],Z⟩ − ⟨[Y,Z],X⟩ + ⟨[Z,X],Y⟩)`.
pub fn levi_civita(algebra: &LieAlgebraData, metric: &MetricTensor) -> Result<ConnectionTensor> {
    let n = algebra.dim();
    if metric.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: metric.dim(),
        });
    }
    let gm = DMatrix::from_row_slice(n, n, &metric.g);
    let det = gm.determinant();
    let ginv = gm
        .try_inverse()
        .filter(|_| det.abs() > JACOBI_TOL)
        .ok_or(Error::SingularMetric { det })?;
    // ⟨[e_a, e_b], e_c⟩
    let bracket_pairing = |a: usize, b: usize, c: usize| -> f64 {
        (0..n)
            .map(|l| algebra.structure_constant(l, a, b) * metric.entry(l, c))
            .sum()
    };
    let mut m = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let lowered: Vec<f64> = (0..n)
                .map(|k| {
                    0.5 * (bracket_pairing(i, j, k) - bracket_pairing(j, k, i)
                        + bracket_pairing(k, i, j))
                })
                .collect();
            for l in 0..n {
                m[l * n * n + i * n + j] = (0..n).map(|k| ginv[(l, k)] * lowered[k]).sum();
            }
        }
    }
    ConnectionTensor::new(algebra, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn rejects_broken_jacobi() {
        // [e0,e1] = e2, [e1,e2] = e0, [e0,e2] = e0 is not a Lie algebra
        let r = LieAlgebraData::from_brackets(
            3,
            &[
                (0, 1, vec![0.0, 0.0, 1.0]),
                (1, 2, vec![1.0, 0.0, 0.0]),
                (0, 2, vec![1.0, 0.0, 0.0]),
            ],
        );
        assert!(matches!(r, Err(Error::NotALieAlgebra { .. })));
    }

    #[test]
    fn rejects_non_antisymmetric() {
        let mut t = vec![0.0; 8];
        t[1] = 1.0; // c^0_{01} without its partner
        assert!(matches!(
            LieAlgebraData::new(2, t),
            Err(Error::NotALieAlgebra { which: "antisymmetry", .. })
        ));
    }

    #[test]
    fn so3_is_accepted() {
        let so3 = LieAlgebraData::from_brackets(
            3,
            &[
                (0, 1, vec![0.0, 0.0, 1.0]),
                (1, 2, vec![1.0, 0.0, 0.0]),
                (2, 0, vec![0.0, 1.0, 0.0]),
            ],
        );
        assert!(so3.is_ok());
    }

    #[test]
    fn solvable_brackets() {
        let alg = LieAlgebraData::solvable(SolvParams::new(2.0, -3.0));
        assert_eq!(alg.bracket(&e(2, 3), &e(0, 3)), vec![2.0, 0.0, 0.0]);
        assert_eq!(alg.bracket(&e(2, 3), &e(1, 3)), vec![0.0, -3.0, 0.0]);
        assert_eq!(alg.bracket(&e(0, 3), &e(1, 3)), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn family_special_members() {
        let alg = LieAlgebraData::solvable(SolvParams::SOL3);
        assert_eq!(family_mu(&alg, -1.0).max_abs(), 0.0);
        let n = family_mu(&alg, 0.0);
        let a = family_mu(&alg, 1.0);
        for (k, c) in alg.structure().iter().enumerate() {
            assert_eq!(n.components()[k], 0.5 * c);
            assert_eq!(a.components()[k], *c);
        }
    }

    #[test]
    fn torsion_of_family() {
        let alg = LieAlgebraData::solvable(SolvParams::SOL3);
        let x = vec![0.5, -1.25, 2.0];
        let y = vec![-0.75, 0.25, 1.5];
        for t in [-1.0, 0.0, 0.5, 1.0, 3.0] {
            let tor = family_mu(&alg, t).torsion(&x, &y);
            let br = alg.bracket(&x, &y);
            for k in 0..3 {
                assert_eq!(tor[k], t * br[k]);
            }
        }
        let tor = family_mu(&alg, 0.7).torsion(&x, &x);
        assert!(tor.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn sym_skew_of_bracket_family() {
        let alg = LieAlgebraData::heisenberg(1);
        let mu = family_mu(&alg, 0.3);
        let (sym, skew) = mu.sym_skew_parts();
        assert_eq!(sym.max_abs(), 0.0);
        assert_eq!(skew.max_diff(&mu), 0.0);
        let (s2, _) = skew.sym_skew_parts();
        assert_eq!(s2.max_abs(), 0.0);
    }

    #[test]
    fn levi_civita_of_abelian_is_zero() {
        let alg = LieAlgebraData::abelian(3);
        let g = MetricTensor::new(3, vec![2.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 3.0]).unwrap();
        assert_eq!(levi_civita(&alg, &g).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn singular_metric_rejected() {
        assert!(matches!(
            MetricTensor::new(2, vec![1.0, 1.0, 1.0, 1.0]),
            Err(Error::SingularMetric { .. })
        ));
        assert!(MetricTensor::new(2, vec![1.0, 0.5, 0.0, 1.0]).is_err());
    }

    #[test]
    fn sol3_levi_civita_skew_part_is_half_bracket() {
        let alg = LieAlgebraData::solvable(SolvParams::SOL3);
        let lc = levi_civita(&alg, &MetricTensor::identity(3)).unwrap();
        let (_, skew) = lc.sym_skew_parts();
        assert!(skew.max_diff(&neutral(&alg)) < 1e-15);
    }

    #[test]
    fn matrix_basis_mismatch_is_rejected() {
        let alg = LieAlgebraData::abelian(3);
        let bad = LieAlgebraData::euclidean_motions().matrix_basis().unwrap().to_vec();
        assert!(alg.with_matrix_basis(bad).is_err());
    }
}
