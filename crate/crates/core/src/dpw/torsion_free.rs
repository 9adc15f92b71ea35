//! Exponential solutions `exp(λ⁻¹∫Φ + λ∫Φ̄)` for commuting `Φ`.

use nalgebra::Matrix3;

use super::poly::HoloPoly;
use crate::error::{Error, Result};
use crate::laurent::{C64, ZERO};
use crate::liegroup::{matrix_exp3, LieAlgebraData};

const COMMUTE_TOL: f64 = 1e-10;
const COMMUTE_SAMPLES: usize = 9;

/// Largest `|[Φ(t), Φ̄(t)]|` over sample points of the segment `z_* → z`, relative to `max(1, |Φ|²)`.
pub fn commutator_defect(phi: &[HoloPoly], alg: &LieAlgebraData, base: C64, z: C64) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..COMMUTE_SAMPLES {
        let t = base + (z - base) * (j as f64 / (COMMUTE_SAMPLES - 1) as f64);
        let v: Vec<C64> = phi.iter().map(|p| p.eval(t)).collect();
        let vc: Vec<C64> = v.iter().map(|c| c.conj()).collect();
        let br = alg.bracket(&v, &vc);
        let size = v.iter().map(|c| c.norm_sqr()).sum::<f64>().max(1.0);
        worst = worst.max(br.iter().map(|c| c.norm()).fold(0.0, f64::max) / size);
    }
    worst
}

/// `exp(λ⁻¹ ∫_{z_*}^z Φ + λ conj(∫_{z_*}^z Φ))` in the algebra's matrix realization.
pub fn torsion_free_map(
    phi: &[HoloPoly],
    alg: &LieAlgebraData,
    base: C64,
    z: C64,
    lambda: C64,
) -> Result<Matrix3<C64>> {
    if phi.len() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            got: phi.len(),
        });
    }
    if lambda == ZERO {
        return Err(Error::ZeroArgument);
    }
    let residual = commutator_defect(phi, alg, base, z);
    if residual > COMMUTE_TOL {
        return Err(Error::NonCommuting { residual });
    }
    let x: Vec<C64> = phi
        .iter()
        .map(|p| {
            let i = p.integrate(base, z);
            i / lambda + lambda * i.conj()
        })
        .collect();
    let m = alg
        .to_matrix(&x)
        .ok_or_else(|| Error::InvalidInput("algebra has no 3x3 matrix realization".into()))?;
    Ok(matrix_exp3(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::Group;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_potential_is_identity() {
        let alg = LieAlgebraData::heisenberg(1);
        let phi = vec![HoloPoly::zero(); 3];
        let m = torsion_free_map(&phi, &alg, ZERO, c(0.3, 0.2), c(1.0, 0.0)).unwrap();
        assert_eq!(m, Matrix3::identity());
    }

    #[test]
    fn vertical_plane_in_nil3() {
        let alg = LieAlgebraData::heisenberg(1);
        let phi = vec![
            HoloPoly::constant(c(0.5, 0.0)),
            HoloPoly::zero(),
            HoloPoly::constant(c(0.0, -0.5)),
        ];
        assert!(commutator_defect(&phi, &alg, ZERO, c(1.0, 1.0)) < 1e-15);
        let z = c(0.7, -0.4);
        let m = torsion_free_map(&phi, &alg, ZERO, z, c(1.0, 0.0)).unwrap();
        let p = Group::NIL3.from_matrix(&m.map(|v| v.re)).unwrap();
        assert!((p[0] - 0.7).abs() < 1e-15);
        assert!(p[1].abs() < 1e-15);
        assert!((p[2] + 0.4).abs() < 1e-15);
    }

    #[test]
    fn non_commuting_rejected() {
        let alg = LieAlgebraData::heisenberg(1);
        let phi = vec![
            HoloPoly::constant(c(1.0, 0.0)),
            HoloPoly::constant(c(0.0, 1.0)),
            HoloPoly::zero(),
        ];
        assert!(matches!(
            torsion_free_map(&phi, &alg, ZERO, c(0.5, 0.0), c(1.0, 0.0)),
            Err(Error::NonCommuting { .. })
        ));
    }

    #[test]
    fn abelian_linear_immersion() {
        let alg = LieAlgebraData::abelian(3);
        let v = [c(0.5, 0.2), c(-0.1, 0.3), c(0.25, -0.4)];
        let phi: Vec<_> = v.iter().map(|&a| HoloPoly::constant(a)).collect();
        let z = c(0.3, 0.8);
        let m = torsion_free_map(&phi, &alg, ZERO, z, c(1.0, 0.0)).unwrap();
        let p = Group::Abelian { dim: 3 }.from_matrix(&m.map(|v| v.re)).unwrap();
        for k in 0..3 {
            assert!((p[k] - 2.0 * (z * v[k]).re).abs() < 1e-14);
        }
    }
}
