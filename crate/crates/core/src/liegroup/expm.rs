//! 3×3 complex matrix exponential.

use nalgebra::Matrix3;

use crate::laurent::{C64, ONE, ZERO};

const TAYLOR_TERMS: usize = 18;
const SCALED_NORM: f64 = 0.5;

fn one_norm(a: &Matrix3<C64>) -> f64 {
    (0..3)
        .map(|j| (0..3).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `(e^x − 1)/x`, continuous at 0.
pub fn expm1_over_x(x: C64) -> C64 {
    if x.norm() < 1e-5 {
        ONE + x / 2.0 + x * x / 6.0 + x * x * x / 24.0
    } else {
        (x.exp() - ONE) / x
    }
}

fn strictly_upper(a: &Matrix3<C64>) -> bool {
    (0..3).all(|i| (0..=i).all(|j| a[(i, j)] == ZERO))
}

/// Diagonal in the upper-left 2×2 block, free last column, zero last row.
fn solvable_pattern(a: &Matrix3<C64>) -> bool {
    a[(0, 1)] == ZERO
        && a[(1, 0)] == ZERO
        && a[(2, 0)] == ZERO
        && a[(2, 1)] == ZERO
        && a[(2, 2)] == ZERO
}

pub fn matrix_exp3(a: &Matrix3<C64>) -> Matrix3<C64> {
    if strictly_upper(a) {
        return Matrix3::identity() + a + a * a * C64::new(0.5, 0.0);
    }
    if solvable_pattern(a) {
        let (p, q) = (a[(0, 0)], a[(1, 1)]);
        return Matrix3::new(
            p.exp(),
            ZERO,
            a[(0, 2)] * expm1_over_x(p),
            ZERO,
            q.exp(),
            a[(1, 2)] * expm1_over_x(q),
            ZERO,
            ZERO,
            ONE,
        );
    }
    let norm = one_norm(a);
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let b = a * C64::new(0.5f64.powi(squarings), 0.0);
    let mut sum = Matrix3::identity();
    let mut term = Matrix3::identity();
    for k in 1..=TAYLOR_TERMS {
        term = term * b / C64::new(k as f64, 0.0);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}
