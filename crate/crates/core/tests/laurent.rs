mod common;

use std::f64::consts::TAU;

use harmloop::laurent::{LaurentLoop, C64, EXP_TOL};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Coefficients `|j| <= band` of a function on the circle from `n` samples.
fn dft_coeffs(f: impl Fn(C64) -> C64, n: usize, band: i64) -> Vec<C64> {
    let samples: Vec<(C64, C64)> = (0..n)
        .map(|k| {
            let l = C64::from_polar(1.0, TAU * k as f64 / n as f64);
            (l, f(l))
        })
        .collect();
    (-band..=band)
        .map(|j| samples.iter().map(|(l, v)| v * l.powi(-j as i32)).sum::<C64>() / n as f64)
        .collect()
}

/// `I_j(2) = Σ 1 / (m! (m + j)!)`.
fn bessel_i_at_2(j: u32) -> f64 {
    let mut term = (1..=j).fold(1.0, |acc, k| acc / k as f64);
    let mut sum = 0.0;
    for m in 0..40u32 {
        sum += term;
        term /= ((m + 1) * (m + 1 + j)) as f64;
    }
    sum
}

#[test]
fn exp_matches_dft_and_bessel() {
    let f = LaurentLoop::from_fn(1, |j| if j == 0 { c(0.0, 0.0) } else { c(1.0, 0.0) });
    let e = f.exp(4).unwrap();
    let oracle = dft_coeffs(|l| (l + l.inv()).exp(), 256, 4);
    for (j, o) in (-4..=4).zip(&oracle) {
        let got = e.value.coeff(j);
        assert!((got - o).norm() < EXP_TOL, "j = {j}: {got} vs {o}");
        assert!((got.re - bessel_i_at_2(j.unsigned_abs() as u32)).abs() < EXP_TOL);
        assert!(got.im.abs() < EXP_TOL);
    }
    // The tail outside the band is I_5(2) + I_6(2) + … on both sides.
    let tail: f64 = (5..30).map(|j| 2.0 * bessel_i_at_2(j)).sum();
    assert!((e.discarded - tail).abs() < 1e-12);
}

#[test]
fn exp_of_random_two_sided_loop_matches_dft() {
    let mut rng = common::rng(11);
    for _ in 0..10 {
        let f = LaurentLoop::from_fn(3, |_| common::disk(&mut rng, 0.6));
        let e = f.exp(8).unwrap();
        let oracle = dft_coeffs(|l| f.eval(l).unwrap().exp(), 256, 8);
        for (j, o) in (-8..=8).zip(&oracle) {
            assert!((e.value.coeff(j) - o).norm() < 1e-12);
        }
    }
}

#[test]
fn real_part_is_pointwise_real_part() {
    let mut rng = common::rng(12);
    let f = LaurentLoop::from_fn(5, |_| common::disk(&mut rng, 1.0));
    let r = f.real_part();
    for k in 0..64 {
        let l = C64::from_polar(1.0, TAU * k as f64 / 64.0);
        let v = f.eval(l).unwrap();
        let expect = (v + v.conj()) * 0.5;
        assert!((r.eval(l).unwrap() - expect).norm() < 1e-13);
    }
}

#[test]
fn eval_matches_naive_sum() {
    let mut rng = common::rng(13);
    for _ in 0..20 {
        let f = LaurentLoop::from_fn(7, |_| common::disk(&mut rng, 1.0));
        for l in [c(0.0, 1.0), c(0.6, 0.8), c(1.3, -0.2), c(0.4, 0.3)] {
            let naive: C64 = f.iter().map(|(j, a)| a * l.powi(j as i32)).sum();
            assert!((f.eval(l).unwrap() - naive).norm() < 1e-12 * naive.norm().max(1.0));
        }
    }
}

#[test]
fn eval_at_zero_is_an_error() {
    assert!(LaurentLoop::one(2).eval(c(0.0, 0.0)).is_err());
}

#[test]
fn one_sided_exp_is_exact_on_the_band() {
    let one_sided = LaurentLoop::from_fn(2, |j| if j < 0 { c(0.5, 0.2) } else { c(0.0, 0.0) });
    let e = one_sided.exp(4).unwrap();
    assert!(e.discarded > 0.0);
    // The kept coefficients are still exact: compare with the DFT oracle.
    let oracle = dft_coeffs(|l| one_sided.eval(l).unwrap().exp(), 256, 4);
    for (j, o) in (-4..=4).zip(&oracle) {
        assert!((e.value.coeff(j) - o).norm() < 1e-14);
    }
}

/// Gaussian-integer coefficients keep every product exact in floating point.
fn small_loop(band: usize, support: i64) -> impl Strategy<Value = LaurentLoop> {
    proptest::collection::vec((-4i32..=4, -4i32..=4), 2 * band + 1).prop_map(move |v| {
        LaurentLoop::from_fn(band, |j| {
            if j.abs() > support {
                return c(0.0, 0.0);
            }
            let (a, b) = v[(j + band as i64) as usize];
            c(a as f64, b as f64)
        })
    })
}

fn unit_loop(band: usize) -> impl Strategy<Value = LaurentLoop> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * band + 1).prop_map(move |v| {
        LaurentLoop::from_fn(band, |j| {
            let (a, b) = v[(j + band as i64) as usize];
            c(a, b)
        })
    })
}

proptest! {
    #[test]
    fn ring_axioms_without_truncation(f in small_loop(8, 2), g in small_loop(8, 2), h in small_loop(8, 2)) {
        let fg = f.mul(&g, 8).value;
        let left = fg.mul(&h, 8);
        let right = f.mul(&g.mul(&h, 8).value, 8);
        prop_assert_eq!(left.discarded, 0.0);
        prop_assert_eq!(&left.value, &right.value);
        let dist = f.mul(&(&g + &h), 8).value;
        prop_assert_eq!(dist, &fg + &f.mul(&h, 8).value);
        prop_assert_eq!(fg, g.mul(&f, 8).value);
    }

    #[test]
    fn conj_reflect_is_an_involutive_anti_automorphism(f in small_loop(6, 3), g in small_loop(6, 3)) {
        prop_assert_eq!(f.conj_reflect().conj_reflect(), f.clone());
        let lhs = f.mul(&g, 6).value.conj_reflect();
        let rhs = f.conj_reflect().mul(&g.conj_reflect(), 6).value;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn real_part_is_idempotent_and_real(f in unit_loop(6)) {
        let r = f.real_part();
        prop_assert_eq!(r.real_part(), r.clone());
        prop_assert!(r.reality_defect() < 1e-15);
        for k in 0..32 {
            let l = C64::from_polar(1.0, TAU * (k as f64 + 0.25) / 32.0);
            prop_assert!(r.eval(l).unwrap().im.abs() < 1e-12);
        }
    }

    #[test]
    fn one_sided_exp_inverts(f in unit_loop(5), negative in any::<bool>()) {
        let f = if negative { f.negative_part() } else { f.nonnegative_part() };
        let band = 40;
        let a = f.exp(band).unwrap().value;
        let b = (-&f).exp(band).unwrap().value;
        let prod = a.mul(&b, band).value;
        // Only the side away from the truncation edge is exact.
        let keep = if negative { (-20, 0) } else { (0, 20) };
        let err = (&prod.project_band(keep.0, keep.1) - &LaurentLoop::one(band)).max_abs();
        prop_assert!(err < 10.0 * EXP_TOL * (1.0 + f.mass()).exp(), "err = {err}");
    }

    #[test]
    fn negative_and_nonnegative_parts_partition(f in unit_loop(4)) {
        prop_assert_eq!(&f.negative_part() + &f.nonnegative_part(), f.clone());
        prop_assert!(f.negative_part().iter().all(|(j, v)| j < 0 || v == c(0.0, 0.0)));
    }

    #[test]
    fn widening_preserves_values(f in unit_loop(3), extra in 0usize..5) {
        let w = f.widened(3 + extra);
        prop_assert_eq!(w.with_band(3).value, f.clone());
        prop_assert_eq!(w.with_band(3).discarded, 0.0);
        let l = c(0.3, 0.95);
        prop_assert!((w.eval(l).unwrap() - f.eval(l).unwrap()).norm() < 1e-14);
    }
}
