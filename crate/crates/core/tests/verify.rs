mod common;

use harmloop::dpw::{default_lambdas, synthesize, GridSpec, MapGrid, SynthesisOptions};
use harmloop::gallery;
use harmloop::laurent::C64;
use harmloop::liegroup::{levi_civita, neutral, Group, LieAlgebraData, MetricTensor, SolvParams, SolvPoint};
use harmloop::verify::{
    admissibility_residual, field_derivatives, flatness_field, general_harmonicity_field,
    maurer_cartan_field, metric_harmonicity_field, numeric_mc_form, pluriharmonicity_field,
    torsion_free_field, Family, ResidualField,
};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn smooth_map(grid: GridSpec, a: [f64; 6]) -> MapGrid {
    MapGrid::from_fn(grid, |z| {
        let (x, y) = (z.re, z.im);
        SolvPoint::new(
            a[0] * (x + a[1] * y).sin() + x,
            a[2] * x * y + y,
            a[3] * (a[4] * x - y).cos() + a[5] * x * x,
        )
    })
}

fn defined(f: &ResidualField) -> impl Iterator<Item = &Vec<C64>> {
    f.values.iter().flatten()
}

#[test]
fn quadratic_fields_are_differentiated_exactly() {
    let grid = common::square_grid(1.0, 9);
    // f = x² + 3xy − y²: f_z = x + (3/2)y + i(y − (3/2)x), f_z̄ its conjugate, f_zz̄ = 0.
    let values: Vec<Option<Vec<C64>>> = (0..grid.len())
        .map(|i| {
            let z = grid.point_at(i);
            let (x, y) = (z.re, z.im);
            Some(vec![c(x * x + 3.0 * x * y - y * y, 0.0), c(x * x + y * y, 0.0)])
        })
        .collect();
    let d = field_derivatives(&grid, &values);
    for (i, p) in d.iter().enumerate() {
        let z = grid.point_at(i);
        let edge = z.re.abs() > 0.99 || z.im.abs() > 0.99;
        let Some(p) = p else {
            assert!(edge);
            continue;
        };
        let (x, y) = (z.re, z.im);
        assert!((p.z[0] - c(x + 1.5 * y, y - 1.5 * x)).norm() < 1e-13);
        assert!((p.zb[0] - c(x + 1.5 * y, 1.5 * x - y)).norm() < 1e-13);
        assert!(p.zzb[0].norm() < 1e-12);
        assert!((p.zzb[1] - c(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn maurer_cartan_form_of_the_horosphere() {
    let grid = common::square_grid(0.5, 9);
    let form = gallery::horosphere(grid).mc_form().unwrap();
    assert!(form.is_real());
    for a in form.a.iter().flatten() {
        assert!((a[0] - c(0.5, 0.0)).norm() < 1e-13);
        assert!((a[1] - c(0.0, -0.5)).norm() < 1e-13);
        assert!(a[2].norm() < 1e-13);
    }
}

#[test]
fn horosphere_is_not_metric_harmonic() {
    let grid = common::square_grid(0.5, 17);
    let horo = gallery::horosphere(grid);
    let r = metric_harmonicity_field(&horo.map_grid().unwrap(), SolvParams::H3).unwrap();
    for v in defined(&r) {
        assert!(v[0].norm() < 1e-12 && v[1].norm() < 1e-12);
        assert!((v[2].norm() - 0.5).abs() < 1e-12);
    }
    let form = horo.mc_form().unwrap();
    let lc = levi_civita(&LieAlgebraData::solvable(SolvParams::H3), &MetricTensor::identity(3)).unwrap();
    assert!(admissibility_residual(&form, &lc).max_norm > 0.1);
    assert!(horo.neutral_residual().unwrap().max_norm < 1e-12);
}

#[test]
fn paraboloid_has_constant_bracket() {
    let grid = common::square_grid(0.5, 9);
    let form = gallery::hyperbolic_paraboloid(grid).mc_form().unwrap();
    let r = torsion_free_field(&form, &LieAlgebraData::heisenberg(1));
    let first = defined(&r).next().unwrap().clone();
    assert!(first[2].norm() > 0.5);
    for v in defined(&r) {
        for (a, b) in v.iter().zip(&first) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn pipeline_output_is_harmonic_at_every_order() {
    let mut rng = common::rng(51);
    let pot = common::potential(&mut rng, 2, 0.5, SolvParams::SOL3);
    let group = Group::Solv(pot.params);
    let alg = group.algebra();
    let (mut hs, mut flat, mut harm) = (Vec::new(), Vec::new(), Vec::new());
    for n in common::REFINEMENT {
        let s = synthesize(&pot, common::square_grid(0.5, n), &SynthesisOptions::default()).unwrap();
        let form = numeric_mc_form(&s.map, &group).unwrap();
        hs.push(1.0 / (n - 1) as f64);
        flat.push(common::max_on(&flatness_field(&form, &alg, c(0.0, 1.0), Family::Neutral), common::FORM_HALF));
        harm.push(common::max_on(&general_harmonicity_field(&form, &neutral(&alg)), common::FORM_HALF));
    }
    let (sf, sh) = (common::slope(&hs, &flat), common::slope(&hs, &harm));
    assert!((sf - 2.0).abs() < 0.2, "flatness slope {sf}");
    assert!((sh - 2.0).abs() < 0.2, "harmonicity slope {sh}");
}

#[test]
fn vacuum_of_commuting_fields_is_torsion_free() {
    let grid = common::square_grid(0.5, 17);
    let alg = LieAlgebraData::heisenberg(1);
    let f = gallery::vacuum_map(&[0.7, 0.0, 0.4], &[0.0, 0.0, -1.1], &Group::NIL3, grid).unwrap();
    let r = torsion_free_field(&f.mc_form().unwrap(), &alg).report("tf");
    assert!(r.max_norm < 1e-13);
    let g = gallery::vacuum_map(&[0.7, 0.0, 0.0], &[0.0, 0.5, 0.0], &Group::NIL3, grid).unwrap();
    assert!(torsion_free_field(&g.mc_form().unwrap(), &alg).report("tf").max_norm > 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pluriharmonicity_is_flatness_minus_harmonicity(
        a in proptest::array::uniform6(-1.0f64..1.0), m1 in -1.5f64..1.5, m2 in -1.5f64..1.5,
    ) {
        let p = SolvParams::new(m1, m2);
        let group = Group::Solv(p);
        let alg = group.algebra();
        let form = numeric_mc_form(&smooth_map(common::square_grid(0.6, 11), a), &group).unwrap();
        let lc = levi_civita(&alg, &MetricTensor::identity(3)).unwrap();
        let mc = maurer_cartan_field(&form, &alg);
        let harm = general_harmonicity_field(&form, &lc);
        let pluri = pluriharmonicity_field(&form, &lc);
        for ((m, h), q) in mc.values.iter().zip(&harm.values).zip(&pluri.values) {
            if let (Some(m), Some(h), Some(q)) = (m, h, q) {
                for k in 0..3 {
                    prop_assert!((m[k] - h[k] - q[k]).norm() < 1e-12 * (1.0 + m[k].norm()));
                }
            }
        }
    }

    #[test]
    fn neutral_family_endpoints(a in proptest::array::uniform6(-1.0f64..1.0), k in 0usize..4) {
        let group = Group::Solv(common::MUS[k]);
        let alg = group.algebra();
        let form = numeric_mc_form(&smooth_map(common::square_grid(0.6, 11), a), &group).unwrap();
        let at_one = flatness_field(&form, &alg, c(1.0, 0.0), Family::Neutral);
        prop_assert!(defined(&at_one).all(|v| v.iter().all(|x| *x == c(0.0, 0.0))));
        let mc = maurer_cartan_field(&form, &alg);
        let at_minus_one = flatness_field(&form, &alg, c(-1.0, 0.0), Family::Neutral);
        prop_assert!(at_minus_one.max_diff(&mc) < 1e-12);
        let tf = flatness_field(&form, &alg, c(1.0, 0.0), Family::TorsionFree);
        prop_assert!(tf.max_diff(&mc) < 1e-12);
    }

    #[test]
    fn family_flatness_is_a_sweep_maximum(a in proptest::array::uniform6(-1.0f64..1.0)) {
        let group = Group::Solv(SolvParams::SOL3);
        let alg = group.algebra();
        let form = numeric_mc_form(&smooth_map(common::square_grid(0.6, 11), a), &group).unwrap();
        let lambdas = default_lambdas();
        let sweep = harmloop::verify::flatness_sweep(&form, &alg, &lambdas, Family::Neutral);
        prop_assert_eq!(sweep.per_lambda.len(), lambdas.len());
        let best = sweep.per_lambda.iter().map(|r| r.max_norm).fold(0.0, f64::max);
        prop_assert_eq!(best, sweep.max_norm);
    }
}
