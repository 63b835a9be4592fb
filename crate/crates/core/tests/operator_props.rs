//! Operator identities for certified m-symbols and random test functions.

mod common;

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use toda_tau::contour::ContourGrid;
use toda_tau::hardy::{apply_r, project_plus, GridFunction};
use toda_tau::symbol::GroupElement;
use toda_tau::toeplitz::{build_h, build_multiplication, build_s, build_t};

use common::*;

/// Sum of `c/(z − p)` with poles in `D-`, so an element of `H+`.
fn hplus_function(grid: &ContourGrid, seed: u64) -> GridFunction {
    let mut r = rng(seed);
    let terms: Vec<(C64, f64)> =
        (0..3).map(|i| (point_in_dminus(&mut r, grid.domain(), 0.3), 1.0 / (1.0 + i as f64))).collect();
    grid.sample(|z| terms.iter().map(|(p, c)| c / (z - p)).sum())
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn reflection_intertwines_symbol_and_tilde(seed in any::<u64>()) {
        let grid = ContourGrid::default_grid();
        let a = certified_symbol(&grid, &random_q(&mut rng(seed), 3));
        let at = a.tilde(&grid);
        let u = hplus_function(&grid, seed ^ 0x5eed);
        let scale = u.max_abs() * a.sup_norm() * grid.radius();
        let lhs = a.apply(&grid, &apply_r(&grid, &u));
        let rhs = apply_r(&grid, &at.apply(&grid, &u));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12 * scale);
        let lhs = project_plus(&grid, &lhs);
        let rhs = apply_r(&grid, &project_plus(&grid, &at.apply(&grid, &u)));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * scale);
    }

    #[test]
    fn symbol_commutes_with_z_plus_inverse(seed in any::<u64>()) {
        let grid = ContourGrid::default_grid();
        let a = certified_symbol(&grid, &random_q(&mut rng(seed), 3));
        let u = hplus_function(&grid, seed.wrapping_add(1));
        let phi = grid.sample(|z| z + 1.0 / z);
        let lhs = a.apply(&grid, &(&phi * &u));
        let rhs = &phi * &a.apply(&grid, &u);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn t_of_g_a_splits_into_multiplication_and_hankel_parts(
        seed in any::<u64>(),
        h1 in -0.3..0.3f64,
        hm1 in -0.3..0.3f64,
    ) {
        let grid = ContourGrid::default_grid();
        let a = certified_symbol(&grid, &random_q(&mut rng(seed), 2));
        let g = GroupElement::exp_poly(BTreeMap::from([(1, C64::new(h1, 0.0)), (-1, C64::new(hm1, 0.0))]));
        let ga = a.mul_group(&grid, &g).unwrap();
        let t_ga = build_t(&grid, &ga);
        let t_a = build_t(&grid, &a);
        let mult = build_multiplication(&grid, &g.sample(&grid).unwrap());
        let (hg, sa) = (build_h(&grid, &g).unwrap(), build_s(&grid, &a));
        prop_assert_eq!((t_ga.in_lo, t_ga.out_lo), (t_a.in_lo, t_a.out_lo));
        prop_assert_eq!(mult.in_lo, t_a.out_lo);
        let rhs = &mult.entries * &t_a.entries + &hg.entries * &sa.entries;
        let n = grid.n();
        let inner = n / 2;
        let block = |m: &nalgebra::DMatrix<C64>| m.view((n - inner, n - inner), (2 * inner + 1, 2 * inner + 1)).into_owned();
        let gap = block(&(t_ga.entries - rhs)).singular_values().max();
        prop_assert!(gap < 1e-8, "operator-norm gap {gap:.2e}");
    }
}
