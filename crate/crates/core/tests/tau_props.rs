//! Algebraic and positivity properties of tau over random symbols and group elements.

mod common;

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;
use toda_tau::contour::ContourGrid;
use toda_tau::symbol::GroupElement;
use toda_tau::tau::{tau_det, tau_zpow, PhiPair};

use common::*;

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn cocycle_over_rational_and_real_elements(seed in any::<u64>()) {
        let grid = ContourGrid::default_grid();
        let mut r = rng(seed);
        let a = certified_symbol(&grid, &random_q(&mut r, 2));
        let d = grid.domain();
        let (g1, g2) = if r.gen_bool(0.5) {
            (random_rational(&mut r, d), random_rational(&mut r, d))
        } else {
            (random_real_element(&mut r, d), random_real_element(&mut r, d))
        };
        let lhs = tau_det(&grid, &a, &g1.mul(&g2)).unwrap().value;
        let g1a = a.mul_group(&grid, &g1).unwrap();
        let rhs = tau_det(&grid, &a, &g1).unwrap().value * tau_det(&grid, &g1a, &g2).unwrap().value;
        prop_assert!(rel_diff(lhs, rhs) < 1e-7, "{lhs} vs {rhs}");
    }

    #[test]
    fn tilde_symmetry(seed in any::<u64>()) {
        let grid = ContourGrid::default_grid();
        let mut r = rng(seed);
        let a = certified_symbol(&grid, &random_q(&mut r, 2));
        let g = random_rational(&mut r, grid.domain());
        let lhs = tau_det(&grid, &a, &g).unwrap().value;
        let rhs = tau_det(&grid, &a.tilde(&grid), &g.tilde()).unwrap().value;
        prop_assert!(rel_diff(lhs, rhs) < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn symmetric_factor_splits_off(seed in any::<u64>(), c1 in -0.5..0.5f64, c2 in -0.15..0.15f64) {
        let grid = ContourGrid::default_grid();
        let mut r = rng(seed);
        let a = certified_symbol(&grid, &random_q(&mut r, 2));
        let sym = GroupElement::exp_poly(BTreeMap::from([
            (-2, C64::new(c2, 0.0)),
            (-1, C64::new(c1, 0.0)),
            (1, C64::new(c1, 0.0)),
            (2, C64::new(c2, 0.0)),
        ]));
        let g2 = random_rational(&mut r, grid.domain());
        let lhs = tau_det(&grid, &a, &sym.mul(&g2)).unwrap().value;
        let rhs = tau_det(&grid, &a, &sym).unwrap().value * tau_det(&grid, &a, &g2).unwrap().value;
        prop_assert!(rel_diff(lhs, rhs) < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn real_elements_give_positive_real_tau(seed in any::<u64>()) {
        let grid = ContourGrid::default_grid();
        let mut r = rng(seed);
        let a = certified_symbol(&grid, &random_q(&mut r, 3));
        for _ in 0..4 {
            let g = random_real_element(&mut r, grid.domain());
            let v = tau_det(&grid, &a, &g).unwrap();
            prop_assert!(v.is_real(1e-10), "{}", v.value);
            prop_assert!(v.value.re > 0.0, "{}", v.value);
        }
    }

    #[test]
    fn m_symbol_function_is_herglotz_outside(seed in any::<u64>()) {
        let grid = ContourGrid::default_grid();
        let mut r = rng(seed);
        let a = certified_symbol(&grid, &random_q(&mut r, 3));
        let phis = PhiPair::new(&grid, &a).unwrap();
        for _ in 0..8 {
            let rad = r.gen_range(grid.radius() * 1.05..grid.radius() + 6.0);
            let z = C64::from_polar(rad, r.gen_range(0.01..std::f64::consts::PI - 0.01));
            prop_assert!(phis.mfun(z).unwrap().im > 0.0);
        }
    }

    #[test]
    fn endpoint_taus_multiply_to_a1_squared(seed in any::<u64>()) {
        let grid = ContourGrid::default_grid();
        let q = random_q(&mut rng(seed), 3);
        let a = certified_symbol(&grid, &q);
        let prod = tau_zpow(&grid, &a, 1).unwrap().value * tau_zpow(&grid, &a, -1).unwrap().value;
        let want = C64::new(q.a(1) * q.a(1), 0.0);
        prop_assert!(rel_diff(prod, want) < 1e-7, "{prod} vs {want}");
    }
}
