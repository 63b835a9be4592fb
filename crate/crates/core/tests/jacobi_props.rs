//! Weyl and m-functions, and the q -> m -> symbol -> q bijection.

mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;
use toda_tau::contour::ContourGrid;
use toda_tau::flow::coefficients_from_symbol;
use toda_tau::jacobi::{m_from_q, validate_m, weyl_plus, weyl_plus_with_buffer, JacobiCoefficients, Tail};
use toda_tau::symbol::GroupElement;

use common::*;

/// Spectral parameter in the upper half plane, at least 0.1 from `[-2.5, 2.5]`.
fn upper_w() -> impl Strategy<Value = C64> {
    (-4.0..4.0f64, 0.1..3.0f64).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #![proptest_config(cases(32))]

    #[test]
    fn weyl_function_is_herglotz(seed in any::<u64>(), w in upper_w()) {
        let q = random_q(&mut rng(seed), 4);
        prop_assert!(weyl_plus(&q, w).unwrap().im > 0.0);
        prop_assert!(weyl_plus(&q, w.conj()).unwrap().im < 0.0);
    }

    #[test]
    fn doubling_the_buffer_changes_nothing(seed in any::<u64>(), w in upper_w()) {
        let q = random_q(&mut rng(seed), 4);
        let a = weyl_plus_with_buffer(&q, w, 200).unwrap();
        let b = weyl_plus_with_buffer(&q, w, 400).unwrap();
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn stripping_one_site_follows_the_recurrence(seed in any::<u64>(), w in upper_w()) {
        let q = random_q(&mut rng(seed), 4);
        let shifted = JacobiCoefficients::from_fn(q.n_min - 1, q.n_max - 1, |n| (q.a(n + 1), q.b(n + 1)), Tail::default());
        let m = weyl_plus(&q, w).unwrap();
        let m1 = weyl_plus(&shifted, w).unwrap();
        let want = 1.0 / (q.b(1) - w - q.a(2) * q.a(2) * m1);
        prop_assert!((m - want).norm() < 1e-10 * want.norm().max(1.0));
    }

    #[test]
    fn m_functions_of_random_q_are_certified(seed in any::<u64>()) {
        let q = random_q(&mut rng(seed), 4);
        let m = m_from_q(&q).unwrap();
        let cert = validate_m(&m, 50, seed).unwrap();
        prop_assert!(cert.herglotz && cert.reality && cert.asymptotics && cert.nondegenerate);
    }

    #[test]
    fn coefficients_json_round_trip(seed in any::<u64>()) {
        let q = random_q(&mut rng(seed), 6);
        let text = serde_json::to_string(&q).unwrap();
        let back: JacobiCoefficients = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, q);
    }

    #[test]
    fn group_element_json_round_trip(seed in any::<u64>()) {
        let grid = ContourGrid::default_grid();
        let mut r = rng(seed);
        let g = if r.gen_bool(0.5) {
            random_rational(&mut r, grid.domain())
        } else {
            random_real_element(&mut r, grid.domain())
        };
        let back: GroupElement = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        prop_assert_eq!(back, g);
    }
}

proptest! {
    #![proptest_config(cases(8))]

    #[test]
    fn round_trip_through_the_symbol(seed in any::<u64>()) {
        let grid = ContourGrid::default_grid();
        let q = random_q(&mut rng(seed), 3);
        let sym = certified_symbol(&grid, &q);
        let window = [q.n_min - 2, q.n_max + 2];
        let (out, diag) = coefficients_from_symbol(&grid, &sym, window).unwrap();
        prop_assert!(diag.min_tau > 0.0);
        prop_assert!(out.max_diff(&q, window[0], window[1]) < 1e-7);
    }
}
