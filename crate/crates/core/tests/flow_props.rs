//! Structural properties of the tau-built flow.

mod common;

use proptest::prelude::*;
use toda_tau::contour::{build_domain, ContourGrid};
use toda_tau::flow::{hierarchy_element, toda_apply, toda_exp_tz, toda_trajectory, FlowSpec};
use toda_tau::jacobi::JacobiCoefficients;

use common::*;

const W: [i64; 2] = [-6, 6];

proptest! {
    #![proptest_config(cases(6))]

    #[test]
    fn flow_composes(beta in -0.5..0.5f64, t1 in 0.0..0.25f64, t2 in 0.0..0.25f64) {
        let grid = ContourGrid::default_grid();
        let q = JacobiCoefficients::one_site(beta);
        let p = [0.0, 1.0];
        let direct = toda_apply(&grid, &q, &hierarchy_element(&p, t1 + t2), W).unwrap();
        let mid = toda_apply(&grid, &q, &hierarchy_element(&p, t1), [-40, 40]).unwrap();
        let twice = toda_apply(&grid, &mid, &hierarchy_element(&p, t2), W).unwrap();
        prop_assert!(direct.max_diff(&twice, W[0], W[1]) < 1e-7);
    }

    #[test]
    fn radius_does_not_matter(seed in any::<u64>(), t in 0.0..0.5f64) {
        let g30 = build_domain(2.5, 3.0, 256, 64).unwrap();
        let g35 = build_domain(2.5, 3.5, 256, 64).unwrap();
        let q = random_q(&mut rng(seed), 2);
        let g = hierarchy_element(&[0.0, 1.0, 0.3], t);
        let a = toda_apply(&g30, &q, &g, W).unwrap();
        let b = toda_apply(&g35, &q, &g, W).unwrap();
        prop_assert!(a.max_diff(&b, W[0], W[1]) < 1e-7);
    }

    #[test]
    fn trajectories_stay_in_the_positive_cone(seed in any::<u64>()) {
        let grid = ContourGrid::default_grid();
        let q = random_q(&mut rng(seed), 2);
        let spec = FlowSpec { p: vec![0.0, 1.0], times: vec![0.0, 0.2, 0.4], window: W };
        let traj = toda_trajectory(&grid, &q, &spec).unwrap();
        prop_assert!(traj.min_tau() > 0.0);
        for pt in &traj.points {
            prop_assert!(pt.q.a.iter().all(|&a| a > 0.0));
        }
    }

    #[test]
    fn exp_tz_runs_at_half_speed(beta in -0.5..0.5f64, t in 0.0..0.6f64) {
        let grid = ContourGrid::default_grid();
        let q = JacobiCoefficients::one_site(beta);
        let a = toda_exp_tz(&grid, &q, t, W).unwrap();
        let b = toda_apply(&grid, &q, &hierarchy_element(&[0.0, 1.0], t / 2.0), W).unwrap();
        prop_assert!(a.max_diff(&b, W[0], W[1]) < 1e-10);
    }
}
