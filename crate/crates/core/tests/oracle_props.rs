//! Conservation laws and the Lax form along direct lattice integration.

mod common;

use proptest::prelude::*;
use toda_tau::oracle::{conserved_traces, integrate_to_times, isospectral_drift, lax_residual, LatticeState};

use common::*;

proptest! {
    #![proptest_config(cases(8))]

    #[test]
    fn integration_conserves_traces_and_spectrum(seed in any::<u64>()) {
        let q = random_q(&mut rng(seed), 3);
        let s0 = LatticeState::from_coefficients(&q, 120);
        let snaps = integrate_to_times(&s0, &[0.0, 0.25, 0.5], 1e-3).unwrap();
        let (t1, t2) = conserved_traces(&snaps[0]);
        for s in &snaps {
            let (u1, u2) = conserved_traces(s);
            prop_assert!((u1 - t1).abs() < 1e-8 && (u2 - t2).abs() < 1e-8);
            prop_assert!(s.a.iter().all(|&a| a > 0.0));
        }
        prop_assert!(isospectral_drift(&snaps) < 1e-4);
    }

    #[test]
    fn lax_residual_vanishes_along_the_trajectory(seed in any::<u64>()) {
        let q = random_q(&mut rng(seed), 3);
        let s0 = LatticeState::from_coefficients(&q, 60);
        for s in integrate_to_times(&s0, &[0.0, 0.3], 1e-3).unwrap() {
            prop_assert!(lax_residual(&s, &[0.0, 1.0], 2) < 1e-8);
        }
    }

    #[test]
    fn reversed_integration_returns(seed in any::<u64>()) {
        let q = random_q(&mut rng(seed), 3);
        let s0 = LatticeState::from_coefficients(&q, 60);
        let fwd = integrate_to_times(&s0, &[0.3], 1e-3).unwrap();
        let back = integrate_to_times(&fwd[0], &[0.0], 1e-3).unwrap();
        prop_assert!(back[0].max_diff(&s0) < 1e-8);
    }
}
