//! Random inputs shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toda_tau::contour::{AnnulusDomain, ContourGrid};
use toda_tau::flow::check_spectrum;
use toda_tau::jacobi::{m_from_q, JacobiCoefficients, Tail};
use toda_tau::symbol::{msymbol_from_m, GroupElement, VectorSymbol};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Eventually-free q with `a ∈ [0.5, 2]`, `b ∈ [-0.5, 0.5]` on a window of at most
/// `2·half + 1` sites, resampled until the spectrum sits inside `[-2.45, 2.45]`.
pub fn random_q(rng: &mut ChaCha8Rng, half: i64) -> JacobiCoefficients {
    loop {
        let lo = -rng.gen_range(0..=half);
        let hi = rng.gen_range(0..=half);
        let len = (hi - lo + 1) as usize;
        let a: Vec<f64> = (0..len).map(|_| rng.gen_range(0.5..2.0)).collect();
        let b: Vec<f64> = (0..len).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let q = JacobiCoefficients { n_min: lo, n_max: hi, a, b, tail: Tail::default() };
        if check_spectrum(&q.window(lo - 10, hi + 10), 2.44).is_ok() {
            return q;
        }
    }
}

pub fn certified_symbol(grid: &ContourGrid, q: &JacobiCoefficients) -> VectorSymbol {
    let m = m_from_q(q).expect("m-function");
    let (sym, cert) = msymbol_from_m(grid, &m).expect("m-symbol");
    cert.require().expect("certificate");
    sym
}

/// A point of `D-` separated from both circles by the relative `margin`.
pub fn point_in_dminus(rng: &mut ChaCha8Rng, domain: &AnnulusDomain, margin: f64) -> C64 {
    let r = if rng.gen_bool(0.5) {
        rng.gen_range(domain.radius * (1.0 + margin)..domain.radius + 5.0)
    } else {
        rng.gen_range(0.05..1.0 / (domain.radius * (1.0 + margin)))
    };
    C64::from_polar(r, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

pub fn real_in_dminus(rng: &mut ChaCha8Rng, domain: &AnnulusDomain, margin: f64) -> C64 {
    let z = point_in_dminus(rng, domain, margin);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    C64::new(sign * z.norm(), 0.0)
}

/// `q_ζ` or its inverse with `ζ` in `D-`, possibly complex.
pub fn random_rational(rng: &mut ChaCha8Rng, domain: &AnnulusDomain) -> GroupElement {
    let mut g = GroupElement::identity();
    for _ in 0..rng.gen_range(1..=2) {
        let f = GroupElement::q_zeta(point_in_dminus(rng, domain, 0.3));
        g = g.mul(&if rng.gen_bool(0.5) { f } else { f.inverse() });
    }
    g
}

/// `r·e^h` with `r` built from `q_x^{±1}`, `r_ζ^{±1}` and `h` a real Laurent polynomial.
pub fn random_real_element(rng: &mut ChaCha8Rng, domain: &AnnulusDomain) -> GroupElement {
    let mut g = GroupElement::identity();
    for _ in 0..rng.gen_range(0..=2) {
        let f = if rng.gen_bool(0.5) {
            GroupElement::q_zeta(real_in_dminus(rng, domain, 0.3))
        } else {
            GroupElement::r_zeta(point_in_dminus(rng, domain, 0.3))
        };
        g = g.mul(&if rng.gen_bool(0.5) { f } else { f.inverse() });
    }
    let mut h = BTreeMap::new();
    for k in [-2i32, -1, 1, 2] {
        if rng.gen_bool(0.5) {
            let scale = if k.abs() == 1 { 0.6 } else { 0.15 };
            h.insert(k, C64::new(rng.gen_range(-scale..scale), 0.0));
        }
    }
    let mut out = g.mul(&GroupElement::exp_poly(h));
    out.real = true;
    out
}

pub fn rel_diff(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Case count with failure persistence off; integration tests have no `lib.rs` to anchor it.
pub fn cases(n: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases: n, failure_persistence: None, ..Default::default() }
}
