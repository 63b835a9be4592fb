//! Grid functions on the contour and their Riesz projections.
//!
//! Coefficients are held in two normalizations. Raw coefficients `c_n`
//! satisfy `u(z) = Σ c_n z^n`. Scaled coefficients `ĉ_n = c_n R^{|n|}` are the
//! coefficients against `ẑ_n = z^n R^{-|n|}`, which has unit size on the
//! circle where it is largest, so they stay O(1) for any resolved function.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::contour::ContourGrid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("truncation edge carries {ratio:.3e} of the peak scaled coefficient")]
    Truncation { ratio: f64 },
    #[error("evaluation point {zeta} is within {dist:.3e} of the contour (minimum {dist_min:.3e})")]
    EvalTooClose { zeta: C64, dist: f64, dist_min: f64 },
    #[error("evaluation point {0} is not in D-")]
    NotInDMinus(C64),
    #[error("grid function has {got} samples, grid has {expected}")]
    Length { got: usize, expected: usize },
    #[error("grid function contains a non-finite sample")]
    NonFinite,
}

/// Samples on all `2M` contour nodes, outer circle first.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<C64>,
}

impl GridFunction {
    pub fn from_values(values: Vec<C64>) -> Self {
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn constant(len: usize, c: C64) -> Self {
        Self { values: vec![c; len] }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values_outer(&self) -> &[C64] {
        &self.values[..self.values.len() / 2]
    }

    pub fn values_inner(&self) -> &[C64] {
        &self.values[self.values.len() / 2..]
    }

    pub fn validate(&self, grid: &ContourGrid) -> Result<(), HardyError> {
        if self.values.len() != grid.len() {
            return Err(HardyError::Length { got: self.values.len(), expected: grid.len() });
        }
        if self.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(HardyError::NonFinite);
        }
        Ok(())
    }

    pub fn map<F: FnMut(C64) -> C64>(&self, f: F) -> Self {
        Self { values: self.values.iter().copied().map(f).collect() }
    }

    pub fn zip_with<F: FnMut(C64, C64) -> C64>(&self, other: &Self, mut f: F) -> Self {
        assert_eq!(self.len(), other.len(), "grid function length mismatch");
        Self { values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &GridFunction {
    type Output = GridFunction;
    fn mul(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a * b)
    }
}

/// Raw Laurent coefficients `c_lo, …, c_{lo+len-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentVector {
    pub lo: i64,
    pub coeffs: Vec<C64>,
}

impl LaurentVector {
    pub fn zeros(lo: i64, hi: i64) -> Self {
        Self { lo, coeffs: vec![C64::new(0.0, 0.0); (hi - lo + 1).max(0) as usize] }
    }

    /// `z^n` on the window `[lo, hi]`.
    pub fn monomial(lo: i64, hi: i64, n: i64) -> Self {
        let mut v = Self::zeros(lo, hi);
        v.set(n, C64::new(1.0, 0.0));
        v
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> C64 {
        if n < self.lo || n > self.hi() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(n - self.lo) as usize]
        }
    }

    /// Panics when `n` is outside the window.
    pub fn set(&mut self, n: i64, c: C64) {
        assert!(n >= self.lo && n <= self.hi(), "index {n} outside window");
        let lo = self.lo;
        self.coeffs[(n - lo) as usize] = c;
    }

    /// `ĉ_n = c_n R^{|n|}`.
    pub fn to_scaled(&self, radius: f64) -> Vec<C64> {
        (self.lo..=self.hi()).map(|n| self.get(n) * radius.powi(n.abs() as i32)).collect()
    }

    pub fn from_scaled(lo: i64, scaled: &[C64], radius: f64) -> Self {
        let coeffs = scaled.iter().enumerate().map(|(i, c)| c / radius.powi((lo + i as i64).abs() as i32)).collect();
        Self { lo, coeffs }
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.lo as i32)
    }
}

/// Full-resolution split of a grid function into Fourier modes.
///
/// `outer[k]` are the normalized DFT coefficients of the `C1` samples and
/// `inner[k]` those of the `C2` samples, both indexed by `k mod M`. The `H+`
/// part of `f` has scaled coefficient `outer[k]` for `k ≥ 0` and `inner[k]`
/// for `k < 0`; the remaining modes belong to `H-`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    m: usize,
    outer: Vec<C64>,
    inner: Vec<C64>,
}

impl Spectrum {
    pub fn of(grid: &ContourGrid, f: &GridFunction) -> Self {
        let m = grid.m();
        let scale = 1.0 / m as f64;
        let mut outer = f.values()[..m].to_vec();
        grid.fft_forward(&mut outer);
        let mut inner = f.values()[m..].to_vec();
        grid.fft_inverse(&mut inner);
        for v in outer.iter_mut().chain(inner.iter_mut()) {
            *v *= scale;
        }
        Self { m, outer, inner }
    }

    fn idx(&self, k: i64) -> usize {
        k.rem_euclid(self.m as i64) as usize
    }

    /// Scaled `H+` coefficient `ĉ_k`; zero outside `|k| < M/2`.
    pub fn scaled(&self, k: i64) -> C64 {
        let half = (self.m / 2) as i64;
        if k >= half || k <= -half {
            C64::new(0.0, 0.0)
        } else if k >= 0 {
            self.outer[self.idx(k)]
        } else {
            self.inner[self.idx(k)]
        }
    }

    pub fn scaled_window(&self, lo: i64, hi: i64) -> Vec<C64> {
        (lo..=hi).map(|k| self.scaled(k)).collect()
    }

    /// Largest scaled `H+` coefficient in modulus.
    pub fn peak(&self) -> f64 {
        let half = (self.m / 2) as i64;
        (-half + 1..half).map(|k| self.scaled(k).norm()).fold(0.0, f64::max)
    }
}

/// Grid values of `Σ_{k} ĉ_k ẑ_k` with `ĉ_k = coeff(k)` for `|k| < M/2`.
pub fn synthesize_scaled<F: Fn(i64) -> C64>(grid: &ContourGrid, coeff: F) -> GridFunction {
    let m = grid.m();
    let half = (m / 2) as i64;
    let r2 = grid.radius() * grid.radius();
    let mut outer = vec![C64::new(0.0, 0.0); m];
    let mut inner = vec![C64::new(0.0, 0.0); m];
    for k in -half + 1..half {
        let c = coeff(k);
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        let i = k.rem_euclid(m as i64) as usize;
        if k >= 0 {
            outer[i] = c;
            inner[i] = c * r2.powi(-k as i32);
        } else {
            outer[i] = c * r2.powi(k as i32);
            inner[i] = c;
        }
    }
    grid.fft_inverse(&mut outer);
    grid.fft_forward(&mut inner);
    outer.extend(inner);
    GridFunction::from_values(outer)
}

/// Grid values of the scaled window vector `ĉ_lo, …`.
pub fn synthesize_scaled_window(grid: &ContourGrid, lo: i64, scaled: &[C64]) -> GridFunction {
    let hi = lo + scaled.len() as i64 - 1;
    synthesize_scaled(grid, |k| if k < lo || k > hi { C64::new(0.0, 0.0) } else { scaled[(k - lo) as usize] })
}

/// `ẑ_k = z^k R^{-|k|}` on the grid.
pub fn scaled_monomial(grid: &ContourGrid, k: i64) -> GridFunction {
    let m = grid.m();
    let r = grid.radius();
    let kk = k as i32;
    let outer_mod = r.powi(kk - kk.abs());
    let inner_mod = r.powi(-kk - kk.abs());
    let mut v = Vec::with_capacity(2 * m);
    for j in 0..m as i64 {
        v.push(grid.root(j * k) * outer_mod);
    }
    for j in 0..m as i64 {
        v.push(grid.root(-j * k) * inner_mod);
    }
    GridFunction::from_values(v)
}

/// Raw coefficients `c_{-N..N}` of the `H+` part of `f`.
pub fn analyze(grid: &ContourGrid, f: &GridFunction) -> LaurentVector {
    let n = grid.n() as i64;
    let spec = Spectrum::of(grid, f);
    LaurentVector::from_scaled(-n, &spec.scaled_window(-n, n), grid.radius())
}

/// As [`analyze`], failing when the truncation edge carries energy.
pub fn analyze_checked(grid: &ContourGrid, f: &GridFunction) -> Result<LaurentVector, HardyError> {
    let n = grid.n() as i64;
    let spec = Spectrum::of(grid, f);
    check_edge(&spec, n)?;
    Ok(LaurentVector::from_scaled(-n, &spec.scaled_window(-n, n), grid.radius()))
}

pub(crate) fn check_edge(spec: &Spectrum, n: i64) -> Result<(), HardyError> {
    let peak = spec.peak();
    if peak == 0.0 {
        return Ok(());
    }
    let edge = spec.scaled(n).norm().max(spec.scaled(-n).norm());
    let ratio = edge / peak;
    if ratio > 1e-8 {
        Err(HardyError::Truncation { ratio })
    } else {
        Ok(())
    }
}

/// `u(z)` at each point.
pub fn synthesize(u: &LaurentVector, points: &[C64]) -> Vec<C64> {
    points.iter().map(|&z| u.eval(z)).collect()
}

/// `u` sampled on the grid.
pub fn synthesize_on_grid(grid: &ContourGrid, u: &LaurentVector) -> GridFunction {
    let scaled = u.to_scaled(grid.radius());
    synthesize_scaled_window(grid, u.lo, &scaled)
}

/// `𝔭+ f` with every resolved mode kept.
pub fn project_plus(grid: &ContourGrid, f: &GridFunction) -> GridFunction {
    let spec = Spectrum::of(grid, f);
    synthesize_scaled(grid, |k| spec.scaled(k))
}

/// `𝔭- f = f − 𝔭+ f`.
pub fn project_minus(grid: &ContourGrid, f: &GridFunction) -> GridFunction {
    f - &project_plus(grid, f)
}

fn check_eval_point(grid: &ContourGrid, zeta: C64) -> Result<(), HardyError> {
    let d = grid.domain();
    let dist = d.dist_to_contour(zeta);
    if dist < d.dist_min() {
        return Err(HardyError::EvalTooClose { zeta, dist, dist_min: d.dist_min() });
    }
    let r = zeta.norm();
    if r <= d.radius && r >= d.inner_radius() {
        return Err(HardyError::NotInDMinus(zeta));
    }
    Ok(())
}

/// `(1/2πi) ∫_C f(λ)/(ζ−λ) dλ` for `ζ ∈ D-`.
///
/// Any `H+` component of `f` integrates to zero, so `f` need not be projected.
pub fn eval_hminus(grid: &ContourGrid, f: &GridFunction, zeta: C64) -> Result<C64, HardyError> {
    check_eval_point(grid, zeta)?;
    let s: C64 = f.values().iter().zip(grid.weights()).zip(grid.nodes()).map(|((v, w), l)| v * w / (zeta - l)).sum();
    Ok(s / C64::new(0.0, 2.0 * PI))
}

/// Derivative of [`eval_hminus`] in `ζ`.
pub fn eval_hminus_derivative(grid: &ContourGrid, f: &GridFunction, zeta: C64) -> Result<C64, HardyError> {
    check_eval_point(grid, zeta)?;
    let s: C64 = f
        .values()
        .iter()
        .zip(grid.weights())
        .zip(grid.nodes())
        .map(|((v, w), l)| {
            let d = zeta - l;
            v * w / (d * d)
        })
        .sum();
    Ok(-s / C64::new(0.0, 2.0 * PI))
}

/// `lim_{z→∞} z·(𝔭- f)(z) = (1/2πi) ∫_C f dλ`.
pub fn hminus_limit_at_infinity(grid: &ContourGrid, f: &GridFunction) -> C64 {
    grid.contour_integral(f) / C64::new(0.0, 2.0 * PI)
}

/// `(Rf)(z) = z⁻¹ f(z⁻¹)`.
pub fn apply_r(grid: &ContourGrid, f: &GridFunction) -> GridFunction {
    let nodes = grid.nodes();
    let v = (0..grid.len()).map(|i| f.values()[grid.reciprocal_index(i)] / nodes[i]).collect();
    GridFunction::from_values(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn monomial_analysis() {
        let g = ContourGrid::default_grid();
        let f = g.sample(|z| z.powi(3));
        let u = analyze(&g, &f);
        for n in u.lo..=u.hi() {
            let want = if n == 3 { 1.0 } else { 0.0 };
            assert!((u.get(n) - want).norm() < 1e-12, "n = {n}");
        }
        let f = g.sample(|z| z.powi(-5));
        assert!((analyze(&g, &f).get(-5) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn geometric_coefficients_outside() {
        let g = ContourGrid::default_grid();
        let zeta = c(4.5, 1.0);
        let f = g.sample(|z| 1.0 / (z - zeta));
        let u = analyze(&g, &f);
        for n in 0..10 {
            let want = -zeta.powi(-(n as i32) - 1);
            assert!((u.get(n) - want).norm() < 1e-12);
        }
        for n in 1..10 {
            assert!(u.get(-n).norm() < 1e-12);
        }
    }

    #[test]
    fn hminus_functions_project_to_zero() {
        let g = ContourGrid::default_grid();
        let w = c(0.8, 0.9);
        let f = g.sample(|z| 1.0 / (z - w));
        let u = analyze(&g, &f);
        assert!(u.coeffs.iter().all(|c| c.norm() < 1e-12));
        assert!(project_minus(&g, &f).max_abs_diff(&f) < 1e-12);
        let zeta = c(5.0, -1.0);
        let h = g.sample(|z| 1.0 / (z - zeta));
        assert!(project_minus(&g, &h).max_abs() < 1e-12);
        let p = g.sample(|z| z.powi(3));
        assert!(project_minus(&g, &p).max_abs() < 1e-10);
    }

    #[test]
    fn synthesize_examples() {
        let one = LaurentVector::monomial(-2, 2, 0);
        assert!((synthesize(&one, &[c(0.3, 0.2)])[0] - 1.0).norm() < 1e-15);
        let z = LaurentVector::monomial(-2, 2, 1);
        assert!((synthesize(&z, &[c(2.0, 0.0)])[0] - 2.0).norm() < 1e-15);
    }

    #[test]
    fn round_trip_on_grid() {
        let g = ContourGrid::default_grid();
        let n = g.n() as i64;
        let mut u = LaurentVector::zeros(-n, n);
        for k in -n..=n {
            let s = (k as f64 * 0.37).sin();
            u.set(k, c(s, (k as f64 * 0.11).cos()) / g.radius().powi(k.abs() as i32));
        }
        let f = synthesize_on_grid(&g, &u);
        let direct = synthesize(&u, g.nodes());
        let scale = f.max_abs();
        for (a, b) in f.values().iter().zip(&direct) {
            assert!((a - b).norm() < 1e-12 * scale);
        }
        let back = analyze(&g, &f);
        let r = g.radius();
        for k in -n..=n {
            assert!(((back.get(k) - u.get(k)) * r.powi(k.abs() as i32)).norm() < 1e-12);
        }
    }

    #[test]
    fn eval_hminus_matches_residue() {
        let g = ContourGrid::default_grid();
        let w = c(1.2, -0.4);
        let f = g.sample(|z| 1.0 / (z - w));
        for zeta in [c(4.0, 1.0), c(0.1, 0.05), c(-10.0, 3.0)] {
            let v = eval_hminus(&g, &f, zeta).unwrap();
            assert!((v - 1.0 / (zeta - w)).norm() < 1e-12);
            let d = eval_hminus_derivative(&g, &f, zeta).unwrap();
            assert!((d + 1.0 / ((zeta - w) * (zeta - w))).norm() < 1e-11);
        }
        assert!((hminus_limit_at_infinity(&g, &f) - 1.0).norm() < 1e-12);
        assert_eq!(eval_hminus(&g, &GridFunction::zeros(g.len()), c(5.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(matches!(eval_hminus(&g, &f, c(3.0, 0.0)), Err(HardyError::EvalTooClose { .. })));
        assert!(matches!(eval_hminus(&g, &f, c(1.0, 0.0)), Err(HardyError::NotInDMinus(_))));
    }

    #[test]
    fn hminus_tail_sum() {
        // f = Σ_{k≥1} w^{k-1} z^{-k} = 1/(z−w) outside, checked against the partial sum
        let g = ContourGrid::default_grid();
        let w = c(0.5, 0.5);
        let f = g.sample(|z| 1.0 / (z - w));
        let zeta = c(6.0, 2.0);
        let tail: C64 = (1..200).map(|k| w.powi(k - 1) * zeta.powi(-k)).sum();
        assert!((eval_hminus(&g, &f, zeta).unwrap() - tail).norm() < 1e-8);
    }

    #[test]
    fn r_involution() {
        let g = ContourGrid::default_grid();
        let f = g.sample(|z| z.powi(4));
        let rf = apply_r(&g, &f);
        let want = g.sample(|z| z.powi(-5));
        assert!(rf.max_abs_diff(&want) < 1e-12 * want.max_abs());
        let h = g.sample(|z| (z - 0.3).exp() / (z - c(5.0, 1.0)));
        assert!(apply_r(&g, &apply_r(&g, &h)).max_abs_diff(&h) < 1e-13);
    }

    #[test]
    fn edge_warning() {
        let g = ContourGrid::default_grid();
        let smooth = g.sample(|z| 1.0 / (z - 5.0));
        assert!(analyze_checked(&g, &smooth).is_ok());
        let rough = g.sample(|z| 1.0 / (z - 3.2));
        assert!(matches!(analyze_checked(&g, &rough), Err(HardyError::Truncation { .. })));
    }
}
