//! Coefficient recovery from symbols and the flow `Toda(g)`.
//!
//! Hierarchy time `t` for a generator `p` acts by `g_t = exp(2t p̂)`, where
//! `p̂` is the polynomial part of `p(z + 1/z)`. With this sign the output
//! solves `∂_t H = [p(H)_a, H]`; for `p(λ) = λ` that is
//! `∂a_n = a_n (b_n − b_{n−1})`, `∂b_n = 2(a_{n+1}² − a_n²)`.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::ContourGrid;
use crate::jacobi::{m_from_q, spectrum_bounds, truncated_matrix, JacobiCoefficients, JacobiError};
use crate::symbol::{msymbol_from_m, GroupElement, SymbolError, VectorSymbol};
use crate::tau::{d_e, TauError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("tau(z^{n}) = {value} is not positive")]
    NonPositiveTau { n: i64, value: C64 },
    #[error("at site {n}: {source}")]
    Tau { n: i64, source: TauError },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
    #[error("output spectrum [{lo:.6}, {hi:.6}] leaves [-{lambda0}, {lambda0}]")]
    SpectrumViolation { lo: f64, hi: f64, lambda0: f64 },
    #[error("at t = {t}: {source}")]
    AtTime { t: f64, source: Box<FlowError> },
    #[error("invalid flow spec: {0}")]
    Spec(String),
}

/// Hierarchy generator and sampling times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    /// Ascending coefficients of `p(λ)`.
    pub p: Vec<f64>,
    pub times: Vec<f64>,
    pub window: [i64; 2],
}

impl FlowSpec {
    pub fn validate(&self) -> Result<(), FlowError> {
        if self.p.is_empty() || self.p.iter().any(|c| !c.is_finite()) {
            return Err(FlowError::Spec("p needs finite coefficients".into()));
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return Err(FlowError::Spec("non-finite time".into()));
        }
        if self.window[0] > self.window[1] {
            return Err(FlowError::Spec(format!("empty window {:?}", self.window)));
        }
        Ok(())
    }

    /// Non-negative part of `p(z + 1/z)` as `{k: coefficient}`.
    pub fn p_hat(&self) -> BTreeMap<i32, f64> {
        p_hat(&self.p)
    }

    /// `exp(2t p̂)`.
    pub fn group_element(&self, t: f64) -> GroupElement {
        hierarchy_element(&self.p, t)
    }
}

/// `p(z + z⁻¹)` expanded; returns all powers.
pub fn laurent_of_p(p: &[f64]) -> BTreeMap<i32, f64> {
    let mut out = BTreeMap::new();
    for (k, &c) in p.iter().enumerate() {
        let mut binom = 1.0;
        for j in 0..=k {
            *out.entry(k as i32 - 2 * j as i32).or_insert(0.0) += c * binom;
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out.retain(|_, c| *c != 0.0);
    out
}

/// Polynomial part of `p(z + z⁻¹)`, constant included.
pub fn p_hat(p: &[f64]) -> BTreeMap<i32, f64> {
    laurent_of_p(p).into_iter().filter(|(k, _)| *k >= 0).collect()
}

/// `g_t = exp(2t p̂)`.
pub fn hierarchy_element(p: &[f64], t: f64) -> GroupElement {
    GroupElement::exp_poly(p_hat(p).into_iter().map(|(k, c)| (k, C64::new(2.0 * t * c, 0.0))).collect())
}

/// Diagnostics from one coefficient recovery.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryDiagnostics {
    pub max_condition: f64,
    /// Smallest tau value used: `τ(z^n)` on the direct route, `τ_{z^k g𝐦}(z⁻¹)` on the shifted one.
    pub min_tau: f64,
}

/// `a_n = sqrt(d_{n−1}/d_n)`, `b_n = e_n − e_{n−1}` with `d_n = τ_{z^n𝐚}(z⁻¹)`.
pub fn coefficients_from_symbol(
    grid: &ContourGrid,
    a: &VectorSymbol,
    window: [i64; 2],
) -> Result<(JacobiCoefficients, RecoveryDiagnostics), FlowError> {
    let [lo, hi] = window;
    let k_lo = (lo - 1).min(0);
    let k_hi = hi.max(1);
    let mut d = BTreeMap::new();
    let mut e = BTreeMap::new();
    let mut max_cond: f64 = 0.0;
    for k in k_lo..=k_hi {
        let (dk, ek, cond) = d_e(grid, a, k).map_err(|source| FlowError::Tau { n: k, source })?;
        if !(dk.re > 0.0) || dk.im.abs() > 1e-8 * dk.norm() {
            return Err(FlowError::NonPositiveTau { n: k, value: dk });
        }
        d.insert(k, dk.re);
        e.insert(k, ek.re);
        max_cond = max_cond.max(cond);
    }
    // τ(z^n) = Π_{k=1}^{n} 1/d_k for n > 0 and Π_{k=n+1}^{0} d_k for n < 0
    let mut min_tau: f64 = 1.0;
    let mut acc = 1.0;
    for k in 1..=hi.max(0) {
        acc /= d[&k];
        min_tau = min_tau.min(acc);
    }
    acc = 1.0;
    for k in ((lo - 1).min(0)..=0).rev() {
        acc *= d[&k];
        min_tau = min_tau.min(acc);
    }
    let q = JacobiCoefficients::from_fn(lo, hi, |n| ((d[&(n - 1)] / d[&n]).sqrt(), e[&n] - e[&(n - 1)]), Default::default());
    Ok((q, RecoveryDiagnostics { max_condition: max_cond, min_tau }))
}

/// Base symbol `𝐦` of `q`.
pub fn symbol_of_q(grid: &ContourGrid, q: &JacobiCoefficients) -> Result<VectorSymbol, FlowError> {
    let m = m_from_q(q)?;
    Ok(msymbol_from_m(grid, &m)?.0)
}

/// Largest excursion of the window spectrum outside `[-λ0, λ0]`.
pub fn check_spectrum(q: &JacobiCoefficients, lambda0: f64) -> Result<(f64, f64), FlowError> {
    let size = (q.n_max - q.n_min + 1) as usize;
    let (lo, hi) = if size == 0 {
        (0.0, 0.0)
    } else {
        let h = truncated_matrix(q, q.n_min, size);
        let eig = nalgebra::SymmetricEigen::new(h).eigenvalues;
        (eig.min(), eig.max())
    };
    if lo < -lambda0 - 0.01 || hi > lambda0 + 0.01 {
        return Err(FlowError::SpectrumViolation { lo, hi, lambda0 });
    }
    Ok((lo, hi))
}

/// `q` re-indexed so that site `n` becomes site 0.
pub fn shift_q(q: &JacobiCoefficients, n: i64) -> JacobiCoefficients {
    JacobiCoefficients { n_min: q.n_min - n, n_max: q.n_max - n, a: q.a.clone(), b: q.b.clone(), tail: q.tail }
}

/// Base symbols of the shifts of `q`, one per site of `window`.
///
/// The flow commutes with the shift, so site `n` of `Toda(g) q` is site 0 of
/// `Toda(g)` applied to `q` shifted by `n`. Reading site 0 needs only the
/// sections of `z⁻¹g𝐦` and `g𝐦`, whose condition stays near `R²` whatever `n`
/// is; the direct route through `τ(z^n)` degrades like `R^{2|n|}`.
#[derive(Debug, Clone)]
pub struct FlowBase {
    pub window: [i64; 2],
    symbols: Vec<VectorSymbol>,
}

impl FlowBase {
    pub fn new(grid: &ContourGrid, q: &JacobiCoefficients, window: [i64; 2]) -> Result<Self, FlowError> {
        if window[0] > window[1] {
            return Err(FlowError::Spec(format!("empty window {window:?}")));
        }
        let symbols = (window[0]..=window[1]).map(|n| symbol_of_q(grid, &shift_q(q, n))).collect::<Result<_, _>>()?;
        Ok(Self { window, symbols })
    }

    /// `Toda(g) q` on the window, with the tau values it used.
    pub fn apply(&self, grid: &ContourGrid, g: &GroupElement) -> Result<(JacobiCoefficients, RecoveryDiagnostics), FlowError> {
        g.validate(grid.domain())?;
        let [lo, hi] = self.window;
        let mut a = Vec::with_capacity(self.symbols.len());
        let mut b = Vec::with_capacity(self.symbols.len());
        let mut max_cond: f64 = 0.0;
        let mut min_tau = f64::INFINITY;
        for (sym, n) in self.symbols.iter().zip(lo..=hi) {
            let ga = sym.mul_group(grid, g)?;
            let mut de = [(0.0, 0.0); 2];
            for (slot, k) in de.iter_mut().zip([-1, 0]) {
                let (dk, ek, cond) = d_e(grid, &ga, k).map_err(|source| FlowError::Tau { n, source })?;
                if !(dk.re > 0.0) || dk.im.abs() > 1e-8 * dk.norm() {
                    return Err(FlowError::NonPositiveTau { n, value: dk });
                }
                *slot = (dk.re, ek.re);
                max_cond = max_cond.max(cond);
                min_tau = min_tau.min(dk.re);
            }
            a.push((de[0].0 / de[1].0).sqrt());
            b.push(de[1].1 - de[0].1);
        }
        let out = JacobiCoefficients { n_min: lo, n_max: hi, a, b, tail: Default::default() };
        check_spectrum(&out, grid.domain().lambda0)?;
        Ok((out, RecoveryDiagnostics { max_condition: max_cond, min_tau }))
    }
}

/// `Toda(g) q` on `window`.
pub fn toda_apply(
    grid: &ContourGrid,
    q: &JacobiCoefficients,
    g: &GroupElement,
    window: [i64; 2],
) -> Result<JacobiCoefficients, FlowError> {
    FlowBase::new(grid, q, window)?.apply(grid, g).map(|(q, _)| q)
}

/// `Toda(g)` from a general base symbol through `τ_{g𝐚}(z^n)`; keep the
/// window within about ten sites of the origin.
pub fn toda_apply_symbol(
    grid: &ContourGrid,
    base: &VectorSymbol,
    g: &GroupElement,
    window: [i64; 2],
) -> Result<(JacobiCoefficients, RecoveryDiagnostics), FlowError> {
    g.validate(grid.domain())?;
    let ga = base.mul_group(grid, g)?;
    let (out, diag) = coefficients_from_symbol(grid, &ga, window)?;
    check_spectrum(&out, grid.domain().lambda0)?;
    Ok((out, diag))
}

/// The `exp(tz)` parametrization; equals the canonical `p(λ) = λ` flow at time `t/2`.
pub fn toda_exp_tz(grid: &ContourGrid, q: &JacobiCoefficients, t: f64, window: [i64; 2]) -> Result<JacobiCoefficients, FlowError> {
    toda_apply(grid, q, &GroupElement::exp_monomial(1, t), window)
}

/// One time slice of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub q: JacobiCoefficients,
    pub diagnostics: RecoveryDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn min_tau(&self) -> f64 {
        self.points.iter().map(|p| p.diagnostics.min_tau).fold(f64::INFINITY, f64::min)
    }

    pub fn max_condition(&self) -> f64 {
        self.points.iter().map(|p| p.diagnostics.max_condition).fold(0.0, f64::max)
    }
}

/// Each time is computed from the base symbol, not by stepping.
pub fn toda_trajectory(grid: &ContourGrid, q: &JacobiCoefficients, spec: &FlowSpec) -> Result<Trajectory, FlowError> {
    spec.validate()?;
    let base = FlowBase::new(grid, q, spec.window)?;
    let mut points = Vec::with_capacity(spec.times.len());
    for &t in &spec.times {
        let g = spec.group_element(t);
        let (q_t, diagnostics) = base.apply(grid, &g).map_err(|e| FlowError::AtTime { t, source: Box::new(e) })?;
        points.push(TrajectoryPoint { t, q: q_t, diagnostics });
    }
    Ok(Trajectory { points })
}

/// Window spectrum of the recovered coefficients, for reporting.
pub fn window_spectrum(q: &JacobiCoefficients) -> (f64, f64) {
    spectrum_bounds(&q.window(q.n_min, q.n_max), (q.n_max - q.n_min + 1) as usize)
}
