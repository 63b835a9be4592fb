//! Direct integration of the Toda lattice and Lax-pair diagnostics.
//!
//! Independent of the tau pipeline: used as ground truth for it.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::jacobi::{JacobiCoefficients, Tail};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("halving the step moved the endpoint by {diff:.3e} (limit {tol:.1e})")]
    StepTooLarge { diff: f64, tol: f64 },
    #[error("a_{n} = {value} is not positive at t = {t}")]
    PositivityLoss { n: i64, value: f64, t: f64 },
    #[error("invalid lattice: {0}")]
    Invalid(String),
}

/// Sites `−L..=L`; sites within `pad` of either end are frozen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeState {
    pub t: f64,
    pub l: i64,
    pub pad: i64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub tail: Tail,
}

impl LatticeState {
    pub fn from_coefficients(q: &JacobiCoefficients, l: i64) -> Self {
        let a = (-l..=l).map(|n| q.a(n)).collect();
        let b = (-l..=l).map(|n| q.b(n)).collect();
        Self { t: 0.0, l, pad: 1, a, b, tail: q.tail }
    }

    fn idx(&self, n: i64) -> Option<usize> {
        if n < -self.l || n > self.l {
            None
        } else {
            Some((n + self.l) as usize)
        }
    }

    pub fn a(&self, n: i64) -> f64 {
        self.idx(n).map_or(self.tail.a, |i| self.a[i])
    }

    pub fn b(&self, n: i64) -> f64 {
        self.idx(n).map_or(self.tail.b, |i| self.b[i])
    }

    pub fn to_coefficients(&self) -> JacobiCoefficients {
        JacobiCoefficients { n_min: -self.l, n_max: self.l, a: self.a.clone(), b: self.b.clone(), tail: self.tail }
    }

    fn frozen(&self, n: i64) -> bool {
        n.abs() > self.l - self.pad
    }

    fn axpy(&self, h: f64, d: &Derivative) -> Self {
        let mut s = self.clone();
        for i in 0..s.a.len() {
            s.a[i] += h * d.da[i];
            s.b[i] += h * d.db[i];
        }
        s
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .chain(self.b.iter().zip(&other.b))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub da: Vec<f64>,
    pub db: Vec<f64>,
}

/// `∂a_n = a_n (b_n − b_{n−1})`, `∂b_n = 2(a_{n+1}² − a_n²)`; frozen sites do not move.
pub fn toda_rhs(s: &LatticeState) -> Derivative {
    let len = s.a.len();
    let mut da = vec![0.0; len];
    let mut db = vec![0.0; len];
    for (i, n) in (-s.l..=s.l).enumerate() {
        if s.frozen(n) {
            continue;
        }
        da[i] = s.a(n) * (s.b(n) - s.b(n - 1));
        db[i] = 2.0 * (s.a(n + 1).powi(2) - s.a(n).powi(2));
    }
    Derivative { da, db }
}

fn rk4_step(s: &LatticeState, h: f64) -> LatticeState {
    let k1 = toda_rhs(s);
    let k2 = toda_rhs(&s.axpy(h / 2.0, &k1));
    let k3 = toda_rhs(&s.axpy(h / 2.0, &k2));
    let k4 = toda_rhs(&s.axpy(h, &k3));
    let mut out = s.clone();
    for i in 0..out.a.len() {
        out.a[i] += h / 6.0 * (k1.da[i] + 2.0 * k2.da[i] + 2.0 * k3.da[i] + k4.da[i]);
        out.b[i] += h / 6.0 * (k1.db[i] + 2.0 * k2.db[i] + 2.0 * k3.db[i] + k4.db[i]);
    }
    out.t = s.t + h;
    out
}

fn run(s0: &LatticeState, t_end: f64, steps: usize) -> Result<Vec<LatticeState>, OracleError> {
    let h = (t_end - s0.t) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(s0.clone());
    for k in 0..steps {
        let next = rk4_step(&out[k], h);
        if let Some((i, &v)) = next.a.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(OracleError::PositivityLoss { n: i as i64 - s0.l, value: v, t: next.t });
        }
        out.push(next);
    }
    if let Some(last) = out.last_mut() {
        last.t = t_end;
    }
    Ok(out)
}

pub const RICHARDSON_TOL: f64 = 1e-9;

/// Fixed-step RK4 from `s0.t` to `t_end` (either direction), every step kept.
///
/// The run is repeated with half the step; the endpoints must agree to 1e-9.
pub fn integrate(s0: &LatticeState, t_end: f64, dt: f64) -> Result<Vec<LatticeState>, OracleError> {
    if !(dt > 0.0) {
        return Err(OracleError::Invalid(format!("dt = {dt}")));
    }
    if s0.l < 2 || s0.a.len() != (2 * s0.l + 1) as usize || s0.b.len() != s0.a.len() {
        return Err(OracleError::Invalid("lattice arrays do not match L".into()));
    }
    let span = (t_end - s0.t).abs();
    let steps = ((span / dt).ceil() as usize).max(1);
    let coarse = run(s0, t_end, steps)?;
    let fine = run(s0, t_end, 2 * steps)?;
    let diff = coarse.last().unwrap().max_diff(fine.last().unwrap());
    if diff > RICHARDSON_TOL {
        return Err(OracleError::StepTooLarge { diff, tol: RICHARDSON_TOL });
    }
    Ok(coarse)
}

/// States at each of the increasing `times`, starting from `s0`.
pub fn integrate_to_times(s0: &LatticeState, times: &[f64], dt: f64) -> Result<Vec<LatticeState>, OracleError> {
    let mut out = Vec::with_capacity(times.len());
    let mut cur = s0.clone();
    for &t in times {
        if t != cur.t {
            cur = integrate(&cur, t, dt)?.pop().unwrap();
        }
        out.push(cur.clone());
    }
    Ok(out)
}

/// Symmetric matrix of `H` on the unfrozen sites.
pub fn lattice_matrix(s: &LatticeState) -> DMatrix<f64> {
    let lo = -s.l + s.pad;
    let size = (2 * (s.l - s.pad) + 1) as usize;
    let mut h = DMatrix::zeros(size, size);
    for i in 0..size {
        let n = lo + i as i64;
        h[(i, i)] = s.b(n);
        if i + 1 < size {
            h[(i, i + 1)] = s.a(n + 1);
            h[(i + 1, i)] = s.a(n + 1);
        }
    }
    h
}

/// `X_a`: strict upper triangle kept, lower triangle negated, diagonal zero.
pub fn antisymmetric_part(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            out[(i, j)] = match i.cmp(&j) {
                std::cmp::Ordering::Less => x[(i, j)],
                std::cmp::Ordering::Greater => -x[(i, j)],
                std::cmp::Ordering::Equal => 0.0,
            };
        }
    }
    out
}

/// `p(H)` by Horner's rule; `p` holds ascending coefficients.
pub fn poly_matrix(h: &DMatrix<f64>, p: &[f64]) -> DMatrix<f64> {
    let n = h.nrows();
    let mut acc = DMatrix::zeros(n, n);
    for &c in p.iter().rev() {
        acc = &acc * h + DMatrix::identity(n, n) * c;
    }
    acc
}

/// `(H, p(H)_a)` on the unfrozen sites.
pub fn lax_matrices(s: &LatticeState, p: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let h = lattice_matrix(s);
    let x = antisymmetric_part(&poly_matrix(&h, p));
    (h, x)
}

/// The skew operator `(Pu)_n = (a_n u_{n+1} − a_{n−1} u_{n−1})/2` with the
/// coupling between sites `n` and `n+1` read as `a_{n+1}`, the convention of `H`.
pub fn flaschka_p(s: &LatticeState) -> DMatrix<f64> {
    let lo = -s.l + s.pad;
    let size = (2 * (s.l - s.pad) + 1) as usize;
    let mut p = DMatrix::zeros(size, size);
    for i in 0..size.saturating_sub(1) {
        let n = lo + i as i64;
        p[(i, i + 1)] = 0.5 * s.a(n + 1);
        p[(i + 1, i)] = -0.5 * s.a(n + 1);
    }
    p
}

/// `Ḣ` as a matrix from the lattice equations.
pub fn hdot_matrix(s: &LatticeState) -> DMatrix<f64> {
    let d = toda_rhs(s);
    let lo = -s.l + s.pad;
    let size = (2 * (s.l - s.pad) + 1) as usize;
    let mut h = DMatrix::zeros(size, size);
    for i in 0..size {
        let n = lo + i as i64;
        let k = (n + s.l) as usize;
        h[(i, i)] = d.db[k];
        if i + 1 < size {
            h[(i, i + 1)] = d.da[k + 1];
            h[(i + 1, i)] = d.da[k + 1];
        }
    }
    h
}

/// `max |Ḣ − [p(H)_a, H]|` over entries at least `margin` sites from the frozen edge.
pub fn lax_residual(s: &LatticeState, p: &[f64], margin: usize) -> f64 {
    let (h, x) = lax_matrices(s, p);
    let comm = &x * &h - &h * &x;
    let hd = hdot_matrix(s);
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in margin..n.saturating_sub(margin) {
        for j in margin..n.saturating_sub(margin) {
            worst = worst.max((hd[(i, j)] - comm[(i, j)]).abs());
        }
    }
    worst
}

/// Eigenvalues outside the tail band, with the two band edges appended.
///
/// Extended states of the truncated matrix feel the frozen ends and move by
/// O(t/L); the band itself and the bound states are what the flow preserves.
fn interior_spectrum(s: &LatticeState) -> Vec<f64> {
    let lo = s.tail.b - 2.0 * s.tail.a;
    let hi = s.tail.b + 2.0 * s.tail.a;
    let mut e: Vec<f64> = SymmetricEigen::new(lattice_matrix(s))
        .eigenvalues
        .iter()
        .copied()
        .filter(|&v| v < lo || v > hi)
        .chain([lo, hi])
        .collect();
    e.sort_by(|a, b| a.total_cmp(b));
    e
}

/// Hausdorff distance between interior spectra, maximized over the trajectory.
pub fn isospectral_drift(traj: &[LatticeState]) -> f64 {
    let Some(first) = traj.first() else { return 0.0 };
    let e0 = interior_spectrum(first);
    traj.iter().skip(1).map(|s| hausdorff(&e0, &interior_spectrum(s))).fold(0.0, f64::max)
}

fn hausdorff(x: &[f64], y: &[f64]) -> f64 {
    let one_side = |p: &[f64], q: &[f64]| {
        p.iter()
            .map(|&v| {
                let i = q.partition_point(|&w| w < v);
                let mut d = f64::INFINITY;
                if i < q.len() {
                    d = d.min((q[i] - v).abs());
                }
                if i > 0 {
                    d = d.min((v - q[i - 1]).abs());
                }
                d
            })
            .fold(0.0, f64::max)
    };
    one_side(x, y).max(one_side(y, x))
}

/// `(tr H, tr H²)` over the unfrozen sites.
pub fn conserved_traces(s: &LatticeState) -> (f64, f64) {
    let h = lattice_matrix(s);
    let t1 = h.trace();
    let t2 = h.iter().map(|v| v * v).sum();
    (t1, t2)
}
