//! Vector symbols `𝐚 = (a1, a2)` and the groups acting on them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::{AnnulusDomain, ContourGrid};
use crate::hardy::GridFunction;
use crate::jacobi::MFunctionHandle;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("point {point} is within 1e-12 of a pole")]
    PoleHit { point: C64 },
    #[error("symbol group membership failed: {0}")]
    CertFail(String),
    #[error("group element has a zero or pole at {0} inside the closed annulus")]
    SingularityInPlus(C64),
    #[error("group element flagged real is not conjugation symmetric: {0}")]
    NotReal(String),
    #[error("m-function evaluation failed at {point}: {message}")]
    MFunction { point: C64, message: String },
    #[error("malformed group element: {0}")]
    Malformed(String),
}

pub type SymbolEvaluator = Arc<dyn Fn(C64) -> (C64, C64) + Send + Sync>;

/// Pair of functions on the contour acting by `(𝐚u)(λ) = a1 u(λ) + a2 λ⁻¹ u(λ⁻¹)`.
///
/// `shift` is the winding index of the symbol: the offset of the input window
/// that makes the finite section of `T(𝐚)` well posed. It is zero for symbol
/// group members and accumulates `index_shift(g)` under multiplication by `g`.
#[derive(Clone)]
pub struct VectorSymbol {
    pub a1: GridFunction,
    pub a2: GridFunction,
    pub shift: i64,
    pub real: bool,
    pub evaluator: Option<SymbolEvaluator>,
}

impl fmt::Debug for VectorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorSymbol")
            .field("shift", &self.shift)
            .field("real", &self.real)
            .field("closed_form", &self.evaluator.is_some())
            .finish_non_exhaustive()
    }
}

impl VectorSymbol {
    pub fn new(a1: GridFunction, a2: GridFunction, real: bool) -> Self {
        Self { a1, a2, shift: 0, real, evaluator: None }
    }

    /// The unit `(1, 0)`.
    pub fn identity(grid: &ContourGrid) -> Self {
        let mut s = Self::new(
            GridFunction::constant(grid.len(), C64::new(1.0, 0.0)),
            GridFunction::zeros(grid.len()),
            true,
        );
        s.evaluator = Some(Arc::new(|_| (C64::new(1.0, 0.0), C64::new(0.0, 0.0))));
        s
    }

    pub fn from_fn<F>(grid: &ContourGrid, f: F, real: bool) -> Self
    where
        F: Fn(C64) -> (C64, C64) + Send + Sync + 'static,
    {
        let (a1, a2): (Vec<C64>, Vec<C64>) = grid.nodes().iter().map(|&z| f(z)).unzip();
        let mut s = Self::new(GridFunction::from_values(a1), GridFunction::from_values(a2), real);
        s.evaluator = Some(Arc::new(f));
        s
    }

    /// Closed-form value at `z`, when available.
    pub fn eval(&self, z: C64) -> Option<(C64, C64)> {
        self.evaluator.as_ref().map(|f| f(z))
    }

    pub fn sup_norm(&self) -> f64 {
        self.a1
            .values()
            .iter()
            .zip(self.a2.values())
            .map(|(a, b)| (a.norm_sqr() + b.norm_sqr()).sqrt())
            .fold(0.0, f64::max)
    }

    /// `𝐚 u` on the grid.
    pub fn apply(&self, grid: &ContourGrid, u: &GridFunction) -> GridFunction {
        let nodes = grid.nodes();
        let (a1, a2, uv) = (self.a1.values(), self.a2.values(), u.values());
        let v = (0..grid.len()).map(|i| a1[i] * uv[i] + a2[i] * uv[grid.reciprocal_index(i)] / nodes[i]).collect();
        GridFunction::from_values(v)
    }

    /// `𝐚̃(λ) = 𝐚(λ⁻¹)`.
    pub fn tilde(&self, grid: &ContourGrid) -> Self {
        let perm = |f: &GridFunction| {
            GridFunction::from_values((0..grid.len()).map(|i| f.values()[grid.reciprocal_index(i)]).collect())
        };
        Self {
            a1: perm(&self.a1),
            a2: perm(&self.a2),
            shift: -self.shift,
            real: self.real,
            evaluator: self.evaluator.clone().map(|f| Arc::new(move |z: C64| f(1.0 / z)) as SymbolEvaluator),
        }
    }

    /// `g·𝐚` for scalar grid values `g`, with the given index shift of `g`.
    pub fn scale_by(&self, g: &GridFunction, shift: i64, real: bool) -> Self {
        Self {
            a1: &self.a1 * g,
            a2: &self.a2 * g,
            shift: self.shift + shift,
            real: self.real && real,
            evaluator: None,
        }
    }

    /// `g·𝐚` for a flow-group element.
    pub fn mul_group(&self, grid: &ContourGrid, g: &GroupElement) -> Result<Self, SymbolError> {
        let gv = g.sample(grid)?;
        let mut out = self.scale_by(&gv, g.index_shift(), g.real);
        if let Some(f) = self.evaluator.clone() {
            let g = g.clone();
            out.evaluator = Some(Arc::new(move |z: C64| {
                let (a, b) = f(z);
                let s = g.eval(z).unwrap_or(C64::new(f64::NAN, f64::NAN));
                (a * s, b * s)
            }));
        }
        Ok(out)
    }

    /// `z^n 𝐚`.
    pub fn mul_zpow(&self, grid: &ContourGrid, n: i64) -> Self {
        let zn = grid.sample(|z| z.powi(n as i32));
        self.scale_by(&zn, n, true)
    }

    /// `𝐦·𝐧 = (m1 n1 + m2 ñ2, m1 n2 + m2 ñ1)`.
    pub fn product(&self, grid: &ContourGrid, other: &Self) -> Self {
        let nt = other.tilde(grid);
        let a1 = &(&self.a1 * &other.a1) + &(&self.a2 * &nt.a2);
        let a2 = &(&self.a1 * &other.a2) + &(&self.a2 * &nt.a1);
        Self { a1, a2, shift: self.shift + other.shift, real: self.real && other.real, evaluator: None }
    }

    /// `m1 m̃1 − m2 m̃2`.
    pub fn det_function(&self, grid: &ContourGrid) -> GridFunction {
        let t = self.tilde(grid);
        &(&self.a1 * &t.a1) - &(&self.a2 * &t.a2)
    }

    /// `(m̃1/D, −m2/D)` with `D = m1 m̃1 − m2 m̃2`.
    pub fn inverse(&self, grid: &ContourGrid) -> Self {
        let t = self.tilde(grid);
        let d = self.det_function(grid);
        Self {
            a1: t.a1.zip_with(&d, |a, d| a / d),
            a2: self.a2.zip_with(&d, |a, d| -a / d),
            shift: -self.shift,
            real: self.real,
            evaluator: None,
        }
    }

    /// Largest violation of `a_j(λ̄) = conj(a_j(λ))` on the grid.
    pub fn reality_defect(&self, grid: &ContourGrid) -> f64 {
        let mut worst: f64 = 0.0;
        for f in [&self.a1, &self.a2] {
            for i in 0..grid.len() {
                let j = grid.conjugate_index(i);
                worst = worst.max((f.values()[j] - f.values()[i].conj()).norm());
            }
        }
        worst
    }

    /// Membership checks for the symbol group, sampled on the grid.
    pub fn certify(&self, grid: &ContourGrid) -> MSymbolCert {
        let mean = |v: &[C64]| v.iter().sum::<C64>() / v.len() as f64;
        let m1_at_0 = mean(self.a1.values_inner());
        let m1_at_inf = mean(self.a1.values_outer());
        let m2_at_0 = mean(self.a2.values_inner());
        let m2_at_inf = mean(self.a2.values_outer());
        let sup = self.sup_norm();
        let min_det = self.det_function(grid).values().iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        let tol = 1e-10;
        let points_ok = (m1_at_0 - 1.0).norm() < tol
            && (m1_at_inf - 1.0).norm() < tol
            && m2_at_0.norm() < tol
            && m2_at_inf.norm() < tol;
        let det_ok = min_det > 1e-8 * sup.max(1.0);
        MSymbolCert {
            m1_at_0,
            m1_tilde_at_0: m1_at_inf,
            m2_at_0,
            m2_tilde_at_0: m2_at_inf,
            min_det,
            sup_norm: sup,
            det_identity_residual: None,
            member: points_ok && det_ok,
        }
    }
}

/// Outcome of the symbol group membership checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MSymbolCert {
    pub m1_at_0: C64,
    /// `m̃1(0) = m1(∞)`.
    pub m1_tilde_at_0: C64,
    pub m2_at_0: C64,
    pub m2_tilde_at_0: C64,
    /// `min |m1 m̃1 − m2 m̃2|` over the grid.
    pub min_det: f64,
    pub sup_norm: f64,
    /// Max deviation from `(m(z) − m(z⁻¹))/(z − z⁻¹)`, when built from an m-function.
    pub det_identity_residual: Option<f64>,
    pub member: bool,
}

impl MSymbolCert {
    pub fn require(&self) -> Result<(), SymbolError> {
        if self.member && self.det_identity_residual.is_none_or(|r| r < 1e-8) {
            Ok(())
        } else {
            Err(SymbolError::CertFail(format!(
                "m1(0)={:.3e}, m1(inf)={:.3e}, m2(0)={:.3e}, m2(inf)={:.3e}, min det={:.3e}, det identity residual={:?}",
                self.m1_at_0, self.m1_tilde_at_0, self.m2_at_0, self.m2_tilde_at_0, self.min_det, self.det_identity_residual
            )))
        }
    }
}

/// `𝐦 = ((zm−1)/(z²−1), z²(z−m)/(z²−1))` with its certificate.
pub fn msymbol_from_m(grid: &ContourGrid, m: &MFunctionHandle) -> Result<(VectorSymbol, MSymbolCert), SymbolError> {
    let mut vals = Vec::with_capacity(grid.len());
    for &z in grid.nodes() {
        let v = m.eval(z).map_err(|e| SymbolError::MFunction { point: z, message: e.to_string() })?;
        vals.push(v);
    }
    let comp = |z: C64, mv: C64| {
        let d = z * z - 1.0;
        ((z * mv - 1.0) / d, z * z * (z - mv) / d)
    };
    let (a1, a2): (Vec<C64>, Vec<C64>) = grid.nodes().iter().zip(&vals).map(|(&z, &mv)| comp(z, mv)).unzip();
    let mut sym = VectorSymbol::new(GridFunction::from_values(a1), GridFunction::from_values(a2), m.is_real());
    let handle = m.clone();
    sym.evaluator = Some(Arc::new(move |z: C64| {
        let mv = handle.eval(z).unwrap_or(C64::new(f64::NAN, f64::NAN));
        comp(z, mv)
    }));
    let mut cert = sym.certify(grid);
    let det = sym.det_function(grid);
    let mut resid: f64 = 0.0;
    for i in 0..grid.len() {
        let z = grid.nodes()[i];
        let want = (vals[i] - vals[grid.reciprocal_index(i)]) / (z - 1.0 / z);
        resid = resid.max((det.values()[i] - want).norm() / want.norm().max(1.0));
    }
    cert.det_identity_residual = Some(resid);
    cert.require()?;
    Ok((sym, cert))
}

/// `g = scale · Π(z − zeros)/Π(z − poles) · exp(Σ h_k z^k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub zeros: Vec<C64>,
    pub poles: Vec<C64>,
    pub exponent: BTreeMap<i32, C64>,
    pub real: bool,
    pub scale: C64,
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::identity()
    }
}

impl GroupElement {
    pub fn identity() -> Self {
        Self { zeros: vec![], poles: vec![], exponent: BTreeMap::new(), real: true, scale: C64::new(1.0, 0.0) }
    }

    pub fn rational(zeros: Vec<C64>, poles: Vec<C64>) -> Self {
        let real = conj_closed(&zeros) && conj_closed(&poles);
        Self { zeros, poles, real, ..Self::identity() }
    }

    /// `q_ζ(z) = (1 − z/ζ)⁻¹`; `q_0` is taken as `z⁻¹`.
    pub fn q_zeta(zeta: C64) -> Self {
        let scale = if zeta == C64::new(0.0, 0.0) { C64::new(1.0, 0.0) } else { -zeta };
        Self { poles: vec![zeta], real: zeta.im == 0.0, scale, ..Self::identity() }
    }

    /// `r_ζ = q_ζ q_ζ̄`.
    pub fn r_zeta(zeta: C64) -> Self {
        let mut g = Self::q_zeta(zeta).mul(&Self::q_zeta(zeta.conj()));
        g.real = true;
        g
    }

    /// `exp(Σ h_k z^k)`.
    pub fn exp_poly(exponent: BTreeMap<i32, C64>) -> Self {
        let real = exponent.values().all(|c| c.im == 0.0);
        Self { exponent, real, ..Self::identity() }
    }

    /// `exp(c z^k)` for real `c`.
    pub fn exp_monomial(k: i32, c: f64) -> Self {
        Self::exp_poly(BTreeMap::from([(k, C64::new(c, 0.0))]))
    }

    pub fn z_pow(n: i64) -> Self {
        let zero = C64::new(0.0, 0.0);
        let list = vec![zero; n.unsigned_abs() as usize];
        if n >= 0 {
            Self { zeros: list, ..Self::identity() }
        } else {
            Self { poles: list, ..Self::identity() }
        }
    }

    /// `(1 − h/n)^{−n}` as a rational element.
    pub fn power_approximant(exponent: &BTreeMap<i32, C64>, n: u32) -> Result<Self, SymbolError> {
        let lo = exponent.keys().next().copied().unwrap_or(0).min(0);
        let hi = exponent.keys().next_back().copied().unwrap_or(0).max(0);
        // z^{-lo} (1 − h(z)/n) as a polynomial in ascending powers
        let deg = (hi - lo) as usize;
        let mut poly = vec![C64::new(0.0, 0.0); deg + 1];
        poly[(-lo) as usize] += 1.0;
        for (&k, &c) in exponent {
            poly[(k - lo) as usize] -= c / n as f64;
        }
        while poly.len() > 1 && poly.last().is_some_and(|c| c.norm() == 0.0) {
            poly.pop();
        }
        let roots = poly_roots(&poly)?;
        let lead = *poly.last().unwrap();
        let mut poles = Vec::new();
        for r in &roots {
            poles.extend(std::iter::repeat_n(*r, n as usize));
        }
        let zeros = vec![C64::new(0.0, 0.0); (-lo) as usize * n as usize];
        let real = exponent.values().all(|c| c.im == 0.0);
        // |lead|^{-n} leaves the f64 range for large n, so it lives in the exponent
        let exponent = BTreeMap::from([(0, C64::new(-(n as f64) * lead.norm().ln(), 0.0))]);
        let scale = (lead / lead.norm()).powi(-(n as i32));
        let mut g = Self { zeros, poles, exponent, real, scale };
        g.cancel_origin();
        Ok(g)
    }

    /// `(P, P', Q, Q')` for the zero and pole products.
    fn rational_terms(&self, z: C64) -> Result<(C64, C64, C64, C64), SymbolError> {
        let mut num = C64::new(1.0, 0.0);
        let mut num_d = C64::new(0.0, 0.0);
        for &a in &self.zeros {
            num_d = num_d * (z - a) + num;
            num *= z - a;
        }
        let mut den = C64::new(1.0, 0.0);
        let mut den_d = C64::new(0.0, 0.0);
        for &b in &self.poles {
            if (z - b).norm() < 1e-12 {
                return Err(SymbolError::PoleHit { point: z });
            }
            den_d = den_d * (z - b) + den;
            den *= z - b;
        }
        Ok((num, num_d, den, den_d))
    }

    fn h(&self, z: C64) -> (C64, C64) {
        let mut h = C64::new(0.0, 0.0);
        let mut hd = C64::new(0.0, 0.0);
        for (&k, &c) in &self.exponent {
            h += c * z.powi(k);
            if k != 0 {
                hd += c * k as f64 * z.powi(k - 1);
            }
        }
        (h, hd)
    }

    /// `(log g(z), g'(z)/g(z))` summed factor by factor, so high-order
    /// elements neither overflow nor underflow; `None` at an exact zero.
    fn log_terms(&self, z: C64) -> Result<Option<(C64, C64)>, SymbolError> {
        let (mut lg, mut dl) = self.h(z);
        lg += self.scale.ln();
        for &a in &self.zeros {
            let d = z - a;
            if d == C64::new(0.0, 0.0) {
                return Ok(None);
            }
            lg += d.ln();
            dl += 1.0 / d;
        }
        for &b in &self.poles {
            let d = z - b;
            if d.norm() < 1e-12 {
                return Err(SymbolError::PoleHit { point: z });
            }
            lg -= d.ln();
            dl -= 1.0 / d;
        }
        Ok(Some((lg, dl)))
    }

    pub fn eval(&self, z: C64) -> Result<C64, SymbolError> {
        Ok(match self.log_terms(z)? {
            Some((lg, _)) => lg.exp(),
            None => C64::new(0.0, 0.0),
        })
    }

    pub fn derivative(&self, z: C64) -> Result<C64, SymbolError> {
        if let Some((lg, dl)) = self.log_terms(z)? {
            return Ok(lg.exp() * dl);
        }
        let (num, num_d, den, den_d) = self.rational_terms(z)?;
        let (h, hd) = self.h(z);
        let r = num / den;
        let rd = (num_d * den - num * den_d) / (den * den);
        Ok(self.scale * h.exp() * (rd + r * hd))
    }

    pub fn sample(&self, grid: &ContourGrid) -> Result<GridFunction, SymbolError> {
        let v: Result<Vec<C64>, _> = grid.nodes().iter().map(|&z| self.eval(z)).collect();
        Ok(GridFunction::from_values(v?))
    }

    /// Zeros minus poles inside the unit disc, plus `z^n` contributions.
    pub fn index_shift(&self) -> i64 {
        let inside = |v: &[C64]| v.iter().filter(|z| z.norm() < 1.0).count() as i64;
        inside(&self.zeros) - inside(&self.poles)
    }

    /// `g̃(z) = g(z⁻¹)`.
    pub fn tilde(&self) -> Self {
        let zero = C64::new(0.0, 0.0);
        let mut out = Self {
            zeros: vec![],
            poles: vec![],
            exponent: self.exponent.iter().map(|(&k, &c)| (-k, c)).collect(),
            real: self.real,
            scale: self.scale,
        };
        for &a in &self.zeros {
            if a == zero {
                out.poles.push(zero);
            } else {
                out.zeros.push(1.0 / a);
                out.poles.push(zero);
                out.scale *= -a;
            }
        }
        for &b in &self.poles {
            if b == zero {
                out.zeros.push(zero);
            } else {
                out.poles.push(1.0 / b);
                out.zeros.push(zero);
                out.scale /= -b;
            }
        }
        out.cancel_origin();
        out
    }

    pub fn inverse(&self) -> Self {
        Self {
            zeros: self.poles.clone(),
            poles: self.zeros.clone(),
            exponent: self.exponent.iter().map(|(&k, &c)| (k, -c)).collect(),
            real: self.real,
            scale: 1.0 / self.scale,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exponent = self.exponent.clone();
        for (&k, &c) in &other.exponent {
            *exponent.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        let mut out = Self {
            zeros: [self.zeros.clone(), other.zeros.clone()].concat(),
            poles: [self.poles.clone(), other.poles.clone()].concat(),
            exponent,
            real: self.real && other.real,
            scale: self.scale * other.scale,
        };
        out.cancel_origin();
        out
    }

    fn cancel_origin(&mut self) {
        let zero = C64::new(0.0, 0.0);
        loop {
            let zi = self.zeros.iter().position(|&z| z == zero);
            let pi = self.poles.iter().position(|&z| z == zero);
            match (zi, pi) {
                (Some(i), Some(j)) => {
                    self.zeros.remove(i);
                    self.poles.remove(j);
                }
                _ => break,
            }
        }
    }

    /// Checks singularities stay off the closed annulus and the real flag.
    pub fn validate(&self, domain: &AnnulusDomain) -> Result<(), SymbolError> {
        for &p in self.zeros.iter().chain(&self.poles) {
            let r = p.norm();
            if r <= domain.radius && r >= domain.inner_radius() {
                return Err(SymbolError::SingularityInPlus(p));
            }
        }
        if self.real {
            if !conj_closed(&self.zeros) {
                return Err(SymbolError::NotReal("zeros not closed under conjugation".into()));
            }
            if !conj_closed(&self.poles) {
                return Err(SymbolError::NotReal("poles not closed under conjugation".into()));
            }
            if self.exponent.values().any(|c| c.im.abs() > 1e-14 * c.norm().max(1.0)) {
                return Err(SymbolError::NotReal("complex exponent coefficient".into()));
            }
            if self.scale.im.abs() > 1e-14 * self.scale.norm() {
                return Err(SymbolError::NotReal("complex scale".into()));
            }
        }
        Ok(())
    }
}

fn conj_closed(v: &[C64]) -> bool {
    let mut used = vec![false; v.len()];
    for i in 0..v.len() {
        if used[i] {
            continue;
        }
        if v[i].im.abs() <= 1e-14 * v[i].norm().max(1.0) {
            used[i] = true;
            continue;
        }
        let target = v[i].conj();
        match (0..v.len()).find(|&j| !used[j] && j != i && (v[j] - target).norm() <= 1e-12 * target.norm().max(1.0)) {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => return false,
        }
    }
    true
}

/// Roots of `Σ c_k z^k` (ascending coefficients) from the companion matrix.
fn poly_roots(c: &[C64]) -> Result<Vec<C64>, SymbolError> {
    let deg = c.len() - 1;
    match deg {
        0 => Ok(vec![]),
        1 => Ok(vec![-c[0] / c[1]]),
        _ => {
            let lead = c[deg];
            let mut comp = DMatrix::<C64>::zeros(deg, deg);
            for i in 1..deg {
                comp[(i, i - 1)] = C64::new(1.0, 0.0);
            }
            for i in 0..deg {
                comp[(i, deg - 1)] = -c[i] / lead;
            }
            Schur::try_new(comp, 1e-15, 10_000)
                .and_then(|s| s.eigenvalues())
                .map(|e| e.iter().copied().collect())
                .ok_or_else(|| SymbolError::Malformed("root finding did not converge".into()))
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Re(f64),
    Cx([f64; 2]),
}

impl From<Num> for C64 {
    fn from(n: Num) -> Self {
        match n {
            Num::Re(x) => C64::new(x, 0.0),
            Num::Cx([a, b]) => C64::new(a, b),
        }
    }
}

fn num_of(c: C64) -> Num {
    if c.im == 0.0 {
        Num::Re(c.re)
    } else {
        Num::Cx([c.re, c.im])
    }
}

#[derive(Serialize, Deserialize)]
struct RawGroupElement {
    #[serde(default)]
    zeros: Vec<[f64; 2]>,
    #[serde(default)]
    poles: Vec<[f64; 2]>,
    #[serde(default)]
    exponent: BTreeMap<String, Num>,
    #[serde(default)]
    real: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<Num>,
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawGroupElement {
            zeros: self.zeros.iter().map(|z| [z.re, z.im]).collect(),
            poles: self.poles.iter().map(|z| [z.re, z.im]).collect(),
            exponent: self.exponent.iter().map(|(k, c)| (k.to_string(), num_of(*c))).collect(),
            real: Some(self.real),
            scale: if self.scale == C64::new(1.0, 0.0) { None } else { Some(num_of(self.scale)) },
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawGroupElement::deserialize(d)?;
        let mut exponent = BTreeMap::new();
        for (k, v) in raw.exponent {
            let k: i32 = k.trim().parse().map_err(|_| serde::de::Error::custom(format!("bad exponent key {k:?}")))?;
            exponent.insert(k, C64::from(v));
        }
        let zeros: Vec<C64> = raw.zeros.iter().map(|p| C64::new(p[0], p[1])).collect();
        let poles: Vec<C64> = raw.poles.iter().map(|p| C64::new(p[0], p[1])).collect();
        let scale = raw.scale.map(C64::from).unwrap_or(C64::new(1.0, 0.0));
        let real = raw.real.unwrap_or_else(|| {
            conj_closed(&zeros) && conj_closed(&poles) && exponent.values().all(|c| c.im == 0.0) && scale.im == 0.0
        });
        Ok(Self { zeros, poles, exponent, real, scale })
    }
}
