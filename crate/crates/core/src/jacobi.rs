//! Eventually free Jacobi coefficients and their Weyl and m-functions.
//!
//! `(H_q u)_n = a_{n+1} u_{n+1} + a_n u_{n-1} + b_n u_n`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JacobiError {
    #[error("invalid coefficients: {0}")]
    Invalid(String),
    #[error("spectral parameter {0} is too close to the essential spectrum")]
    NearSpectrum(C64),
    #[error("half-line eigenvalue hit at spectral parameter {0}")]
    Degenerate(C64),
    #[error("point {0} lies on the unit circle")]
    OnUnitCircle(C64),
    #[error("division by zero: {0}")]
    DivByZero(String),
    #[error("m-function check ({condition}) failed at {witness}: {detail}")]
    ValidationFail { condition: String, witness: C64, detail: String },
}

/// Constant coefficients outside the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    pub a: f64,
    pub b: f64,
}

impl Default for Tail {
    fn default() -> Self {
        Self { a: 1.0, b: 0.0 }
    }
}

/// `a_n, b_n` on `[n_min, n_max]`, constant `tail` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiCoefficients {
    pub n_min: i64,
    pub n_max: i64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub tail: Tail,
}

impl JacobiCoefficients {
    pub fn free() -> Self {
        Self { n_min: 0, n_max: 0, a: vec![1.0], b: vec![0.0], tail: Tail::default() }
    }

    /// Constant `a ≡ c`, `b ≡ 0`.
    pub fn scaled_free(c: f64) -> Self {
        Self { n_min: 0, n_max: 0, a: vec![c], b: vec![0.0], tail: Tail { a: c, b: 0.0 } }
    }

    /// Free except `b_0 = beta`.
    pub fn one_site(beta: f64) -> Self {
        Self { n_min: 0, n_max: 0, a: vec![1.0], b: vec![beta], tail: Tail::default() }
    }

    pub fn from_fn<F: Fn(i64) -> (f64, f64)>(n_min: i64, n_max: i64, f: F, tail: Tail) -> Self {
        let (a, b) = (n_min..=n_max).map(f).unzip();
        Self { n_min, n_max, a, b, tail }
    }

    pub fn a(&self, n: i64) -> f64 {
        if n < self.n_min || n > self.n_max {
            self.tail.a
        } else {
            self.a[(n - self.n_min) as usize]
        }
    }

    pub fn b(&self, n: i64) -> f64 {
        if n < self.n_min || n > self.n_max {
            self.tail.b
        } else {
            self.b[(n - self.n_min) as usize]
        }
    }

    pub fn validate(&self) -> Result<(), JacobiError> {
        let len = self.n_max - self.n_min + 1;
        if len < 1 || self.a.len() as i64 != len || self.b.len() as i64 != len {
            return Err(JacobiError::Invalid(format!(
                "window [{}, {}] needs {} values, got a: {}, b: {}",
                self.n_min,
                self.n_max,
                len.max(0),
                self.a.len(),
                self.b.len()
            )));
        }
        if !(self.tail.a > 0.0) || !self.tail.b.is_finite() || !self.tail.a.is_finite() {
            return Err(JacobiError::Invalid("tail needs a > 0 and finite b".into()));
        }
        for (i, (&a, &b)) in self.a.iter().zip(&self.b).enumerate() {
            if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
                return Err(JacobiError::Invalid(format!("site {}: a = {a}, b = {b}", self.n_min + i as i64)));
            }
        }
        Ok(())
    }

    /// Restriction to `[n_min, n_max]`, keeping the tail.
    pub fn window(&self, n_min: i64, n_max: i64) -> Self {
        Self::from_fn(n_min, n_max, |n| (self.a(n), self.b(n)), self.tail)
    }

    /// Sup-norm distance over `[n_min, n_max]`.
    pub fn max_diff(&self, other: &Self, n_min: i64, n_max: i64) -> f64 {
        (n_min..=n_max).map(|n| (self.a(n) - other.a(n)).abs().max((self.b(n) - other.b(n)).abs())).fold(0.0, f64::max)
    }

    /// Gershgorin bound on the spectrum.
    pub fn norm_bound(&self) -> f64 {
        let amax = self.a.iter().copied().fold(self.tail.a, f64::max);
        let bmax = self.b.iter().map(|b| b.abs()).fold(self.tail.b.abs(), f64::max);
        2.0 * amax + bmax
    }
}

pub const WEYL_BUFFER: i64 = 200;

/// Decaying free solution ratio `1/ζ` with `ζ + 1/ζ = (w − b)/a`, `|ζ| > 1`.
fn tail_ratio(tail: Tail, w: C64) -> Result<C64, JacobiError> {
    let x = (w - tail.b) / tail.a;
    let s = (x * x - 4.0).sqrt();
    let mut zeta = (x + s) / 2.0;
    if zeta.norm() < 1.0 {
        zeta = (x - s) / 2.0;
    }
    if zeta.norm() - 1.0 < 1e-9 {
        return Err(JacobiError::NearSpectrum(w));
    }
    Ok(1.0 / zeta)
}

fn essential_distance(tail: Tail, w: C64) -> f64 {
    let lo = tail.b - 2.0 * tail.a;
    let hi = tail.b + 2.0 * tail.a;
    let x = w.re.clamp(lo, hi);
    (w - x).norm()
}

/// `m+(w) = −g_1/(a_1 g_0)` for the solution decaying at `+∞`.
pub fn weyl_plus(q: &JacobiCoefficients, w: C64) -> Result<C64, JacobiError> {
    weyl_plus_with_buffer(q, w, WEYL_BUFFER)
}

pub fn weyl_plus_with_buffer(q: &JacobiCoefficients, w: C64, buffer: i64) -> Result<C64, JacobiError> {
    if essential_distance(q.tail, w) < 1e-6 {
        return Err(JacobiError::NearSpectrum(w));
    }
    let mut r = tail_ratio(q.tail, w)?;
    let far = q.n_max.max(1) + buffer;
    for n in (1..=far).rev() {
        let den = w - q.b(n) - q.a(n + 1) * r;
        if den.norm() < 1e-14 * (1.0 + w.norm()) || !den.re.is_finite() {
            return Err(JacobiError::Degenerate(w));
        }
        r = q.a(n) / den;
    }
    Ok(-r / q.a(1))
}

/// `m-(w) = −g_{-1}/(a_0 g_0)` for the solution decaying at `−∞`.
pub fn weyl_minus(q: &JacobiCoefficients, w: C64) -> Result<C64, JacobiError> {
    weyl_minus_with_buffer(q, w, WEYL_BUFFER)
}

pub fn weyl_minus_with_buffer(q: &JacobiCoefficients, w: C64, buffer: i64) -> Result<C64, JacobiError> {
    if essential_distance(q.tail, w) < 1e-6 {
        return Err(JacobiError::NearSpectrum(w));
    }
    let mut s = tail_ratio(q.tail, w)?;
    let far = q.n_min.min(-1) - buffer;
    for n in far..0 {
        let den = w - q.b(n) - q.a(n) * s;
        if den.norm() < 1e-14 * (1.0 + w.norm()) || !den.re.is_finite() {
            return Err(JacobiError::Degenerate(w));
        }
        s = q.a(n + 1) / den;
    }
    Ok(-s / q.a(0))
}

type MClosure = Arc<dyn Fn(C64) -> Result<C64, JacobiError> + Send + Sync>;

#[derive(Clone)]
enum MKind {
    Weyl(Arc<JacobiCoefficients>),
    Closure(MClosure),
}

/// Evaluator for an m-function on `ℂ ∖ Σ`, with `m(z) ≈ a0² z + b0` near 0
/// and `m(z) ≈ z + (1 − a1²)/z` near infinity.
#[derive(Clone)]
pub struct MFunctionHandle {
    kind: MKind,
    pub a0sq: f64,
    pub a1sq: f64,
    pub b0: f64,
    real: bool,
}

impl fmt::Debug for MFunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            MKind::Weyl(_) => "weyl",
            MKind::Closure(_) => "closure",
        };
        f.debug_struct("MFunctionHandle")
            .field("kind", &kind)
            .field("a0sq", &self.a0sq)
            .field("a1sq", &self.a1sq)
            .field("b0", &self.b0)
            .finish()
    }
}

/// Four-point central difference for `m'(0)`.
pub fn derivative_at_zero<F: Fn(C64) -> Result<C64, JacobiError>>(f: F, h: f64) -> Result<C64, JacobiError> {
    let hc = C64::new(h, 0.0);
    let d1 = f(hc)? - f(-hc)?;
    let d2 = f(2.0 * hc)? - f(-2.0 * hc)?;
    Ok((8.0 * d1 - d2) / (12.0 * h))
}

impl MFunctionHandle {
    /// Wraps an arbitrary evaluator; `b0`, `a0²`, `a1²` are read off numerically.
    pub fn from_fn<F>(f: F, real: bool) -> Result<Self, JacobiError>
    where
        F: Fn(C64) -> Result<C64, JacobiError> + Send + Sync + 'static,
    {
        let b0 = f(C64::new(0.0, 0.0))?;
        let a0 = derivative_at_zero(&f, 1e-4 / 3.0)?;
        let big = C64::new(1e4, 0.0);
        let a1sq = 1.0 - (big * (f(big)? - big)).re;
        Ok(Self { kind: MKind::Closure(Arc::new(f)), a0sq: a0.re, a1sq, b0: b0.re, real })
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn eval(&self, z: C64) -> Result<C64, JacobiError> {
        match &self.kind {
            MKind::Closure(f) => f(z),
            MKind::Weyl(q) => {
                if z == C64::new(0.0, 0.0) {
                    return Ok(C64::new(self.b0, 0.0));
                }
                let r = z.norm();
                if (r - 1.0).abs() < 1e-14 {
                    return Err(JacobiError::OnUnitCircle(z));
                }
                let w = z + 1.0 / z;
                if r > 1.0 {
                    Ok(w + self.a1sq * weyl_plus(q, w)?)
                } else {
                    Ok(-self.a0sq * weyl_minus(q, w)? + self.b0)
                }
            }
        }
    }

    /// `m'(0)`; exact for Weyl handles.
    pub fn derivative_at_zero(&self) -> C64 {
        C64::new(self.a0sq, 0.0)
    }

    pub fn coefficients(&self) -> Option<&JacobiCoefficients> {
        match &self.kind {
            MKind::Weyl(q) => Some(q),
            MKind::Closure(_) => None,
        }
    }
}

/// The m-function glued from `m±` of `q`.
pub fn m_from_q(q: &JacobiCoefficients) -> Result<MFunctionHandle, JacobiError> {
    q.validate()?;
    let a0 = q.a(0);
    let a1 = q.a(1);
    let h = MFunctionHandle { kind: MKind::Weyl(Arc::new(q.clone())), a0sq: a0 * a0, a1sq: a1 * a1, b0: q.b(0), real: true };
    for r in [30.0, 300.0] {
        let z = C64::new(0.0, r);
        let dev = (h.eval(z)? - z).norm() * r;
        if dev > 10.0 * (1.0 + h.a1sq) {
            return Err(JacobiError::ValidationFail {
                condition: "asymptotics".into(),
                witness: z,
                detail: format!("|z (m(z) − z)| = {dev:.3e}"),
            });
        }
    }
    Ok(h)
}

/// Outcome of the class checks on an m-function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCertificate {
    pub asymptotics: bool,
    pub herglotz: bool,
    pub nondegenerate: bool,
    pub reality: bool,
    /// Not decidable from samples; always recorded as assumed.
    pub not_rational_in_w: &'static str,
    pub samples: usize,
}

fn sample_off_sigma(rng: &mut ChaCha8Rng, upper: bool) -> C64 {
    loop {
        let r = if rng.gen_bool(0.5) { rng.gen_range(1.05..8.0) } else { rng.gen_range(0.12..0.95) };
        let th: f64 = if upper { rng.gen_range(0.02..std::f64::consts::PI - 0.02) } else { rng.gen_range(-3.1..3.1) };
        let z = C64::from_polar(r, th);
        if z.im.abs() > 1e-3 {
            return z;
        }
    }
}

pub fn validate_m(m: &MFunctionHandle, samples: usize, seed: u64) -> Result<MCertificate, JacobiError> {
    let fail = |condition: &str, witness: C64, detail: String| JacobiError::ValidationFail {
        condition: condition.into(),
        witness,
        detail,
    };
    let z1 = C64::new(0.6, 30.0);
    let z2 = C64::new(6.0, 300.0);
    let d1 = (m.eval(z1)? - z1).norm();
    let d2 = (m.eval(z2)? - z2).norm();
    if d1 * z1.norm() > 1e3 || d2 > 0.2 * d1 + 1e-12 {
        return Err(fail("(i) asymptotics", z2, format!("|m − z| = {d1:.3e} at 30, {d2:.3e} at 300")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let zz = sample_off_sigma(&mut rng, false);
        let d = (m.eval(zz)? - m.eval(1.0 / zz)?).norm();
        if !(d > 1e-10) {
            return Err(fail("(iii) m(z) != m(1/z)", zz, format!("|m(z) − m(1/z)| = {d:.3e}")));
        }
        let z = sample_off_sigma(&mut rng, true);
        let v = m.eval(z)?;
        if !(v.im > 0.0) {
            return Err(fail("(ii) herglotz", z, format!("Im m = {:.3e}", v.im)));
        }
        let c = (m.eval(zz.conj())? - m.eval(zz)?.conj()).norm();
        if c > 1e-10 * (1.0 + zz.norm()) {
            return Err(fail("reality", zz, format!("|m(z̄) − conj m(z)| = {c:.3e}")));
        }
    }
    Ok(MCertificate {
        asymptotics: true,
        herglotz: true,
        nondegenerate: true,
        reality: true,
        not_rational_in_w: "assumed",
        samples,
    })
}

fn phi(z: C64) -> C64 {
    z + 1.0 / z
}

/// `d_ζ m(z) = φ(z) − (m(ζ) − m(0))(1 − (φ(z) − φ(ζ))/(m(z) − m(ζ)))`, `φ(z) = z + 1/z`.
pub fn herglotz_dzeta(m: &MFunctionHandle, zeta: C64, z: C64) -> Result<C64, JacobiError> {
    let mz = m.eval(zeta)?;
    dzeta_value(m, zeta, mz, m.eval(C64::new(0.0, 0.0))?, z)
}

fn dzeta_value(m: &MFunctionHandle, zeta: C64, m_zeta: C64, m0: C64, z: C64) -> Result<C64, JacobiError> {
    if z == C64::new(0.0, 0.0) {
        let delta = m0 - m_zeta;
        if delta.norm() < 1e-12 {
            return Err(JacobiError::DivByZero("m(0) = m(ζ)".into()));
        }
        return Ok(delta + phi(zeta) + m.derivative_at_zero() / delta);
    }
    let den = m.eval(z)? - m_zeta;
    if den.norm() < 1e-12 {
        return Err(JacobiError::DivByZero(format!("m(z) = m(ζ) at z = {z}")));
    }
    Ok(phi(z) - (m_zeta - m0) * (1.0 - (phi(z) - phi(zeta)) / den))
}

/// `d_ζ m` as an m-function handle, so it can be transformed again.
pub fn herglotz_transform(m: &MFunctionHandle, zeta: C64, real: bool) -> Result<MFunctionHandle, JacobiError> {
    let m_zeta = m.eval(zeta)?;
    let m0 = m.eval(C64::new(0.0, 0.0))?;
    let base = m.clone();
    MFunctionHandle::from_fn(move |z| dzeta_value(&base, zeta, m_zeta, m0, z), real)
}

/// `d_ζ̄ d_ζ m(z)`.
pub fn herglotz_pair(m: &MFunctionHandle, zeta: C64, z: C64) -> Result<C64, JacobiError> {
    let inner = herglotz_transform(m, zeta, false)?;
    herglotz_dzeta(&inner, zeta.conj(), z)
}

/// Tridiagonal matrix of `H_q` on sites `[lo, lo + size)`.
pub fn truncated_matrix(q: &JacobiCoefficients, lo: i64, size: usize) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(size, size);
    for i in 0..size {
        let n = lo + i as i64;
        h[(i, i)] = q.b(n);
        if i + 1 < size {
            h[(i, i + 1)] = q.a(n + 1);
            h[(i + 1, i)] = q.a(n + 1);
        }
    }
    h
}

/// Eigenvalue range of the `size × size` section centred at site 0.
pub fn spectrum_bounds(q: &JacobiCoefficients, size: usize) -> (f64, f64) {
    let lo = -(size as i64 / 2);
    let eig = SymmetricEigen::new(truncated_matrix(q, lo, size)).eigenvalues;
    (eig.min(), eig.max())
}
