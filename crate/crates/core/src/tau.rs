//! Tau functions: the Fredholm determinant and its closed forms.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

use crate::contour::ContourGrid;
use crate::hardy::{project_minus, project_plus, synthesize_scaled_window, HardyError, Spectrum};
use crate::jacobi::derivative_at_zero;
use crate::symbol::{GroupElement, SymbolError, VectorSymbol};
use crate::toeplitz::{Phi, SymbolSolver, ToeplitzError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TauError {
    #[error(transparent)]
    Toeplitz(#[from] ToeplitzError),
    #[error("division by zero: {0}")]
    DivByZero(String),
}

impl From<HardyError> for TauError {
    fn from(e: HardyError) -> Self {
        Self::Toeplitz(e.into())
    }
}

impl From<SymbolError> for TauError {
    fn from(e: SymbolError) -> Self {
        Self::Toeplitz(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TauMethod {
    Determinant,
    ClosedForm,
    CocycleChain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauValue {
    pub value: C64,
    pub method: TauMethod,
    /// Condition estimate of the `T(𝐚)` section used.
    pub condition: f64,
}

impl TauValue {
    pub fn is_real(&self, tol: f64) -> bool {
        self.value.im.abs() <= tol * self.value.norm().max(f64::MIN_POSITIVE)
    }
}

/// `det(g⁻¹ T(g𝐚) T(𝐚)⁻¹) = det(I + g⁻¹ H_g S_𝐚 T(𝐚)⁻¹)`.
///
/// The intermediate projections keep every resolved mode; only the final
/// columns are cut to the `[-N, N]` window.
pub fn tau_det(grid: &ContourGrid, a: &VectorSymbol, g: &GroupElement) -> Result<TauValue, TauError> {
    let solver = SymbolSolver::new(grid, a)?;
    tau_det_with(&solver, g)
}

/// [`tau_det`] reusing a factorized symbol.
pub fn tau_det_with(solver: &SymbolSolver<'_>, g: &GroupElement) -> Result<TauValue, TauError> {
    let grid = solver.grid;
    g.validate(grid.domain())?;
    let gv = g.sample(grid)?;
    let giv = g.inverse().sample(grid)?;
    let n = grid.n() as i64;
    let dim = solver.solver.dim();
    let mut a = DMatrix::<C64>::identity(dim, dim);
    for j in 0..dim {
        let u = solver.solver.inverse_column(j);
        let ug = synthesize_scaled_window(grid, solver.solver.in_lo, u.as_slice());
        let fm = project_minus(grid, &solver.symbol.apply(grid, &ug));
        let y = project_plus(grid, &(&gv * &fm));
        let spec = Spectrum::of(grid, &(&giv * &y));
        for r in 0..dim {
            a[(r, j)] += spec.scaled(-n + r as i64);
        }
    }
    let value = a.full_piv_lu().determinant();
    Ok(TauValue { value, method: TauMethod::Determinant, condition: solver.cond() })
}

/// `φ^(0)` and `φ^(1)` of one symbol, with the limits used by the closed forms.
#[derive(Debug, Clone)]
pub struct PhiPair<'g> {
    pub grid: &'g ContourGrid,
    pub phi0: Phi,
    pub phi1: Phi,
    pub cond: f64,
}

impl<'g> PhiPair<'g> {
    pub fn new(grid: &'g ContourGrid, a: &VectorSymbol) -> Result<Self, TauError> {
        let s = SymbolSolver::new(grid, a)?;
        Ok(Self { grid, phi0: s.phi(0)?, phi1: s.phi(1)?, cond: s.cond() })
    }

    /// `τ_𝐚(q_ζ) = 1 + φ^(0)(ζ)`.
    pub fn tau_qzeta(&self, zeta: C64) -> Result<C64, TauError> {
        Ok(1.0 + self.phi0.eval(self.grid, zeta)?)
    }

    /// Two-point closed form, confluent when the points nearly coincide.
    pub fn tau_q2(&self, z1: C64, z2: C64) -> Result<C64, TauError> {
        let a1 = 1.0 + self.phi0.eval(self.grid, z1)?;
        let b1 = z1 + self.phi1.eval(self.grid, z1)?;
        if (z1 - z2).norm() < 1e-6 {
            let da = self.phi0.derivative(self.grid, z1)?;
            let db = 1.0 + self.phi1.derivative(self.grid, z1)?;
            return Ok(a1 * db - b1 * da);
        }
        let a2 = 1.0 + self.phi0.eval(self.grid, z2)?;
        let b2 = z2 + self.phi1.eval(self.grid, z2)?;
        Ok((b1 * a2 - a1 * b2) / (z1 - z2))
    }

    /// `m_𝐚(z) = (z + φ^(1)(z))/(1 + φ^(0)(z)) + lim_{w→∞} w φ^(0)(w)`.
    pub fn mfun(&self, z: C64) -> Result<C64, TauError> {
        let den = 1.0 + self.phi0.eval(self.grid, z)?;
        if den.norm() < 1e-12 {
            return Err(TauError::DivByZero(format!("1 + φ0({z}) vanishes")));
        }
        Ok((z + self.phi1.eval(self.grid, z)?) / den + self.phi0.limit_at_infinity(self.grid))
    }

    /// `n_𝐚(z) = (z + 1/z − m_𝐚(z))/(1 + φ^(0)(0))`.
    pub fn nfun(&self, z: C64) -> Result<C64, TauError> {
        let den = 1.0 + self.phi0.at_zero(self.grid);
        if den.norm() < 1e-12 {
            return Err(TauError::DivByZero("1 + φ0(0) vanishes".into()));
        }
        Ok((z + 1.0 / z - self.mfun(z)?) / den)
    }
}

pub fn tau_qzeta(grid: &ContourGrid, a: &VectorSymbol, zeta: C64) -> Result<TauValue, TauError> {
    let s = SymbolSolver::new(grid, a)?;
    let phi0 = s.phi(0)?;
    Ok(TauValue { value: 1.0 + phi0.eval(grid, zeta)?, method: TauMethod::ClosedForm, condition: s.cond() })
}

pub fn tau_q2(grid: &ContourGrid, a: &VectorSymbol, z1: C64, z2: C64) -> Result<TauValue, TauError> {
    let p = PhiPair::new(grid, a)?;
    Ok(TauValue { value: p.tau_q2(z1, z2)?, method: TauMethod::ClosedForm, condition: p.cond })
}

/// `d_k = τ_{z^k 𝐚}(z⁻¹) = 1 + φ^(0)_{z^k 𝐚}(0)` and `e_k = lim z φ^(0)_{z^k 𝐚}(z)`.
pub fn d_e(grid: &ContourGrid, a: &VectorSymbol, k: i64) -> Result<(C64, C64, f64), TauError> {
    let s = SymbolSolver::new(grid, &a.mul_zpow(grid, k))?;
    let phi = s.phi(0)?;
    Ok((1.0 + phi.at_zero(grid), phi.limit_at_infinity(grid), s.cond()))
}

/// `τ_𝐚(z^n)` by chaining one-step factors through the cocycle.
pub fn tau_zpow(grid: &ContourGrid, a: &VectorSymbol, n: i64) -> Result<TauValue, TauError> {
    let mut value = C64::new(1.0, 0.0);
    let mut cond: f64 = 1.0;
    if n > 0 {
        for k in 1..=n {
            let (d, _, c) = d_e(grid, a, k)?;
            value /= d;
            cond = cond.max(c);
        }
    } else {
        for k in n + 1..=0 {
            let (d, _, c) = d_e(grid, a, k)?;
            value *= d;
            cond = cond.max(c);
        }
    }
    Ok(TauValue { value, method: TauMethod::CocycleChain, condition: cond })
}

/// `m_𝐚(z)`.
pub fn mfun(grid: &ContourGrid, a: &VectorSymbol, z: C64) -> Result<C64, TauError> {
    PhiPair::new(grid, a)?.mfun(z)
}

/// `n_𝐚(z)`.
pub fn nfun(grid: &ContourGrid, a: &VectorSymbol, z: C64) -> Result<C64, TauError> {
    PhiPair::new(grid, a)?.nfun(z)
}

/// `m_{q_ζ 𝐚}(z)` from values of `m_𝐚` alone; at `ζ = 0` the limiting form with `m'(0)`.
pub fn herglotz_update(grid: &ContourGrid, a: &VectorSymbol, zeta: C64, z: C64) -> Result<C64, TauError> {
    let p = PhiPair::new(grid, a)?;
    herglotz_update_with(&p, zeta, z)
}

pub fn herglotz_update_with(p: &PhiPair<'_>, zeta: C64, z: C64) -> Result<C64, TauError> {
    let phi = |x: C64| x + 1.0 / x;
    let zero = C64::new(0.0, 0.0);
    let m0 = p.mfun(zero)?;
    let mz = p.mfun(z)?;
    if zeta == zero {
        let h = 1e-4 / p.grid.radius();
        let d = derivative_at_zero(|x| p.mfun(x).map_err(|e| crate::jacobi::JacobiError::DivByZero(e.to_string())), h)
            .map_err(|e| TauError::DivByZero(e.to_string()))?;
        let den = mz - m0;
        if den.norm() < 1e-12 {
            return Err(TauError::DivByZero("m(z) = m(0)".into()));
        }
        return Ok(phi(z) - d / den);
    }
    let mzeta = p.mfun(zeta)?;
    let den = mz - mzeta;
    if den.norm() < 1e-12 {
        return Err(TauError::DivByZero("m(z) = m(ζ)".into()));
    }
    Ok((m0 - mzeta) * (1.0 - (phi(z) - phi(zeta)) / den) + phi(z))
}
